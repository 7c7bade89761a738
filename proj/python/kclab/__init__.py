"""Python bindings for the kclab core library."""

from ._core import (
    KclabError,
    __version__,
    algebra_dimension,
    is_commutative,
    joint_distribution,
    kc_check,
    kc_defect,
    run,
)

__all__ = [
    "KclabError",
    "__version__",
    "algebra_dimension",
    "is_commutative",
    "joint_distribution",
    "kc_check",
    "kc_defect",
    "run",
]
