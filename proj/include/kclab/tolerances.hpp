#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kclab {

/// Every numerical threshold used by the library, with its default.
/// Reports echo the instance they were computed with.
struct Tolerances {
  double hermiticity = 1e-12;  // relative: |M - M^dag|_F <= tol * |M|_F
  double unitarity = 1e-10;
  double density_trace = 1e-10;
  double density_min_eig = 1e-10;
  double normalization = 1e-10;  // preparation amplitudes, meter orthonormality
  double povm = 1e-10;
  double effect_kraus = 1e-12;
  double rank = 1e-9;
  double closure = 1e-9;
  double nullspace = 1e-9;  // singular value cut
  double membership = 1e-8;  // projection residual onto a basis
  double commutator = 1e-10;
  double fixed_point = 1e-10;
  double kc = 1e-9;
  double witness = 1e-9;
  double gap = 1e-8;
  double spacing = 1e-9;
  double probability_clip = 1e-10;
  double distribution_sum = 1e-9;
  double entanglement = 1e-10;
  std::size_t enumeration_cap = 1'000'000;

  /// Set a tolerance by name; throws ConfigError for unknown names or
  /// non-positive values.
  void set(std::string_view name, double value);

  /// Name/value pairs in a fixed order.
  std::vector<std::pair<std::string, double>> items() const;
};

}  // namespace kclab
