#include "kclab/tolerances.hpp"

#include <cmath>

#include "kclab/errors.hpp"

namespace kclab {

namespace {

template <typename Fn>
void for_each_field(Tolerances& t, Fn&& fn) {
  fn("hermiticity", t.hermiticity);
  fn("unitarity", t.unitarity);
  fn("density_trace", t.density_trace);
  fn("density_min_eig", t.density_min_eig);
  fn("normalization", t.normalization);
  fn("povm", t.povm);
  fn("effect_kraus", t.effect_kraus);
  fn("rank", t.rank);
  fn("closure", t.closure);
  fn("nullspace", t.nullspace);
  fn("membership", t.membership);
  fn("commutator", t.commutator);
  fn("fixed_point", t.fixed_point);
  fn("kc", t.kc);
  fn("witness", t.witness);
  fn("gap", t.gap);
  fn("spacing", t.spacing);
  fn("probability_clip", t.probability_clip);
  fn("distribution_sum", t.distribution_sum);
  fn("entanglement", t.entanglement);
}

}  // namespace

void Tolerances::set(std::string_view name, double value) {
  if (name == "enumeration_cap") {
    if (!(value >= 1.0) || value > 1e12) throw ConfigError("enumeration_cap must be in [1, 1e12]");
    enumeration_cap = static_cast<std::size_t>(value);
    return;
  }
  double* target = nullptr;
  for_each_field(*this, [&](std::string_view field, double& slot) {
    if (field == name) target = &slot;
  });
  if (target == nullptr) throw ConfigError("unknown tolerance '" + std::string(name) + "'");
  if (!std::isfinite(value) || value <= 0.0)
    throw ConfigError("tolerance '" + std::string(name) + "' must be positive and finite");
  *target = value;
}

std::vector<std::pair<std::string, double>> Tolerances::items() const {
  std::vector<std::pair<std::string, double>> out;
  Tolerances copy = *this;
  for_each_field(copy, [&](std::string_view field, double& slot) { out.emplace_back(field, slot); });
  out.emplace_back("enumeration_cap", static_cast<double>(enumeration_cap));
  return out;
}

}  // namespace kclab
