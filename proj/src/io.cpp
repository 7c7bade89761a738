#include "kclab/io.hpp"

#include <cmath>
#include <cstdio>

#include "kclab/errors.hpp"

namespace kclab {

json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or an [re, im] pair, got " + j.dump());
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ConfigError("matrix rows must be nonempty arrays");
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ConfigError("matrix rows differ in length");
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("vector must be a nonempty array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

json tolerances_to_json(const Tolerances& tol) {
  json out = json::object();
  for (const auto& [name, value] : tol.items()) out[name] = value;
  return out;
}

json model_to_json(const DephasingModel& model) {
  json hams = json::array();
  for (const auto& h : model.hamiltonians()) hams.push_back(matrix_to_json(h.matrix()));
  return {{"probe_dim", model.probe_dim()},
          {"system_dim", model.system_dim()},
          {"step_time", model.step_time()},
          {"hamiltonians", std::move(hams)}};
}

json protocol_to_json(const MeasurementProtocol& protocol) {
  json steps = json::array();
  for (std::size_t k = 0; k < protocol.steps(); ++k) {
    const auto& b = protocol.basis(k);
    json states = json::array();
    for (int m = 0; m < b.size(); ++m) states.push_back(vector_to_json(b.state(m)));
    json step = {{"axis", to_string(b.axis())}, {"values", b.values()}, {"states", std::move(states)}};
    if (protocol.is_piecewise()) step["model"] = model_to_json(protocol.step_model(k));
    steps.push_back(std::move(step));
  }
  json out = {{"steps", std::move(steps)},
              {"preparation", vector_to_json(protocol.preparation().ket())},
              {"piecewise", protocol.is_piecewise()}};
  if (!protocol.is_piecewise()) out["model"] = model_to_json(protocol.model());
  return out;
}

json kc_report_to_json(const KCReport& report) {
  json defects = json::array();
  for (const auto& d : report.defects) {
    json e = {{"n", d.n}, {"j", d.j}, {"fixed", d.fixed}, {"operator_norm", d.operator_norm}};
    if (d.state_defect) e["state_defect"] = *d.state_defect;
    defects.push_back(std::move(e));
  }
  json out = {{"n_max", report.n_max},
              {"consistent", report.consistent},
              {"n2j1_consistent", report.n2j1_consistent},
              {"n2j1_decides", report.n2j1_decides},
              {"max_operator_defect", report.max_operator_defect},
              {"tolerance", report.tolerances.kc},
              {"defects", std::move(defects)}};
  if (report.max_state_defect) out["max_state_defect"] = *report.max_state_defect;
  return out;
}

json witness_report_to_json(const WitnessReport& r) {
  return {{"kind", to_string(r.kind)}, {"n", r.n},         {"j", r.j},
          {"axis", r.axis},           {"value_convention", r.value_convention},
          {"value", r.value},         {"nonzero", r.nonzero}, {"tolerance", r.tolerance},
          {"fingerprint", r.fingerprint}};
}

json lg_to_json(const LGResult& lg) {
  return {{"p2_plus_plus", lg.p2_plus_plus},
          {"p1_plus", lg.p1_plus},
          {"p2_minus_minus", lg.p2_minus_minus},
          {"delta", lg.delta},
          {"delta_kc", lg.delta_kc},
          {"lg_satisfied", lg.lg_satisfied},
          {"p1_plus_double_time", lg.p1_plus_double_time},
          {"note", lg.note}};
}

json algebra_report_to_json(const AlgebraReport& r) {
  json effects = json::array();
  for (const auto& e : r.effects)
    effects.push_back({{"step", e.step},
                       {"outcome", e.outcome},
                       {"nondegenerate", e.result.nondegenerate},
                       {"min_gap", number_to_json(e.result.min_gap)}});
  return {{"dimension", r.dimension},
          {"closed", r.closed},
          {"commutative", r.commutative},
          {"max_commutator_norm", r.max_commutator_norm},
          {"effects", std::move(effects)},
          {"all_effects_nondegenerate", r.all_effects_nondegenerate},
          {"all_effects_degenerate", r.all_effects_degenerate},
          {"commutant_dimension", r.commutant_dimension},
          {"unitary_commutant_dimension", r.unitary_commutant_dimension},
          {"commutant_cut_spectrum", r.commutant_cut_spectrum}};
}

json entanglement_to_json(const EntanglementResult& r) {
  return {{"zero_entanglement", r.zero_entanglement},
          {"state_differences", r.state_differences},
          {"unitary_commutators", r.unitary_commutators}};
}

json search_result_to_json(const SearchResult& result) {
  const auto& s = result.spec;
  json findings = json::array();
  for (const auto& f : result.findings) {
    json hams = json::array();
    for (const auto& h : f.hamiltonians) hams.push_back(matrix_to_json(h));
    findings.push_back({{"reference", f.reference},
                        {"trial", f.trial},
                        {"trial_seed", f.trial_seed},
                        {"t", f.t},
                        {"max_commutator_norm", f.max_commutator_norm},
                        {"max_kc_defect", f.max_kc_defect},
                        {"max_effect_gap", f.max_effect_gap},
                        {"hamiltonians", std::move(hams)}});
  }
  return {{"spec",
           {{"seed", s.seed},
            {"trials", s.trials},
            {"d_P", s.probe_dim},
            {"d_S", s.system_dim},
            {"t_grid", s.t_grid},
            {"ensemble", to_string(s.ensemble)},
            {"include_reference", s.include_reference},
            {"scale", s.scale},
            {"n_max", s.n_max}}},
          {"examined", result.examined},
          {"findings", std::move(findings)}};
}

namespace {

json lg_finding_to_json(const LGFinding& f) {
  return {{"trial", f.trial},
          {"trial_seed", f.trial_seed},
          {"t", f.t},
          {"p2_plus_plus", f.p2_plus_plus},
          {"p1_plus", f.p1_plus},
          {"excess", f.excess}};
}

}  // namespace

json lg_search_to_json(const LGSearchResult& result) {
  json violations = json::array();
  for (const auto& v : result.violations) violations.push_back(lg_finding_to_json(v));
  return {{"examined", result.examined},
          {"violations", std::move(violations)},
          {"closest", lg_finding_to_json(result.closest)}};
}

std::string fingerprint(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kclab
