#include "kclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kclab/errors.hpp"

namespace kclab {

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

double finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
  return x;
}

const std::set<std::string> kChecks{"kc", "witnesses", "algebra", "entanglement", "oracle", "lg"};

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, {"schema_version", "seed", "scenario", "protocol", "states", "checks", "expect", "tolerances",
                   "output", "search"},
             "config");
  if (!doc.contains("schema_version")) throw ConfigError("config.schema_version is required");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");

  RunConfig cfg;
  cfg.raw = doc;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("config.seed must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (!doc.contains("scenario")) throw ConfigError("config.scenario is required");
  cfg.scenario = doc["scenario"];
  if (!cfg.scenario.is_object() || !cfg.scenario.contains("kind") || !cfg.scenario["kind"].is_string())
    throw ConfigError("scenario.kind is required");
  cfg.scenario_kind = cfg.scenario["kind"].get<std::string>();
  if (cfg.scenario_kind == "explicit")
    check_keys(cfg.scenario, {"kind", "hamiltonians", "t"}, "scenario");
  else if (cfg.scenario_kind == "random")
    check_keys(cfg.scenario, {"kind", "d_P", "d_S", "commuting", "scale", "t"}, "scenario");
  else if (cfg.scenario_kind == "nv")
    check_keys(cfg.scenario, {"kind", "nuclei", "omega", "Omega", "couplings", "t"}, "scenario");
  else if (cfg.scenario_kind == "classical_noise")
    check_keys(cfg.scenario, {"kind", "segments", "random_segments", "xi_max"}, "scenario");
  else
    throw ConfigError("unknown scenario.kind '" + cfg.scenario_kind + "'");

  cfg.protocol = doc.value("protocol", json::object());
  check_keys(cfg.protocol, {"axes", "axis", "steps", "bases", "preparation", "n_max"}, "protocol");
  const int given = static_cast<int>(cfg.protocol.contains("axes")) + static_cast<int>(cfg.protocol.contains("axis")) +
                    static_cast<int>(cfg.protocol.contains("bases"));
  if (given > 1) throw ConfigError("protocol: give only one of axes, axis, bases");
  if (cfg.protocol.contains("n_max")) {
    if (!cfg.protocol["n_max"].is_number_integer()) throw ConfigError("protocol.n_max must be an integer");
    cfg.n_max = cfg.protocol["n_max"].get<int>();
    if (cfg.n_max < 1 || cfg.n_max > 12) throw ConfigError("protocol.n_max must be in [1, 12]");
  } else {
    cfg.n_max = -1;  // resolved against the protocol length
  }

  const json states = doc.value("states", json::array({json{{"kind", "maximally_mixed"}}}));
  if (!states.is_array() || states.empty()) throw ConfigError("states must be a nonempty array");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    check_keys(s, {"name", "kind", "ket", "seed", "matrix"}, "states[" + std::to_string(i) + "]");
    StateSpec spec;
    spec.kind = get_or<std::string>(s, "kind", "", "state");
    if (spec.kind != "maximally_mixed" && spec.kind != "ket" && spec.kind != "random" && spec.kind != "matrix")
      throw ConfigError("states[" + std::to_string(i) + "].kind must be maximally_mixed, ket, random or matrix");
    spec.name = get_or<std::string>(s, "name", spec.kind + "_" + std::to_string(i), "state");
    spec.data = s;
    cfg.states.push_back(std::move(spec));
  }

  const json checks = doc.value("checks", json::array({"kc"}));
  if (!checks.is_array()) throw ConfigError("checks must be an array");
  for (const auto& c : checks) {
    if (!c.is_string() || !kChecks.count(c.get<std::string>()))
      throw ConfigError("unknown check " + c.dump() + " (kc, witnesses, algebra, entanglement, oracle, lg)");
    cfg.checks.push_back(c.get<std::string>());
  }

  const json expect = doc.value("expect", json::object());
  check_keys(expect,
             {"kc_consistent", "commutative", "witness_nonzero", "zero_entanglement", "lg_satisfied", "oracle_agrees"},
             "expect");
  auto opt_bool = [&](const char* key) -> std::optional<bool> {
    if (!expect.contains(key)) return std::nullopt;
    if (!expect[key].is_boolean()) throw ConfigError(std::string("expect.") + key + " must be a boolean");
    return expect[key].get<bool>();
  };
  cfg.expect.kc_consistent = opt_bool("kc_consistent");
  cfg.expect.commutative = opt_bool("commutative");
  cfg.expect.witness_nonzero = opt_bool("witness_nonzero");
  cfg.expect.zero_entanglement = opt_bool("zero_entanglement");
  cfg.expect.lg_satisfied = opt_bool("lg_satisfied");
  cfg.expect.oracle_agrees = opt_bool("oracle_agrees").value_or(true);

  const json tols = doc.value("tolerances", json::object());
  if (!tols.is_object()) throw ConfigError("tolerances must be an object");
  for (const auto& [name, value] : tols.items()) {
    if (!value.is_number()) throw ConfigError("tolerances." + name + " must be a number");
    cfg.tol.set(name, value.get<double>());
  }

  const json output = doc.value("output", json::object());
  check_keys(output, {"dir"}, "output");
  cfg.output_dir = get_or<std::string>(output, "dir", cfg.output_dir, "output");

  cfg.search = doc.value("search", json::object());
  if (!cfg.search.is_object()) throw ConfigError("search must be an object");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

HermitianMatrix hamiltonian_from_json(const json& j) {
  try {
    if (j.is_string()) return HermitianMatrix(pauli::word(j.get<std::string>()));
    if (j.is_object()) {
      check_keys(j, {"pauli"}, "hamiltonian");
      const auto& terms = j.at("pauli");
      if (!terms.is_array() || terms.empty()) throw ConfigError("hamiltonian.pauli must be a nonempty array");
      Matrix sum;
      for (const auto& term : terms) {
        if (!term.is_array() || term.size() != 2 || !term[1].is_string())
          throw ConfigError("hamiltonian.pauli terms are [coeff, word]");
        const Matrix p = complex_from_json(term[0]) * pauli::word(term[1].get<std::string>());
        if (sum.size() == 0) sum = p;
        else if (sum.rows() != p.rows()) throw ConfigError("hamiltonian.pauli words differ in length");
        else sum += p;
      }
      return HermitianMatrix(sum);
    }
    return HermitianMatrix(matrix_from_json(j));
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  } catch (const InvariantViolation& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  }
}

namespace {

std::vector<MeterBasis> bases_from_json(const json& protocol, int probe_dim, std::size_t default_steps,
                                        const Tolerances& tol) {
  std::vector<MeterBasis> out;
  auto named = [&](const std::string& name) {
    if (name == "fourier") return MeterBasis::fourier(probe_dim);
    const Axis a = axis_from_string(name);
    if (probe_dim != 2) throw ConfigError("protocol: axis " + name + " needs a qubit probe (use fourier or bases)");
    if (a == Axis::X) return MeterBasis::qubit_x();
    if (a == Axis::Y) return MeterBasis::qubit_y();
    throw ConfigError("protocol: axis 'custom' needs explicit bases");
  };
  try {
    if (protocol.contains("axes")) {
      const auto& axes = protocol["axes"];
      if (!axes.is_array() || axes.empty()) throw ConfigError("protocol.axes must be a nonempty array");
      for (const auto& a : axes) {
        if (!a.is_string()) throw ConfigError("protocol.axes entries must be strings");
        out.push_back(named(a.get<std::string>()));
      }
    } else if (protocol.contains("bases")) {
      const auto& bases = protocol["bases"];
      if (!bases.is_array() || bases.empty()) throw ConfigError("protocol.bases must be a nonempty array");
      for (const auto& b : bases) {
        check_keys(b, {"states", "values"}, "protocol.bases[]");
        if (!b.contains("states") || !b["states"].is_array()) throw ConfigError("protocol.bases[].states is required");
        std::vector<Vector> states;
        for (const auto& s : b["states"]) states.push_back(vector_from_json(s));
        std::vector<double> values;
        if (b.contains("values")) {
          for (const auto& v : b["values"]) {
            if (!v.is_number()) throw ConfigError("protocol.bases[].values must be numbers");
            values.push_back(v.get<double>());
          }
        } else {
          for (std::size_t m = 0; m < states.size(); ++m) values.push_back(static_cast<double>(m));
        }
        out.emplace_back(std::move(states), std::move(values), Axis::Custom, tol.normalization);
      }
    } else {
      const std::string axis = protocol.contains("axis") ? protocol["axis"].get<std::string>()
                                                         : (probe_dim == 2 ? "X" : "fourier");
      const int steps = protocol.value("steps", static_cast<int>(default_steps));
      if (steps < 1 || steps > 12) throw ConfigError("protocol.steps must be in [1, 12]");
      for (int k = 0; k < steps; ++k) out.push_back(named(axis));
    }
  } catch (const ProtocolError& e) {
    throw ConfigError(std::string("protocol: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("protocol: ") + e.what());
  }
  return out;
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg, const ScenarioOverrides& overrides) {
  const json& s = cfg.scenario;
  const std::string& kind = cfg.scenario_kind;
  if (overrides.omega && kind != "nv") throw ConfigError("scenario kind '" + kind + "' has no parameter omega");
  if (overrides.t && kind == "classical_noise")
    throw ConfigError("scenario kind 'classical_noise' has no parameter t (segment durations are per step)");
  const std::size_t default_steps = cfg.n_max > 0 ? static_cast<std::size_t>(cfg.n_max) : 2;

  auto finish = [&](DephasingModel model) {
    const int dp = model.probe_dim();
    auto bases = bases_from_json(cfg.protocol, dp, default_steps, cfg.tol);
    PreparationState prep = PreparationState::uniform(dp);
    if (cfg.protocol.contains("preparation")) {
      try {
        prep = PreparationState(vector_from_json(cfg.protocol["preparation"]), cfg.tol.normalization);
      } catch (const InvariantViolation& e) {
        throw ConfigError(std::string("protocol.preparation: ") + e.what());
      }
    }
    if (static_cast<std::size_t>(std::max(cfg.n_max, 1)) > bases.size())
      throw ConfigError("protocol.n_max exceeds the number of protocol steps");
    return Scenario{MeasurementProtocol(model, prep, std::move(bases), cfg.tol), model};
  };

  if (kind == "explicit") {
    if (!s.contains("hamiltonians") || !s["hamiltonians"].is_array() || s["hamiltonians"].size() < 2)
      throw ConfigError("scenario.hamiltonians needs at least two entries");
    std::vector<HermitianMatrix> hams;
    for (const auto& h : s["hamiltonians"]) hams.push_back(hamiltonian_from_json(h));
    const double t = overrides.t.value_or(finite(get_or<double>(s, "t", 1.0, "scenario"), "scenario.t"));
    try {
      return finish(DephasingModel(std::move(hams), t));
    } catch (const DimensionError& e) {
      throw ConfigError(std::string("scenario: ") + e.what());
    }
  }
  if (kind == "random") {
    const int dp = get_or<int>(s, "d_P", 2, "scenario");
    const int ds = get_or<int>(s, "d_S", 2, "scenario");
    const bool commuting = get_or<bool>(s, "commuting", false, "scenario");
    const double scale = finite(get_or<double>(s, "scale", 1.0, "scenario"), "scenario.scale");
    const double t = overrides.t.value_or(finite(get_or<double>(s, "t", 1.0, "scenario"), "scenario.t"));
    try {
      return finish(random_model(cfg.seed, dp, ds, commuting, scale, t));
    } catch (const DimensionError& e) {
      throw ConfigError(std::string("scenario: ") + e.what());
    }
  }
  if (kind == "nv") {
    const int nuclei = get_or<int>(s, "nuclei", 1, "scenario");
    const double omega = overrides.omega.value_or(finite(get_or<double>(s, "omega", 1.0, "scenario"), "scenario.omega"));
    const double big_omega = finite(get_or<double>(s, "Omega", 0.0, "scenario"), "scenario.Omega");
    const double t = overrides.t.value_or(finite(get_or<double>(s, "t", 1.0, "scenario"), "scenario.t"));
    std::vector<std::array<double, 3>> couplings;
    if (!s.contains("couplings") || !s["couplings"].is_array()) throw ConfigError("scenario.couplings is required");
    for (const auto& a : s["couplings"]) {
      if (!a.is_array() || a.size() != 3) throw ConfigError("scenario.couplings entries are [A_x, A_y, A_z]");
      couplings.push_back({finite(a[0].get<double>(), "coupling"), finite(a[1].get<double>(), "coupling"),
                           finite(a[2].get<double>(), "coupling")});
    }
    try {
      return finish(nv_center_model(nuclei, omega, big_omega, couplings, t));
    } catch (const DimensionError& e) {
      throw ConfigError(std::string("scenario: ") + e.what());
    }
  }

  // classical_noise
  NoiseRealization r;
  if (s.contains("segments")) {
    if (!s["segments"].is_array() || s["segments"].empty()) throw ConfigError("scenario.segments must be nonempty");
    for (const auto& seg : s["segments"]) {
      check_keys(seg, {"xi", "duration"}, "scenario.segments[]");
      r.segments.push_back({finite(get_or<double>(seg, "xi", 0.0, "segment"), "segment.xi"),
                            finite(get_or<double>(seg, "duration", 1.0, "segment"), "segment.duration")});
    }
  } else {
    const int k = get_or<int>(s, "random_segments", 0, "scenario");
    if (k < 1 || k > 12) throw ConfigError("scenario needs segments or random_segments in [1, 12]");
    r = random_noise_realization(cfg.seed, static_cast<std::size_t>(k),
                                 finite(get_or<double>(s, "xi_max", 3.0, "scenario"), "scenario.xi_max"));
  }
  if (cfg.protocol.contains("axes") || cfg.protocol.contains("axis") || cfg.protocol.contains("bases") ||
      cfg.protocol.contains("preparation"))
    throw ConfigError("classical_noise scenarios fix the protocol (|+x> preparation, X readout)");
  const std::size_t steps = r.segments.size();
  if (cfg.n_max > static_cast<int>(steps)) throw ConfigError("protocol.n_max exceeds the number of segments");
  auto protocol = classical_noise_model(r, steps, cfg.tol);
  DephasingModel first = protocol.step_model(0);
  return Scenario{std::move(protocol), std::move(first)};
}

std::vector<std::pair<std::string, DensityMatrix>> build_states(const RunConfig& cfg, int system_dim) {
  std::vector<std::pair<std::string, DensityMatrix>> out;
  for (std::size_t i = 0; i < cfg.states.size(); ++i) {
    const auto& spec = cfg.states[i];
    try {
      if (spec.kind == "maximally_mixed") {
        out.emplace_back(spec.name, DensityMatrix::maximally_mixed(system_dim));
      } else if (spec.kind == "ket") {
        if (!spec.data.contains("ket")) throw ConfigError("state '" + spec.name + "' needs a ket");
        const Vector v = vector_from_json(spec.data["ket"]);
        if (v.size() != system_dim) throw ConfigError("state '" + spec.name + "' has the wrong dimension");
        out.emplace_back(spec.name, DensityMatrix::pure(v));
      } else if (spec.kind == "matrix") {
        if (!spec.data.contains("matrix")) throw ConfigError("state '" + spec.name + "' needs a matrix");
        const Matrix m = matrix_from_json(spec.data["matrix"]);
        if (m.rows() != system_dim || m.cols() != system_dim)
          throw ConfigError("state '" + spec.name + "' has the wrong dimension");
        out.emplace_back(spec.name, DensityMatrix(m, cfg.tol));
      } else {
        std::uint64_t seed = derive_seed(cfg.seed, 1000 + i);
        if (spec.data.contains("seed")) {
          if (!spec.data["seed"].is_number_unsigned()) throw ConfigError("state seed must be a nonnegative integer");
          seed = spec.data["seed"].get<std::uint64_t>();
        }
        out.emplace_back(spec.name, random_density(seed, system_dim));
      }
    } catch (const InvariantViolation& e) {
      throw ConfigError("state '" + spec.name + "': " + e.what());
    }
  }
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.empty()) return out;
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ConfigError("grid: '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError("grid: '" + text + "' is not a finite number");
    return v;
  };
  if (spec.rfind("lin:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(4));
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("grid: expected lin:start:stop:num");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double n = number(parts[2]);
    if (n < 0 || n != std::floor(n) || n > 1e6) throw ConfigError("grid: num must be a nonnegative integer");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
    return out;
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  return out;
}

}  // namespace kclab
