#include "kclab/app.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kclab/algebra.hpp"
#include "kclab/config.hpp"
#include "kclab/errors.hpp"
#include "kclab/io.hpp"
#include "kclab/oracle.hpp"
#include "kclab/parallel.hpp"
#include "kclab/witnesses.hpp"

namespace kclab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NumericalFault& e) {
    log << "kclab: numerical fault: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CapacityError& e) {
    log << "kclab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "kclab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    log << "kclab: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    log << "kclab: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "kclab: internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

RunConfig load_with_overrides(const std::string& path, const CommandOptions& opts) {
  RunConfig cfg = load_config(path);
  if (opts.seed) cfg.seed = *opts.seed;
  for (const auto& [name, value] : opts.tolerances) cfg.tol.set(name, value);
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.threads < 1) throw ConfigError("--threads must be at least 1");
  return cfg;
}

int resolved_n_max(const RunConfig& cfg, const MeasurementProtocol& protocol) {
  return cfg.n_max > 0 ? cfg.n_max : static_cast<int>(protocol.steps());
}

json effective_settings(const RunConfig& cfg, int n_max) {
  return {{"seed", cfg.seed}, {"n_max", n_max}, {"tolerances", tolerances_to_json(cfg.tol)}};
}

void write_json(const fs::path& file, const json& doc) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  out << doc.dump(2) << '\n';
}

fs::path prepare_output(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

struct Verdict {
  std::string check;
  bool expected;
  bool observed;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::array<Axis, 2> two(Axis a) { return {a, a}; }
std::array<Axis, 3> three(Axis a) { return {a, a, a}; }

}  // namespace

std::pair<std::string, double> parse_tolerance_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--tol expects name=value, got '" + text + "'");
  const std::string name = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("--tol " + name + ": '" + value + "' is not a number");
  }
  if (used != value.size()) throw ConfigError("--tol " + name + ": '" + value + "' is not a number");
  Tolerances probe;
  probe.set(name, v);
  return {name, v};
}

int run_command(const std::string& config_path, const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = load_with_overrides(config_path, opts);
    const Tolerances& tol = cfg.tol;
    const auto scenario = build_scenario(cfg);
    const auto& protocol = scenario.protocol;
    const int n_max = resolved_n_max(cfg, protocol);
    const auto states = build_states(cfg, protocol.system_dim());
    const bool qubit_xy = protocol.probe_dim() == 2 && !protocol.is_piecewise();

    json checks = json::object();
    json timings = json::object();
    std::vector<Verdict> verdicts;
    auto timed = [&](const std::string& name, const std::function<void()>& fn) {
      const auto t0 = Clock::now();
      fn();
      timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
    };

    if (contains(cfg.checks, "kc")) {
      if (n_max < 2) throw ConfigError("the kc check needs n_max >= 2");
      timed("kc", [&] {
        const auto report = check_kc_all(protocol, n_max, tol);
        json per_state = json::array();
        for (const auto& [name, rho] : states) {
          const auto with_state = check_kc_all(protocol, n_max, rho, tol);
          per_state.push_back({{"state", name}, {"max_state_defect", *with_state.max_state_defect}});
        }
        json j = kc_report_to_json(report);
        j["states"] = std::move(per_state);
        checks["kc"] = std::move(j);
        if (cfg.expect.kc_consistent) verdicts.push_back({"kc_consistent", *cfg.expect.kc_consistent, report.consistent});
      });
    }

    if (contains(cfg.checks, "witnesses")) {
      timed("witnesses", [&] {
        json list = json::array();
        bool any = false;
        const std::string fp = fingerprint(protocol_to_json(protocol));
        const auto& values = protocol.basis(0).values();
        for (const auto& [name, rho] : states) {
          auto add = [&](WitnessReport r) {
            any = any || r.nonzero;
            json j = witness_report_to_json(r);
            j["state"] = name;
            list.push_back(std::move(j));
          };
          for (int n = 2; n <= n_max; ++n)
            for (int j = 1; j <= n - 1; ++j)
              add(make_witness_report(WitnessKind::DeltaCorr, n, j, to_string(protocol.basis(0).axis()), "values",
                                      delta_correlation(protocol, rho, n, j, values, tol), tol, fp));
          if (qubit_xy) {
            for (Axis a : {Axis::X, Axis::Y}) {
              const auto p2 = qubit_xy_protocol(scenario.model, two(a), tol);
              const auto p3 = qubit_xy_protocol(scenario.model, three(a), tol);
              add(make_witness_report(WitnessKind::Delta21, 2, 1, to_string(a), "pm1", delta_2_1(p2, rho, tol), tol,
                                      fingerprint(protocol_to_json(p2))));
              add(make_witness_report(WitnessKind::Delta32, 3, 2, to_string(a), "pm1", delta_3_2(p3, rho, tol), tol,
                                      fingerprint(protocol_to_json(p3))));
            }
          }
        }
        checks["witnesses"] = std::move(list);
        if (cfg.expect.witness_nonzero) verdicts.push_back({"witness_nonzero", *cfg.expect.witness_nonzero, any});
      });
    }

    if (contains(cfg.checks, "algebra")) {
      timed("algebra", [&] {
        const auto report = analyze_algebra(protocol, tol);
        checks["algebra"] = algebra_report_to_json(report);
        if (cfg.expect.commutative) verdicts.push_back({"commutative", *cfg.expect.commutative, report.commutative});
      });
    }

    if (contains(cfg.checks, "entanglement")) {
      if (protocol.is_piecewise()) throw ConfigError("the entanglement check needs a single model");
      timed("entanglement", [&] {
        json list = json::array();
        bool all_zero = true;
        for (const auto& [name, rho] : states) {
          const auto r = zero_entanglement_condition(rho, scenario.model, tol);
          all_zero = all_zero && r.zero_entanglement;
          json j = entanglement_to_json(r);
          j["state"] = name;
          list.push_back(std::move(j));
        }
        checks["entanglement"] = std::move(list);
        if (cfg.expect.zero_entanglement)
          verdicts.push_back({"zero_entanglement", *cfg.expect.zero_entanglement, all_zero});
      });
    }

    if (contains(cfg.checks, "lg")) {
      if (!qubit_xy) throw ConfigError("the lg check needs a qubit probe and a single model");
      timed("lg", [&] {
        json list = json::array();
        bool all_ok = true;
        const auto p = qubit_xy_protocol(scenario.model, two(Axis::X), tol);
        for (const auto& [name, rho] : states) {
          const auto r = lg_check(p, rho, tol);
          all_ok = all_ok && r.lg_satisfied;
          json j = lg_to_json(r);
          j["state"] = name;
          list.push_back(std::move(j));
        }
        checks["lg"] = std::move(list);
        if (cfg.expect.lg_satisfied) verdicts.push_back({"lg_satisfied", *cfg.expect.lg_satisfied, all_ok});
      });
    }

    if (contains(cfg.checks, "oracle")) {
      timed("oracle", [&] {
        const auto r = run_oracle(protocol, states, n_max, tol);
        json comps = json::array();
        for (const auto& c : r.comparisons) {
          json j = {{"state", c.state}, {"n", c.n}, {"entries", c.entries}, {"max_discrepancy", c.max_discrepancy}};
          if (c.product_form_discrepancy) j["product_form_discrepancy"] = *c.product_form_discrepancy;
          comps.push_back(std::move(j));
        }
        json j = {{"max_discrepancy", r.max_discrepancy}, {"threshold", r.threshold}, {"agrees", r.agrees},
                  {"comparisons", std::move(comps)}};
        if (r.max_product_form_discrepancy) j["max_product_form_discrepancy"] = *r.max_product_form_discrepancy;
        checks["oracle"] = std::move(j);
        verdicts.push_back({"oracle_agrees", cfg.expect.oracle_agrees, r.agrees});
      });
    }

    bool ok = true;
    json verdict_json = json::array();
    for (const auto& v : verdicts) {
      const bool pass = v.expected == v.observed;
      ok = ok && pass;
      verdict_json.push_back({{"check", v.check}, {"expected", v.expected}, {"observed", v.observed}, {"pass", pass}});
      if (!pass)
        log << "kclab: verdict mismatch: " << v.check << " expected " << std::boolalpha << v.expected << ", observed "
            << v.observed << '\n';
    }

    json model_json = protocol.is_piecewise() ? json(nullptr) : model_to_json(scenario.model);
    json report = {{"schema_version", kSchemaVersion},
                   {"command", "run"},
                   {"config", cfg.raw},
                   {"config_fingerprint", fingerprint(cfg.raw)},
                   {"effective", effective_settings(cfg, n_max)},
                   {"model", model_json},
                   {"protocol", protocol_to_json(protocol)},
                   {"checks", std::move(checks)},
                   {"verdicts", std::move(verdict_json)},
                   {"status", ok ? "ok" : "mismatch"}};
    const auto dir = prepare_output(cfg);
    write_json(dir / "report.json", report);
    write_json(dir / "timings.json", {{"seconds", timings}});
    return ok ? kExitOk : kExitMismatch;
  });
}

int sweep_command(const std::string& config_path, const std::string& param, const std::string& grid_spec,
                  const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    if (param != "t" && param != "omega") throw ConfigError("unknown sweep parameter '" + param + "' (t or omega)");
    const RunConfig cfg = load_with_overrides(config_path, opts);
    const auto grid = parse_grid(grid_spec);
    // Validates the scenario and the parameter before any work.
    const auto base = build_scenario(cfg, param == "t" ? ScenarioOverrides{1.0, std::nullopt}
                                                        : ScenarioOverrides{std::nullopt, 1.0});
    const auto states = build_states(cfg, base.protocol.system_dim());
    const auto& rho = states.front().second;

    std::vector<std::string> rows(grid.size());
    parallel_for(grid.size(), opts.threads, [&](std::size_t k) {
      ScenarioOverrides ov;
      if (param == "t") ov.t = grid[k];
      else ov.omega = grid[k];
      const auto sc = build_scenario(cfg, ov);
      const int n_max = resolved_n_max(cfg, sc.protocol);
      std::ostringstream row;
      row << std::setprecision(17) << grid[k] << ',';
      if (n_max >= 2) row << check_kc_all(sc.protocol, n_max, cfg.tol).max_operator_defect;
      if (sc.protocol.probe_dim() == 2 && !sc.protocol.is_piecewise()) {
        const auto x2 = qubit_xy_protocol(sc.model, two(Axis::X), cfg.tol);
        const auto y2 = qubit_xy_protocol(sc.model, two(Axis::Y), cfg.tol);
        const auto x3 = qubit_xy_protocol(sc.model, three(Axis::X), cfg.tol);
        const auto y3 = qubit_xy_protocol(sc.model, three(Axis::Y), cfg.tol);
        row << ',' << delta_2_1(x2, rho, cfg.tol) << ',' << delta_2_1(y2, rho, cfg.tol) << ','
            << delta_3_2(x3, rho, cfg.tol) << ',' << delta_3_2(y3, rho, cfg.tol);
      } else {
        row << ",,,,";
      }
      row << ',';
      const auto& hams = sc.model.hamiltonians();
      if (hams.size() >= 2) row << commutator_norm(hams[0].matrix(), hams[1].matrix());
      rows[k] = row.str();
    });

    const auto dir = prepare_output(cfg);
    std::ofstream out(dir / "sweep.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write sweep.csv");
    out << param << ",max_kc_defect,delta21_x,delta21_y,delta32_x,delta32_y,commutator_norm\n";
    for (const auto& r : rows) out << r << '\n';
    return kExitOk;
  });
}

int oracle_command(const std::string& config_path, const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = load_with_overrides(config_path, opts);
    const auto scenario = build_scenario(cfg);
    const int n_max = resolved_n_max(cfg, scenario.protocol);
    const auto states = build_states(cfg, scenario.protocol.system_dim());
    const auto r = run_oracle(scenario.protocol, states, n_max, cfg.tol);

    json comps = json::array();
    for (const auto& c : r.comparisons) {
      json j = {{"state", c.state}, {"n", c.n}, {"entries", c.entries}, {"max_discrepancy", c.max_discrepancy}};
      if (c.product_form_discrepancy) j["product_form_discrepancy"] = *c.product_form_discrepancy;
      comps.push_back(std::move(j));
    }
    json report = {{"schema_version", kSchemaVersion},
                   {"command", "oracle"},
                   {"config_fingerprint", fingerprint(cfg.raw)},
                   {"effective", effective_settings(cfg, n_max)},
                   {"max_discrepancy", r.max_discrepancy},
                   {"threshold", r.threshold},
                   {"agrees", r.agrees},
                   {"comparisons", std::move(comps)}};
    if (r.max_product_form_discrepancy) report["max_product_form_discrepancy"] = *r.max_product_form_discrepancy;
    const auto dir = prepare_output(cfg);
    write_json(dir / "oracle.json", report);
    if (r.agrees != cfg.expect.oracle_agrees) {
      log << "kclab: oracle max discrepancy " << r.max_discrepancy << " (threshold " << r.threshold << ")\n";
      return kExitMismatch;
    }
    return kExitOk;
  });
}

int search_command(const std::string& config_path, const CommandOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = load_with_overrides(config_path, opts);
    const json& s = cfg.search;
    for (const auto& [key, value] : s.items())
      if (key != "trials" && key != "d_P" && key != "d_S" && key != "t_grid" && key != "ensemble" &&
          key != "include_reference" && key != "scale" && key != "n_max" && key != "expect_findings" && key != "lg")
        throw ConfigError("unknown field '" + key + "' in search");

    SearchSpec spec;
    spec.seed = cfg.seed;
    spec.trials = s.value("trials", std::size_t{1});
    spec.probe_dim = s.value("d_P", 2);
    spec.system_dim = s.value("d_S", 2);
    spec.t_grid = s.value("t_grid", std::vector<double>{1.0});
    spec.ensemble = ensemble_from_string(s.value("ensemble", std::string("gaussian")));
    spec.include_reference = s.value("include_reference", false);
    spec.scale = s.value("scale", 1.0);
    spec.n_max = s.value("n_max", 3);
    if (spec.probe_dim < 2 || spec.probe_dim > 4 || spec.system_dim < 2 || spec.system_dim > 16)
      throw ConfigError("search: d_P must be in [2, 4] and d_S in [2, 16]");
    if (spec.trials == 0) throw ConfigError("search.trials must be at least 1");

    const auto result = counterexample_search(spec, cfg.tol, opts.threads);
    json report = {{"schema_version", kSchemaVersion},
                   {"command", "search"},
                   {"config_fingerprint", fingerprint(cfg.raw)},
                   {"counterexamples", search_result_to_json(result)}};

    if (s.contains("lg")) {
      const json& lg = s["lg"];
      const auto trials = lg.value("trials", std::size_t{1});
      const auto ds = lg.value("d_S", 2);
      const auto grid = lg.value("t_grid", std::vector<double>{1.0});
      if (trials == 0) throw ConfigError("search.lg.trials must be at least 1");
      if (ds < 2 || ds > 16) throw ConfigError("search.lg.d_S must be in [2, 16]");
      report["lg"] = lg_search_to_json(lg_violation_search(derive_seed(cfg.seed, 7), trials, ds, grid, cfg.tol,
                                                           opts.threads));
    }
    const auto dir = prepare_output(cfg);
    write_json(dir / "search.json", report);
    if (s.contains("expect_findings")) {
      const bool expected = s["expect_findings"].get<bool>();
      if (expected != !result.findings.empty()) {
        log << "kclab: search found " << result.findings.size() << " instances\n";
        return kExitMismatch;
      }
    }
    return kExitOk;
  });
}

}  // namespace kclab
