#pragma once

// Run configuration (JSON, schema_version 1; field reference in
// docs/schema.md) and the scenario builder it drives.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kclab/dephasing.hpp"
#include "kclab/io.hpp"
#include "kclab/scenarios.hpp"

namespace kclab {

struct StateSpec {
  std::string name;
  std::string kind;  // maximally_mixed | ket | random | matrix
  json data;
};

struct Expectations {
  std::optional<bool> kc_consistent;
  std::optional<bool> commutative;
  std::optional<bool> witness_nonzero;  // any witness above tolerance
  std::optional<bool> zero_entanglement;  // for every state
  std::optional<bool> lg_satisfied;
  bool oracle_agrees = true;
};

struct RunConfig {
  json raw;
  std::uint64_t seed = 0;
  std::string scenario_kind;  // explicit | random | nv | classical_noise
  json scenario;
  json protocol;
  int n_max = 2;
  std::vector<StateSpec> states;
  std::vector<std::string> checks;
  Expectations expect;
  Tolerances tol;
  std::string output_dir = "kclab_out";
  json search;
};

/// Throws ConfigError on any schema violation.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

/// Overrides for sweeps; unset fields keep the configured values.
struct ScenarioOverrides {
  std::optional<double> t;
  std::optional<double> omega;
};

struct Scenario {
  MeasurementProtocol protocol;
  /// Model shared by every step; the first step's model for piecewise protocols.
  DephasingModel model;
};

Scenario build_scenario(const RunConfig& cfg, const ScenarioOverrides& overrides = {});

std::vector<std::pair<std::string, DensityMatrix>> build_states(const RunConfig& cfg, int system_dim);

/// Hamiltonian from a Pauli word ("XZ"), a dense matrix, or
/// {"pauli": [[coeff, word], ...]}.
HermitianMatrix hamiltonian_from_json(const json& j);

/// Comma-separated values, or lin:start:stop:num. An empty string is an empty grid.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace kclab
