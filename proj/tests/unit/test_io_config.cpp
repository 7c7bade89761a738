#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "kclab/config.hpp"
#include "kclab/errors.hpp"
#include "kclab/io.hpp"

using namespace kclab;

namespace {

json minimal() {
  return json::parse(R"({"schema_version": 1, "scenario": {"kind": "explicit", "hamiltonians": ["Z", "X"], "t": 0.5}})");
}

}  // namespace

TEST_CASE("complex and matrix round trips") {
  const Complex z(0.25, -1.5);
  CHECK(complex_from_json(complex_to_json(z)) == z);
  CHECK(complex_from_json(json(2.0)) == Complex(2.0, 0.0));
  CHECK(complex_to_json(z).dump() == "[0.25,-1.5]");

  const Matrix m = random_density(101, 3).matrix();
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  const json row_major = matrix_to_json(pauli::y());
  CHECK(row_major[0][1] == json::array({0.0, -1.0}));
  const Vector v = random_ket(102, 4);
  CHECK(vector_from_json(vector_to_json(v)) == v);
  CHECK_THROWS(matrix_from_json(json::parse("[[1, 2], [3]]")));
}

TEST_CASE("fingerprint") {
  const json a = {{"x", 1}, {"y", {1, 2}}};
  const json b = {{"y", {1, 2}}, {"x", 1}};
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(fingerprint(a).size() == 16);
  CHECK(fingerprint(a) != fingerprint(json{{"x", 2}, {"y", {1, 2}}}));
  CHECK(number_to_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(number_to_json(0.5) == 0.5);
}

TEST_CASE("model and protocol serialisation") {
  const auto p = fixtures::pauli_protocol(Axis::Y, 2);
  const json jm = model_to_json(p.model());
  CHECK(jm["probe_dim"] == 2);
  CHECK(matrix_from_json(jm["hamiltonians"][1]) == pauli::x());
  const json jp = protocol_to_json(p);
  CHECK(jp["steps"].size() == 2);
  CHECK(jp["steps"][1]["axis"] == "Y");
  const auto report = check_kc_all(p, 2);
  const json jr = kc_report_to_json(report);
  CHECK(jr["consistent"] == false);
  CHECK(jr["defects"].size() == report.defects.size());
}

TEST_CASE("parse_config defaults") {
  const auto cfg = parse_config(minimal());
  CHECK(cfg.scenario_kind == "explicit");
  CHECK(cfg.seed == 0);
  CHECK(cfg.checks == std::vector<std::string>{"kc"});
  REQUIRE(cfg.states.size() == 1);
  CHECK(cfg.states[0].kind == "maximally_mixed");
  const auto sc = build_scenario(cfg);
  CHECK(sc.protocol.steps() == 2);
  CHECK(sc.model.step_time() == 0.5);
}

TEST_CASE("parse_config rejects schema violations") {
  auto bad = minimal();
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad["unknown"] = 1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad["scenario"]["kind"] = "nope";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad["checks"] = json::array({"kc", "plot"});
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad["expect"] = {{"commutative", "yes"}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad["tolerances"] = {{"no_such_tolerance", 1e-3}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad["protocol"] = {{"axis", "X"}, {"axes", {"X"}}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = minimal();
  bad.erase("schema_version");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("build_scenario errors") {
  auto cfg = minimal();
  cfg["protocol"] = {{"axis", "W"}};
  CHECK_THROWS_AS(build_scenario(parse_config(cfg)), ConfigError);
  cfg = minimal();
  cfg["protocol"] = {{"axis", "Y"}, {"steps", 2}, {"n_max", 3}};
  CHECK_THROWS_AS(build_scenario(parse_config(cfg)), ConfigError);
  cfg = minimal();
  cfg["scenario"]["hamiltonians"] = {"Z", "XX"};
  CHECK_THROWS_AS(build_scenario(parse_config(cfg)), ConfigError);
  CHECK_THROWS_AS(build_scenario(parse_config(minimal()), ScenarioOverrides{std::nullopt, 1.0}), ConfigError);
}

TEST_CASE("scenario kinds") {
  auto cfg = json::parse(R"({"schema_version": 1, "seed": 7,
    "scenario": {"kind": "random", "d_P": 3, "d_S": 4, "commuting": true, "t": 0.3},
    "protocol": {"steps": 3}})");
  const auto a = build_scenario(parse_config(cfg));
  const auto b = build_scenario(parse_config(cfg));
  CHECK(a.model.probe_dim() == 3);
  CHECK(a.protocol.basis(0).size() == 3);
  CHECK(a.model.hamiltonian(2).matrix() == b.model.hamiltonian(2).matrix());

  cfg = json::parse(R"({"schema_version": 1,
    "scenario": {"kind": "nv", "nuclei": 2, "omega": 1.0, "couplings": [[1, 0, 0], [0, 0.5, 0.2]], "t": 1.0}})");
  const auto nv = build_scenario(parse_config(cfg), ScenarioOverrides{2.0, 0.0});
  CHECK(nv.model.system_dim() == 4);
  CHECK(nv.model.step_time() == 2.0);
  CHECK(hs_norm(nv.model.hamiltonian(0).matrix()) == 0.0);

  cfg = json::parse(R"({"schema_version": 1,
    "scenario": {"kind": "classical_noise", "segments": [{"xi": 0.7853981633974483, "duration": 1.0}, {"xi": 1.0, "duration": 0.5}]}})");
  const auto noise = build_scenario(parse_config(cfg));
  CHECK(noise.protocol.is_piecewise());
  CHECK(noise.protocol.steps() == 2);
  cfg["protocol"] = {{"axis", "Y"}};
  CHECK_THROWS_AS(build_scenario(parse_config(cfg)), ConfigError);
}

TEST_CASE("hamiltonian_from_json") {
  CHECK(hamiltonian_from_json("Z").matrix() == pauli::z());
  const auto h = hamiltonian_from_json(json::parse(R"({"pauli": [[0.5, "XZ"], [2, "IY"]]})"));
  CHECK(fixtures::max_abs_diff(h.matrix(), 0.5 * pauli::word("XZ") + 2.0 * pauli::word("IY")) < 1e-15);
  CHECK(hamiltonian_from_json(matrix_to_json(pauli::y())).matrix() == pauli::y());
  CHECK_THROWS_AS(hamiltonian_from_json("Q"), ConfigError);
  CHECK_THROWS_AS(hamiltonian_from_json(json::parse("[[0, 1], [2, 0]]")), ConfigError);
}

TEST_CASE("build_states") {
  auto cfg = minimal();
  cfg["states"] = json::parse(R"([{"kind": "ket", "ket": [1, 0]}, {"name": "r", "kind": "random", "seed": 3},
                                  {"kind": "matrix", "matrix": [[0.5, 0], [0, 0.5]]}])");
  const auto states = build_states(parse_config(cfg), 2);
  REQUIRE(states.size() == 3);
  CHECK(states[0].first == "ket_0");
  CHECK(states[1].first == "r");
  CHECK(states[1].second.matrix() == random_density(3, 2).matrix());
  cfg["states"] = json::parse(R"([{"kind": "ket", "ket": [1, 0, 0]}])");
  CHECK_THROWS_AS(build_states(parse_config(cfg), 2), ConfigError);
  cfg["states"] = json::parse(R"([{"kind": "matrix", "matrix": [[2, 0], [0, -1]]}])");
  CHECK_THROWS_AS(build_states(parse_config(cfg), 2), ConfigError);
}

TEST_CASE("parse_grid") {
  CHECK(parse_grid("").empty());
  CHECK(parse_grid("0.5") == std::vector<double>{0.5});
  CHECK(parse_grid("1,2,3.5") == std::vector<double>{1, 2, 3.5});
  const auto lin = parse_grid("lin:0:1:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin[1] == 0.25);
  CHECK(lin[4] == 1.0);
  CHECK(parse_grid("lin:0:1:0").empty());
  CHECK(parse_grid("lin:2:9:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("lin:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("lin:0:1:2.5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("abc"), ConfigError);
}
