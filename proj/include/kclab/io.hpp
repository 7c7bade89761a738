#pragma once

// JSON encoding of models, protocols and reports. Complex numbers are
// [re, im] pairs and matrices row-major nested arrays.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "kclab/algebra.hpp"
#include "kclab/dephasing.hpp"
#include "kclab/scenarios.hpp"
#include "kclab/sequence.hpp"
#include "kclab/witnesses.hpp"

namespace kclab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json complex_to_json(Complex z);
/// Accepts a bare number or an [re, im] pair.
Complex complex_from_json(const json& j);
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

json tolerances_to_json(const Tolerances& tol);
json model_to_json(const DephasingModel& model);
json protocol_to_json(const MeasurementProtocol& protocol);
json kc_report_to_json(const KCReport& report);
json witness_report_to_json(const WitnessReport& report);
json lg_to_json(const LGResult& lg);
json algebra_report_to_json(const AlgebraReport& report);
json entanglement_to_json(const EntanglementResult& result);
json search_result_to_json(const SearchResult& result);
json lg_search_to_json(const LGSearchResult& result);

/// 64-bit FNV-1a of the compact serialisation, as 16 hex digits.
std::string fingerprint(const json& j);

/// Doubles that are not finite serialise as strings ("inf", "nan").
json number_to_json(double x);

}  // namespace kclab
