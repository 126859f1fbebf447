#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "dfoq/models.hpp"
#include "dfoq/sample_set.hpp"

namespace dfoq {

/// Contents of a sample-set file:
///   {"x0": [...], "directions": [[...], ...], "values": [...], "f0": r}
/// "values" (f at x0 + d^i) and "f0" (f at x0) are optional and go together.
struct SampleFile {
  SampleSet set;
  std::optional<Vec> values;
  std::optional<double> f0;
};

/// Parses and validates a sample-set document. Repeated directions are merged;
/// if they carry different values no quadratic can interpolate them and
/// kInfeasible is thrown.
SampleFile parse_sample_file(const nlohmann::json& doc);
SampleFile read_sample_file(const std::string& path);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);
Vec vec_from_json(const nlohmann::json& j, const char* what);

nlohmann::json model_to_json(const QuadraticModel& m);
nlohmann::json diagnostics_to_json(const SolveDiagnostics& d);
nlohmann::json poisedness_to_json(const PoisednessReport& r);

/// %.17g formatting used for every serialized float.
std::string format_double(double v);

}  // namespace dfoq
