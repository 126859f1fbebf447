#include "dfoq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "dfoq/errors.hpp"

namespace dfoq {

Vec vec_from_json(const nlohmann::json& j, const char* what) {
  require(j.is_array() && !j.empty(), ErrorKind::kInvalidInput, std::string(what) + " must be a nonempty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), ErrorKind::kInvalidInput, std::string(what) + " must contain numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  require(v.allFinite(), ErrorKind::kInvalidInput, std::string(what) + " must be finite");
  return v;
}

SampleFile parse_sample_file(const nlohmann::json& doc) {
  require(doc.is_object(), ErrorKind::kInvalidInput, "sample file must be a JSON object");
  require(doc.contains("x0") && doc.contains("directions"), ErrorKind::kInvalidInput,
          "sample file needs \"x0\" and \"directions\"");
  const Vec x0 = vec_from_json(doc.at("x0"), "x0");
  const nlohmann::json& dirs = doc.at("directions");
  require(dirs.is_array() && !dirs.empty(), ErrorKind::kInvalidInput, "\"directions\" must be a nonempty array");

  std::optional<Vec> values;
  std::optional<double> f0;
  if (doc.contains("values")) {
    values = vec_from_json(doc.at("values"), "values");
    require(values->size() == static_cast<Eigen::Index>(dirs.size()), ErrorKind::kInvalidInput,
            "\"values\" needs one entry per direction");
    require(doc.contains("f0") && doc.at("f0").is_number(), ErrorKind::kInvalidInput,
            "\"values\" requires a numeric \"f0\"");
    f0 = doc.at("f0").get<double>();
    require(std::isfinite(*f0), ErrorKind::kInvalidInput, "\"f0\" must be finite");
  } else {
    require(!doc.contains("f0"), ErrorKind::kInvalidInput, "\"f0\" given without \"values\"");
  }

  std::vector<Vec> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec d = vec_from_json(dirs[i], "direction");
    require(d.size() == x0.size(), ErrorKind::kInvalidInput, "direction length differs from x0");
    std::size_t dup = cols.size();
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if ((cols[k] - d).norm() <= 1e-12 * std::max(cols[k].norm(), d.norm())) {
        dup = k;
        break;
      }
    }
    if (dup == cols.size()) {
      cols.push_back(d);
      if (values) vals.push_back((*values)(static_cast<Eigen::Index>(i)));
      continue;
    }
    if (values) {
      const double a = vals[dup];
      const double b = (*values)(static_cast<Eigen::Index>(i));
      require(std::abs(a - b) <= 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b))), ErrorKind::kInfeasible,
              "direction " + std::to_string(i) + " repeats an earlier direction with a different value; "
              "no quadratic interpolates the data");
    }
  }
  Mat D(x0.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) D.col(static_cast<Eigen::Index>(k)) = cols[k];
  SampleFile out{SampleSet(x0, D), std::nullopt, f0};
  if (values) out.values = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return out;
}

SampleFile read_sample_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kInvalidInput, "cannot open sample file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInvalidInput, "cannot parse sample file '" + path + "': " + e.what());
  }
  return parse_sample_file(doc);
}

nlohmann::json to_json(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

nlohmann::json to_json(const Mat& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(to_json(Vec(m.row(i).transpose())));
  return j;
}

nlohmann::json model_to_json(const QuadraticModel& m) {
  return {{"x0", to_json(m.x0)}, {"c", m.c}, {"g", to_json(m.g)}, {"H", to_json(m.H)}, {"symmetric", m.symmetric}};
}

nlohmann::json diagnostics_to_json(const SolveDiagnostics& d) {
  return {{"multipliers", to_json(d.multipliers)},
          {"kkt_residual", d.kkt_residual},
          {"feasibility_residual", d.feasibility_residual},
          {"alpha_unique", d.alpha_unique},
          {"hessian_unique", d.hessian_unique}};
}

nlohmann::json poisedness_to_json(const PoisednessReport& r) {
  nlohmann::json j = {{"mn_feasible", r.mn_feasible}, {"mfn_poised", r.mfn_poised}, {"rank_D", r.rank_D}};
  // JSON has no infinity; a singular F is reported as null.
  j["F_cond"] = std::isfinite(r.F_cond) ? nlohmann::json(r.F_cond) : nlohmann::json(nullptr);
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace dfoq
