#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfoq/bounds.hpp"
#include "dfoq/models.hpp"
#include "dfoq/sample_set.hpp"
#include "dfoq/testbed.hpp"

namespace dfoq {

/// --set file:<path> | <path> | structured:p | random:p:seed
struct SetSpec {
  enum class Kind { kFile, kStructured, kRandom };
  Kind kind = Kind::kStructured;
  std::string path;
  Eigen::Index p = 1;
  std::uint64_t seed = 0;
};
SetSpec parse_set_spec(const std::string& text);
std::string to_string(const SetSpec& s);

/// --model mn | mfn | qs:<preset>
struct ModelSpec {
  enum class Kind { kMN, kMFN, kQS };
  Kind kind = Kind::kMN;
  std::string preset;  // QS only
};
ModelSpec parse_model_spec(const std::string& text);
std::string to_string(const ModelSpec& m);

/// --deltas start:factor:count, values start * factor^k.
struct DeltaGrid {
  double start = 1.0;
  double factor = 0.5;
  int count = 11;
  std::vector<double> values() const;
};
DeltaGrid parse_delta_grid(const std::string& text);

/// p directions drawn uniformly from the unit sphere in R^n by a seeded mt19937_64.
Mat random_unit_directions(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

struct SweepConfig {
  std::string function = "sphere";
  std::optional<Vec> x0;  // defaults to the origin
  Eigen::Index dim = 0;   // 0: infer from x0, the set file or the set size
  SetSpec set;
  ModelSpec model;
  DeltaGrid deltas;
  Eigen::Index samples = 512;
  int jobs = 1;
  std::uint64_t seed = 0;  // used by random sets given without a seed
};

struct SweepRow {
  double delta = 0.0;
  double err_f = 0.0;
  std::optional<double> bound_f;
  double err_g = 0.0;
  std::optional<double> bound_g;
  double err_dir_aligned_max = 0.0;
  std::optional<double> bound_dir_aligned;
  double err_dir_cross_max = 0.0;
  std::optional<double> bound_dir_cross;
  bool poised = false;
  bool interpolates = false;
  double f_scale = 0.0;
  bool bounds_hold = true;  // every applicable bound dominates its error (up to the roundoff floor)
};

struct SlopeCheck {
  std::optional<double> slope;
  bool asserted = false;  // leading error term is nonvanishing
  double lo = 0.0;
  double hi = 0.0;
  bool pass = true;
};

struct SweepSummary {
  SlopeCheck f;
  SlopeCheck g;
  SlopeCheck aligned;
  bool fully_linear_applies = false;
  bool directional_applies = false;
  bool all_bounds_hold = true;
  bool pass = true;
};

/// Fully resolved inputs of a sweep: the base frame at unit scale, rescaled to
/// radius delta at each grid point.
struct SweepPlan {
  TestFunction function;
  Vec x0;
  Mat base;                 // D (file) or Dhalf (structured sets)
  bool structured = false;  // set is {x0, x0 +- d^i}
  ModelSpec model;
  std::vector<double> deltas;
  Eigen::Index samples = 512;
  LipschitzData lip;        // on B(x0, 2 * deltas[0])
};

SweepPlan plan_sweep(const SweepConfig& cfg);

struct SweepResult {
  SweepPlan plan;
  std::vector<SweepRow> rows;
  SweepSummary summary;
};

/// Model, errors and bounds at a single radius.
SweepRow sweep_row(const SweepPlan& plan, const TestFunction& f, double delta);

SweepResult run_sweep(const SweepConfig& cfg);
SweepResult run_sweep(const SweepPlan& plan, int jobs);

std::string sweep_csv(const SweepResult& r);
nlohmann::json sweep_json(const SweepResult& r, const SweepConfig& cfg);

/// Second-order Taylor polynomial of f at x0, as a test function with the
/// Lipschitz data of f.
TestFunction taylor_quadratic(const TestFunction& f, const Vec& x0);

}  // namespace dfoq

namespace dfoq {

struct GeneralDirectionCheck {
  int directions = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max error / bound over the probed directions
  bool applies = false;      // structured set with full-row-rank frame (or GSH pack)
};

/// Probes `count` random unit directions (restricted to col(S) for the GSH
/// pack) against the arbitrary-direction Hessian bounds at radius delta.
GeneralDirectionCheck check_general_directions(const SweepPlan& plan, double delta, int count, std::uint64_t seed);

}  // namespace dfoq
