#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dfoq/linalg.hpp"
#include "dfoq/oracle.hpp"

namespace dfoq {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst residual or error observed
  double tolerance = 0.0;  // threshold it was compared with
  std::string detail;
};

/// The four small worked fixtures: MN/MFN on a 2-D five-point set, the 3-D
/// set that is MN- but not MFN-poised, the asymmetric GSH and QS coincidence.
std::vector<Check> verify_examples();

/// Closed-form MN/MFN constructions against the solvers, the symmetric
/// bilinear solver against the GSH, the transformation checks and the GSH
/// transpose identity, each on `instances` seeded random instances.
std::vector<Check> verify_relationships(int instances = 50, std::uint64_t seed = 20240611);

/// Delta-sweeps over the registry (n = 2, 3) for MN, MFN and the QS presets,
/// plus random-direction checks of the directional Hessian bounds.
std::vector<Check> verify_bounds(int grid_points = 13, double delta0 = 0.5, Eigen::Index samples = 512);

/// suite: examples | relationships | bounds | all.
std::vector<Check> run_verify_suite(const std::string& suite);

// Random instance helpers shared with the tests.
Mat random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols);
Mat random_orthogonal(std::mt19937_64& gen, Eigen::Index n);
Mat random_permutation(std::mt19937_64& gen, Eigen::Index n);
/// Random full-rank p x p matrix with condition number kept moderate.
Mat random_invertible(std::mt19937_64& gen, Eigen::Index p);
/// Random quadratic c + b'x + x'Ax/2.
Oracle random_quadratic(std::mt19937_64& gen, Eigen::Index n);
/// Random smooth non-polynomial function (sines plus a damped exponential).
Oracle random_smooth(std::mt19937_64& gen, Eigen::Index n);

/// max |a - b| / (1 + max |b|) over matching entries.
double relative_gap(const Mat& a, const Mat& b);

}  // namespace dfoq
