#pragma once

#include <Eigen/Dense>
#include <optional>

namespace dfoq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class NormKind { kOp1, kOpInf, kSpectral, kFrobenius };

/// Relative singular-value cutoff used when the caller does not pass one:
/// machine epsilon times the larger matrix dimension.
double default_rank_tol(const Mat& m);

bool all_finite(const Mat& m);

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// `rel_tol * sigma_max` are treated as zero.
Mat pinv(const Mat& m, std::optional<double> rel_tol = std::nullopt);

double matrix_norm(const Mat& m, NormKind kind);

/// Numerical rank under the same truncation rule as pinv.
Eigen::Index numerical_rank(const Mat& m, std::optional<double> rel_tol = std::nullopt);

/// Orthogonal projector onto col(m).
Mat column_projector(const Mat& m, std::optional<double> rel_tol = std::nullopt);

/// Orthonormal basis of the null space of m (n x k, k may be zero).
Mat null_space(const Mat& m, std::optional<double> rel_tol = std::nullopt);

struct MinNormSolution {
  Vec x;
  double residual = 0.0;  // ||A x - b||
};

/// x = pinv(A) b. The caller inspects `residual` to detect inconsistency.
MinNormSolution solve_min_norm(const Mat& a, const Vec& b, std::optional<double> rel_tol = std::nullopt);

struct WeightedSolution {
  Vec z;
  bool unique = true;
  double residual = 0.0;  // ||A z - b||
};

/// Minimizes sum_i w_i z_i^2 subject to A z = b with the null-space method.
/// Zero weights leave coordinates out of the objective; if that makes the
/// reduced problem singular the minimum-norm minimizer is returned and
/// `unique` is false. Throws kInfeasible when A z = b is inconsistent, judged
/// by ||A z0 - b|| > feas_tol * (1 + ||b||).
WeightedSolution constrained_least_norm(const Mat& a, const Vec& b, const Vec& weights,
                                        std::optional<double> rel_tol = std::nullopt,
                                        double feas_tol = 1e-9);

}  // namespace dfoq
