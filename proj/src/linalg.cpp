#include "dfoq/linalg.hpp"

#include <algorithm>
#include <limits>

#include "dfoq/errors.hpp"

namespace dfoq {
namespace {

using Svd = Eigen::JacobiSVD<Mat>;

void check_finite(const Mat& m, const char* where) {
  require(all_finite(m), ErrorKind::kInvalidInput, std::string(where) + ": non-finite entry");
}

Svd full_svd(const Mat& m) { return Svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV); }

Eigen::Index rank_of(const Vec& sigma, double rel_tol) {
  if (sigma.size() == 0) return 0;
  const double cutoff = rel_tol * sigma(0);
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) ++r;
  return r;
}

double resolve_tol(const Mat& m, std::optional<double> rel_tol) {
  const double tol = rel_tol.value_or(default_rank_tol(m));
  require(tol >= 0.0, ErrorKind::kInvalidInput, "rank tolerance must be non-negative");
  return tol;
}

}  // namespace

double default_rank_tol(const Mat& m) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m.rows(), m.cols()));
}

bool all_finite(const Mat& m) { return m.allFinite(); }

Mat pinv(const Mat& m, std::optional<double> rel_tol) {
  check_finite(m, "pinv");
  const double tol = resolve_tol(m, rel_tol);
  const Svd svd = full_svd(m);
  const Vec& sigma = svd.singularValues();
  const Eigen::Index r = rank_of(sigma, tol);
  Mat out = Mat::Zero(m.cols(), m.rows());
  for (Eigen::Index k = 0; k < r; ++k) {
    out.noalias() += (svd.matrixV().col(k) / sigma(k)) * svd.matrixU().col(k).transpose();
  }
  return out;
}

double matrix_norm(const Mat& m, NormKind kind) {
  check_finite(m, "matrix_norm");
  switch (kind) {
    case NormKind::kOp1: return m.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::kOpInf: return m.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::kSpectral: {
      const Svd svd(m);
      return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }
    case NormKind::kFrobenius: return m.norm();
  }
  return 0.0;
}

Eigen::Index numerical_rank(const Mat& m, std::optional<double> rel_tol) {
  check_finite(m, "numerical_rank");
  const Svd svd(m);
  return rank_of(svd.singularValues(), resolve_tol(m, rel_tol));
}

Mat column_projector(const Mat& m, std::optional<double> rel_tol) {
  check_finite(m, "column_projector");
  const Svd svd = full_svd(m);
  const Eigen::Index r = rank_of(svd.singularValues(), resolve_tol(m, rel_tol));
  const auto u = svd.matrixU().leftCols(r);
  return u * u.transpose();
}

Mat null_space(const Mat& m, std::optional<double> rel_tol) {
  check_finite(m, "null_space");
  const Svd svd = full_svd(m);
  const Eigen::Index r = rank_of(svd.singularValues(), resolve_tol(m, rel_tol));
  return svd.matrixV().rightCols(m.cols() - r);
}

MinNormSolution solve_min_norm(const Mat& a, const Vec& b, std::optional<double> rel_tol) {
  require(a.rows() == b.size(), ErrorKind::kInvalidInput, "solve_min_norm: A.rows != b.dim");
  check_finite(b, "solve_min_norm");
  MinNormSolution out;
  out.x = pinv(a, rel_tol) * b;
  out.residual = (a * out.x - b).norm();
  return out;
}

WeightedSolution constrained_least_norm(const Mat& a, const Vec& b, const Vec& weights,
                                        std::optional<double> rel_tol, double feas_tol) {
  require(a.rows() == b.size(), ErrorKind::kInvalidInput, "constrained_least_norm: A.rows != b.dim");
  require(a.cols() == weights.size(), ErrorKind::kInvalidInput,
          "constrained_least_norm: one weight per unknown expected");
  require((weights.array() >= 0.0).all(), ErrorKind::kInvalidInput,
          "constrained_least_norm: weights must be non-negative");

  const MinNormSolution particular = solve_min_norm(a, b, rel_tol);
  if (particular.residual > feas_tol * (1.0 + b.norm())) {
    fail(ErrorKind::kInfeasible, "constrained_least_norm: A z = b is inconsistent (residual " +
                                     std::to_string(particular.residual) + ")");
  }

  WeightedSolution out;
  const Mat basis = null_space(a, rel_tol);
  if (basis.cols() == 0) {
    out.z = particular.x;
  } else {
    // z = z0 + N y; minimize (z0 + N y)' W (z0 + N y).
    const Mat wn = weights.asDiagonal() * basis;
    const Mat reduced = basis.transpose() * wn;
    const Vec rhs = -(wn.transpose() * particular.x);
    const Mat reduced_pinv = pinv(reduced, rel_tol);
    const Vec y = reduced_pinv * rhs;
    out.z = particular.x + basis * y;
    out.unique = numerical_rank(reduced, rel_tol) == reduced.rows();
  }
  out.residual = (a * out.z - b).norm();
  return out;
}

}  // namespace dfoq
