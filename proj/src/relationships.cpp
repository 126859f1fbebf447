#include "dfoq/relationships.hpp"

#include <cmath>
#include <vector>

#include "dfoq/errors.hpp"
#include "dfoq/simplex.hpp"

namespace dfoq {
namespace {

void check_frames(const Mat& S, const Mat& T) {
  require(S.rows() == T.rows() && S.cols() >= 1 && T.cols() >= 1, ErrorKind::kInvalidInput,
          "S and T must be nonempty with the same number of rows");
  require(all_finite(S) && all_finite(T), ErrorKind::kInvalidInput, "S and T must be finite");
}

// Index of H(k, l), k <= l, in vech(H) ordered row by row over the upper triangle.
Eigen::Index vech_index(Eigen::Index n, Eigen::Index k, Eigen::Index l) {
  return k * n - k * (k - 1) / 2 + (l - k);
}

bool is_permutation(const Mat& p) {
  if (p.rows() != p.cols()) return false;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) != 0.0 && p(i, j) != 1.0) return false;
    }
  }
  return (p.rowwise().sum().array() == 1.0).all() && (p.colwise().sum().array() == 1.0).all();
}

Vec equal_colspace_alpha(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T) {
  const Mat dd = delta_delta_f(f, x0, S, T);
  const Vec correction = (dd * pinv(T) * S).diagonal();
  return gsg(f, x0, S) - 0.5 * pinv(S.transpose()) * correction;
}

}  // namespace

BilinearSolution solve_bilinear_min_frobenius(const BilinearProblem& prob, double tol) {
  check_frames(prob.S, prob.T);
  require(prob.rhs.rows() == prob.S.cols() && prob.rhs.cols() == prob.T.cols(), ErrorKind::kInvalidInput,
          "rhs must be p x q");
  const Mat& S = prob.S;
  const Mat& T = prob.T;
  const Eigen::Index n = S.rows();
  BilinearSolution out;
  if (!prob.symmetric_constraint) {
    out.H = pinv(S.transpose()) * prob.rhs * pinv(T);
  } else {
    const Eigen::Index p = S.cols();
    const Eigen::Index q = T.cols();
    const Eigen::Index nv = n * (n + 1) / 2;
    Mat a = Mat::Zero(p * q, nv);
    Vec b(p * q);
    Vec w(nv);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k; l < n; ++l) w(vech_index(n, k, l)) = k == l ? 1.0 : 2.0;
    }
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < q; ++j) {
        const Eigen::Index row = i * q + j;
        b(row) = prob.rhs(i, j);
        for (Eigen::Index k = 0; k < n; ++k) {
          a(row, vech_index(n, k, k)) = S(k, i) * T(k, j);
          for (Eigen::Index l = k + 1; l < n; ++l) a(row, vech_index(n, k, l)) = S(k, i) * T(l, j) + S(l, i) * T(k, j);
        }
      }
    }
    const WeightedSolution z = constrained_least_norm(a, b, w, std::nullopt, tol);
    out.H.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k; l < n; ++l) out.H(k, l) = out.H(l, k) = z.z(vech_index(n, k, l));
    }
  }
  out.residual = (S.transpose() * out.H * T - prob.rhs).norm();
  require(out.residual <= tol * (1.0 + prob.rhs.norm()), ErrorKind::kInfeasible,
          "bilinear constraints S'HT = rhs are infeasible");
  out.unique = true;
  return out;
}

bool same_column_space(const Mat& a, const Mat& b, double tol) {
  require(a.rows() == b.rows(), ErrorKind::kInvalidInput, "same_column_space: row mismatch");
  return (column_projector(a) - column_projector(b)).norm() <= tol;
}

SampleSet gsh_point_union(const Vec& x0, const Mat& S, const Mat& T) {
  check_frames(S, T);
  std::vector<Vec> offsets;
  for (Eigen::Index i = 0; i < S.cols(); ++i) offsets.push_back(S.col(i));
  for (Eigen::Index j = 0; j < T.cols(); ++j) offsets.push_back(T.col(j));
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    for (Eigen::Index j = 0; j < T.cols(); ++j) offsets.push_back(S.col(i) + T.col(j));
  }
  return sample_set_from_offsets(x0, offsets);
}

QuadraticModel mn_from_gsh_equal_colspace(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T) {
  check_frames(S, T);
  require(S.rows() == x0.size(), ErrorKind::kInvalidInput, "x0 dimension mismatch");
  require(same_column_space(S, T), ErrorKind::kPrecondition, "col(S) and col(T) differ");
  QuadraticModel m;
  m.x0 = x0;
  m.c = f(x0);
  m.g = equal_colspace_alpha(f, x0, S, T);
  m.H = gsh(f, x0, S, T);
  m.symmetric = (m.H - m.H.transpose()).norm() <= 1e-10 * (1.0 + m.H.norm());
  return m;
}

TrustedModel mfn_from_gsh_equal_colspace(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T) {
  TrustedModel out{mn_from_gsh_equal_colspace(f, x0, S, T), false};
  out.alpha_trusted = mfn_poised(gsh_point_union(x0, S, T));
  return out;
}

QuadraticModel mn_special_T(const Oracle& f, const Vec& x0, const Mat& S, Eigen::Index ell) {
  require(S.rows() == x0.size(), ErrorKind::kInvalidInput, "x0 dimension mismatch");
  require(numerical_rank(S) == S.cols(), ErrorKind::kPrecondition, "S must have full column rank");
  require(ell >= 0 && ell <= S.cols(), ErrorKind::kInvalidInput, "ell must lie in [0, p]");
  QuadraticModel m;
  m.x0 = x0;
  m.c = f(x0);
  m.g = adapted_centred_gsg(f, x0, S, ell);
  m.H = gsh(f, x0, S, build_U_S_ell(S, ell));
  m.symmetric = (m.H - m.H.transpose()).norm() <= 1e-10 * (1.0 + m.H.norm());
  return m;
}

QuadraticModel mn_coordinate_centered(const Oracle& f, const Vec& x0, Eigen::Index p, double h) {
  const Eigen::Index n = x0.size();
  require(p >= 1 && p <= n, ErrorKind::kInvalidInput, "p must lie in [1, n]");
  require(h > 0.0 && std::isfinite(h), ErrorKind::kInvalidInput, "step must be positive");
  const Mat S = h * Mat::Identity(n, n).leftCols(p);
  QuadraticModel m;
  m.x0 = x0;
  m.c = f(x0);
  m.g = centred_gsg(f, x0, S);
  m.H = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    m.H(i, i) = (f(x0 + S.col(i)) + f(x0 - S.col(i)) - 2.0 * m.c) / (h * h);
  }
  m.symmetric = true;
  return m;
}

TransformedInstance transform_instance(const Mat& S, const Mat& T, const Mat& N, const Mat& P1, const Mat& P2,
                                       const Oracle& f, const Vec& x0) {
  check_frames(S, T);
  const Eigen::Index n = S.rows();
  require(N.rows() == n && N.cols() == n, ErrorKind::kInvalidInput, "N must be n x n");
  require((N.transpose() * N - Mat::Identity(n, n)).norm() <= 1e-10, ErrorKind::kPrecondition,
          "N must be orthogonal");
  require(P1.rows() == S.cols() && is_permutation(P1), ErrorKind::kPrecondition, "P1 must be a p x p permutation");
  require(P2.rows() == T.cols() && is_permutation(P2), ErrorKind::kPrecondition, "P2 must be a q x q permutation");
  const Mat nt = N.transpose();
  Oracle inner = f;
  Oracle ft([inner, nt, x0](const Vec& x) { return inner(Vec(x0 + nt * (x - x0))); });
  return {N * S * P1, N * T * P2, ft};
}

double affine_family_residual(const Mat& H, const Mat& gsh_value, const Mat& S, const Mat& T) {
  const Mat diff = H - gsh_value;
  const Eigen::Index n = S.rows();
  const Mat pt = column_projector(T);
  const Mat ps = column_projector(S);
  return (diff * pt).norm() + ((Mat::Identity(n, n) - ps) * diff).norm();
}

}  // namespace dfoq
