#pragma once

#include "dfoq/linalg.hpp"
#include "dfoq/models.hpp"
#include "dfoq/oracle.hpp"
#include "dfoq/sample_set.hpp"

namespace dfoq {

/// min ||H||_F subject to S' H T = rhs, optionally over symmetric H.
struct BilinearProblem {
  Mat S;
  Mat T;
  Mat rhs;  // p x q, typically delta_delta_f(x0; S; T)
  bool symmetric_constraint = false;
};

struct BilinearSolution {
  Mat H;
  bool unique = true;
  double residual = 0.0;  // ||S' H T - rhs||_F
};

/// Unconstrained: H = (S')^+ rhs T^+. Symmetric: weighted least-norm solve over
/// vech(H) (weight 1 on the diagonal, 2 off it). Throws kInfeasible when the
/// constraints cannot be met, judged by residual > tol * (1 + ||rhs||_F).
BilinearSolution solve_bilinear_min_frobenius(const BilinearProblem& prob, double tol = residual_tolerance());

/// ||P_A - P_B||_F <= tol for the orthogonal projectors onto col(A), col(B).
bool same_column_space(const Mat& a, const Mat& b, double tol = 1e-10);

/// Y = {x0, x0 + s^i, x0 + t^j, x0 + s^i + t^j}, deduplicated.
SampleSet gsh_point_union(const Vec& x0, const Mat& S, const Mat& T);

/// alpha = gsg(S) - 1/2 (S')^+ diag(dd_f(S;T) T^+ S), H = gsh(S;T), for col(S) = col(T).
/// Throws kPrecondition when the column spaces differ.
QuadraticModel mn_from_gsh_equal_colspace(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T);

struct TrustedModel {
  QuadraticModel model;
  bool alpha_trusted = false;  // mfn_poised on the induced point set
};

/// Same formulas; the gradient only matches MFN when the point union is MFN-poised.
TrustedModel mfn_from_gsh_equal_colspace(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T);

/// alpha = adapted_centred_gsg(S, ell), H = gsh(S; U_S^ell). S needs full column rank.
QuadraticModel mn_special_T(const Oracle& f, const Vec& x0, const Mat& S, Eigen::Index ell);

/// S = h [e^1 ... e^p], T_i = [-h e^i]: alpha = centred GSG and H = diag of centred
/// second differences divided by h^2, zero beyond p.
QuadraticModel mn_coordinate_centered(const Oracle& f, const Vec& x0, Eigen::Index p, double h = 1.0);

struct TransformedInstance {
  Mat S;
  Mat T;
  Oracle f;
};

/// S~ = N S P1, T~ = N T P2, f~(x) = f(x0 + N'(x - x0)). N must be orthogonal and
/// P1, P2 permutation matrices (kPrecondition otherwise).
TransformedInstance transform_instance(const Mat& S, const Mat& T, const Mat& N, const Mat& P1, const Mat& P2,
                                       const Oracle& f, const Vec& x0);

/// Distance of H from the affine family gsh + (S')^+ Z (I - T T^+) in which every
/// symmetric-problem solution lies: ||(H - gsh) T T^+|| + ||(I - S S^+)(H - gsh)||.
double affine_family_residual(const Mat& H, const Mat& gsh_value, const Mat& S, const Mat& T);

}  // namespace dfoq
