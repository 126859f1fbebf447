#pragma once

#include <string>
#include <vector>

#include "dfoq/direction_pack.hpp"
#include "dfoq/linalg.hpp"
#include "dfoq/oracle.hpp"
#include "dfoq/sample_set.hpp"

namespace dfoq {

/// m(x) = c + g'(x - x0) + 1/2 (x - x0)' H (x - x0). H may be asymmetric for
/// QS models; `symmetric` records whether it is.
struct QuadraticModel {
  Vec x0;
  double c = 0.0;
  Vec g;
  Mat H;
  bool symmetric = true;
};

struct SolveDiagnostics {
  Vec multipliers;                    // lambda
  double kkt_residual = 0.0;          // relative residual of the solved KKT system
  double feasibility_residual = 0.0;  // max interpolation violation / max |delta_f|
  bool alpha_unique = true;
  bool hessian_unique = true;
};

struct ModelSolution {
  QuadraticModel model;
  SolveDiagnostics diagnostics;
};

/// Residual tolerance for feasibility decisions: $DFOQ_TOL if set, else 1e-9.
double residual_tolerance();

/// Minimum norm model: min 1/2||alpha||^2 + 1/2||H||_F^2 over interpolating
/// (alpha, symmetric H). Throws kInfeasible if no quadratic interpolates.
ModelSolution solve_mn(const Oracle& f, const SampleSet& y);
ModelSolution solve_mn(const SampleSet& y, double f0, const Vec& deltas, double tol = residual_tolerance());

/// Minimum Frobenius norm model: min 1/2||H||_F^2. H is unique whenever the
/// problem is feasible; alpha is unique only on MFN-poised sets, otherwise the
/// minimum-norm alpha is returned with alpha_unique = false.
ModelSolution solve_mfn(const Oracle& f, const SampleSet& y);
ModelSolution solve_mfn(const SampleSet& y, double f0, const Vec& deltas, double tol = residual_tolerance());

/// Interpolation residuals d_i' g + 1/2 d_i' H d_i - delta_i.
Vec interpolation_residuals(const SampleSet& y, const Vec& g, const Mat& H, const Vec& deltas);

/// Dense MN multiplier matrix G = D'D + 1/4 (D'D).^2.
Mat mn_multiplier_matrix(const SampleSet& y);

/// One term c * gsg(f, x0 + offset, scale * S).
struct GradTerm {
  double coefficient = 1.0;
  Vec offset;
  Mat S;
  double scale = 1.0;
};

/// One term beta * gsh(f, x0, pack).
struct HessTerm {
  double beta = 1.0;
  DirectionPack pack;
};

struct QSSpec {
  std::vector<GradTerm> grad_terms;
  std::vector<HessTerm> hess_terms;

  void validate(Eigen::Index n) const;
  /// Every offset from x0 at which the construction evaluates f (center excluded),
  /// deduplicated into a sample set.
  SampleSet point_union(const Vec& x0) const;
};

/// g = (gsg(S) + gsg(-S))/2, H = gsh(S; T_i = [-s^i]).
QSSpec qs_centred(const Mat& S);
/// g = gsg(x0; S) + gsg(x0 - s^ell; S) - gsg(x0 - s^ell; 2S), H = gsh(S; U_S^ell).
QSSpec qs_adapted(const Mat& S, Eigen::Index ell);
/// g = gsg(S), H = gsh(S; S).
QSSpec qs_forward(const Mat& S);
/// "centred", "forward", "adapted" (ell = 0) or "adapted-<ell>".
QSSpec qs_preset(const std::string& name, const Mat& S);

QuadraticModel build_qs(const Oracle& f, const Vec& x0, const QSSpec& spec);

double model_eval(const QuadraticModel& m, const Vec& x);
/// g + 1/2 (H + H') d, which is g + H d when H is symmetric.
Vec model_grad(const QuadraticModel& m, const Vec& x);
const Mat& model_hess(const QuadraticModel& m);

struct InterpolationCheck {
  double max_violation = 0.0;
  bool pass = false;
};

/// max |m(y) - f(y)| over the center and every point of Y; passes when the
/// violation is at most tol * (1 + max |f(y)|).
InterpolationCheck interpolation_check(const QuadraticModel& m, const Oracle& f, const SampleSet& y,
                                       double tol = residual_tolerance());

}  // namespace dfoq
