#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfoq/linalg.hpp"
#include "dfoq/lipschitz.hpp"
#include "dfoq/models.hpp"
#include "dfoq/sample_set.hpp"
#include "dfoq/testbed.hpp"

namespace dfoq {

enum class ModelFamily { kMN, kMFN, kQS, kGeneric };

std::string to_string(ModelFamily f);

struct BoundConstants {
  double kappa_mH = 0.0;
  double kappa_ef = 0.0;
  double kappa_eg = 0.0;
  ModelFamily family = ModelFamily::kGeneric;
};

/// kappa_ef = (L + kappa_mH)/2 * sqrt(n) * ||pinv(normalize(Y))||_1 + (L + kappa_mH)/2,
/// kappa_eg = 2 kappa_ef + 2 kappa_mH.
BoundConstants kappa_generic(double L_grad, double kappa_mH, const SampleSet& y,
                             ModelFamily family = ModelFamily::kGeneric);

/// L/4 * m * ||F^{-1}||_inf with F built from normalized directions.
/// Throws kNotPoised when F is singular.
double kappa_mH_mfn(double L_grad, const SampleSet& y);

/// sqrt((kappa_g + kappa_eg_mfn * delta_bar)^2 + kappa_mH_mfn^2).
double kappa_mH_mn(double kappa_g, double kappa_eg_mfn, double delta_bar, double kappa_mH_mfn);

/// L * sum_k |beta_k| ||pinv(Sbar^k)|| sqrt(sum_i q_i^k ||pinv(Tbar_i^k)||^2), each
/// matrix normalized by its own radius.
double kappa_mH_qs(double L_grad, const QSSpec& spec);

BoundConstants mfn_constants(const LipschitzData& lip, const SampleSet& y);
/// delta_bar defaults to radius(y). Requires an MFN-poised set.
BoundConstants mn_constants(const LipschitzData& lip, const SampleSet& y,
                            std::optional<double> delta_bar = std::nullopt);
/// `y` is the point union of the QS construction.
BoundConstants qs_constants(const LipschitzData& lip, const QSSpec& spec, const SampleSet& y);

// Directional Hessian bounds on structured sets {x0, x0 +- d^i}. All of them
// bound |u'(H - hess f(x0)) w| for unit u, w.

/// L_hess * delta / 3.
double directional_bound_aligned(double L_hess, double delta);

/// (4 kappa_ef delta^2 + 2 L_hess delta^3 / 3) / (||d^i|| ||d^j||). Family must be MN or MFN.
double directional_bound_cross(ModelFamily family, double kappa_ef, double L_hess, double delta,
                               double norm_di, double norm_dj);

/// Bound along an arbitrary nonzero d for MN or MFN; Dhalf must have full row rank.
/// With v = pinv(Dhalf) d and r = (||v||_1^2 - ||v||_inf^2)/||v||^2:
/// 4 r kappa_ef ||pinv(Dbar)||^2 + L/3 ||pinv(Dbar)||^2 (2r + 1) Delta.
double directional_bound_general(ModelFamily family, double kappa_ef, double L_hess, const Mat& Dhalf,
                                 const Vec& d);
/// The same bound maximized over d, which replaces r by p - 1/p.
double hess_error_bound_global(ModelFamily family, double kappa_ef, double L_hess, const Mat& Dhalf);

/// ||hess f(x0)|| + L_hess delta / 3.
double directional_bound_gsh_cross(double hess_norm, double L_hess, double delta);
/// r ||hess f(x0)|| ||pinv(Sbar)||^2 + L/3 ||pinv(Sbar)||^2 (r + 1) Delta_S for d in col(S);
/// throws kDomain when d leaves col(S) by more than 1e-8 ||d||.
double directional_bound_gsh_general(double hess_norm, double L_hess, const Mat& S, const Vec& d);
double gsh_error_bound_global(double hess_norm, double L_hess, const Mat& S);

/// Unit vector u = d/||d||.
double directional_error(const Mat& H_model, const Mat& hess, const Vec& u, const Vec& w);

/// Columns of D with sign-duplicates (d^j = -t d^i, t > 0) and parallel repeats removed.
Mat distinct_axes(const Mat& D);

struct CrossError {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double error = 0.0;
};

struct ErrorReport {
  double err_f = 0.0;
  double err_g = 0.0;
  double f_scale = 0.0;              // max |f| over the probe points
  std::vector<double> aligned;       // one per axis
  std::vector<CrossError> cross;     // every pair i < j of axes
  double aligned_max = 0.0;
  double cross_max = 0.0;
  Eigen::Index probes = 0;
};

/// Deterministic probes of B(x0, delta): Halton points mapped into the ball
/// (first n primes as bases), plus the center, x0 +- delta e^i, the given
/// sample points and x0 + delta d/||d|| for every sample direction.
std::vector<Vec> ball_probes(const Vec& x0, double delta, Eigen::Index n_samples, const Mat& sample_dirs);

/// Sup errors of m against f on B(x0, radius(y)) and directional Hessian errors
/// along the axes of `axes` (defaults to distinct_axes(y.D())).
ErrorReport measure_errors(const TestFunction& f, const QuadraticModel& m, const SampleSet& y,
                           Eigen::Index n_samples = 512, std::optional<Mat> axes = std::nullopt);

/// Roundoff floor for a measured error: 1e3 * eps * |f| scaled by delta^-order
/// (order 0 for values, 1 for gradients, 2 for Hessians).
double roundoff_floor(double f_scale, double delta, int order);

/// Least-squares slope of log(err) against log(delta) over points with err
/// above its floor. Empty when fewer than two points remain.
std::optional<double> loglog_slope(const std::vector<double>& deltas, const std::vector<double>& errs,
                                   const std::vector<double>& floors);

}  // namespace dfoq
