#include "dfoq/models.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "dfoq/errors.hpp"
#include "dfoq/simplex.hpp"

namespace dfoq {
namespace {

struct KktOutcome {
  ModelSolution solution;
  bool feasible = false;
};

double relative_residual(const Mat& k, const Vec& z, const Vec& rhs) {
  const double denom = k.norm() * z.norm() + rhs.norm();
  return denom > 0.0 ? (k * z - rhs).norm() / denom : 0.0;
}

double feasibility_of(const Vec& residuals, const Vec& deltas) {
  const double scale = deltas.lpNorm<Eigen::Infinity>();
  const double worst = residuals.lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? worst / scale : worst;
}

Mat hessian_from_multipliers(const Mat& dbar, const Vec& scaled_lambda, double delta) {
  // H = 1/2 sum lambda_i d^i d^i' with lambda = lambda' / Delta^4 and d = Delta dbar.
  Mat h = 0.5 * dbar * scaled_lambda.asDiagonal() * dbar.transpose() / (delta * delta);
  return 0.5 * (h + h.transpose());
}

// Minimum-norm solve followed by two steps of iterative refinement, which
// recovers most of the accuracy lost to the squared conditioning of the
// multiplier systems.
Vec refined_solve(const Mat& k, const Vec& rhs) {
  const Mat kp = pinv(k);
  Vec z = kp * rhs;
  for (int step = 0; step < 2; ++step) z += kp * (rhs - k * z);
  return z;
}

void check_deltas(const SampleSet& y, const Vec& deltas) {
  require(deltas.size() == y.size(), ErrorKind::kInvalidInput, "one function difference per direction expected");
  require(deltas.allFinite(), ErrorKind::kInvalidInput, "non-finite function differences");
}

// Both KKT systems are solved in normalized coordinates (d = Delta * dbar,
// lambda = lambda' / Delta^4, alpha = alpha' / Delta). The MN system
//   [[P, Dbar'], [Dbar, -Delta^2 I]] [lambda'; alpha'] = [delta_f; 0]
// eliminates to G lambda = delta_f, and the MFN system is the same with a
// zero (2,2) block, i.e. the matrix F. Both stay well scaled as Delta -> 0.
KktOutcome mn_core(const SampleSet& y, double f0, const Vec& deltas, double tol) {
  check_deltas(y, deltas);
  const Eigen::Index m = y.size();
  const Eigen::Index n = y.dim();
  const double delta = radius(y);
  const PFMatrices pf = build_P_F(y);
  const Mat dbar = y.D() / delta;

  Mat k = pf.F;
  k.bottomRightCorner(n, n) = -(delta * delta) * Mat::Identity(n, n);
  Vec rhs = Vec::Zero(m + n);
  rhs.head(m) = deltas;
  const Vec z = refined_solve(k, rhs);
  const Vec scaled_lambda = z.head(m);

  KktOutcome out;
  QuadraticModel& model = out.solution.model;
  model.x0 = y.x0();
  model.c = f0;
  model.g = dbar * scaled_lambda / (delta * delta * delta);
  model.H = hessian_from_multipliers(dbar, scaled_lambda, delta);
  model.symmetric = true;

  SolveDiagnostics& diag = out.solution.diagnostics;
  diag.multipliers = scaled_lambda / std::pow(delta, 4);
  diag.kkt_residual = relative_residual(k, z, rhs);
  diag.feasibility_residual = feasibility_of(interpolation_residuals(y, model.g, model.H, deltas), deltas);
  diag.alpha_unique = true;
  diag.hessian_unique = true;
  out.feasible = diag.feasibility_residual <= tol;
  return out;
}

KktOutcome mfn_core(const SampleSet& y, double f0, const Vec& deltas, double tol) {
  check_deltas(y, deltas);
  const Eigen::Index m = y.size();
  const Eigen::Index n = y.dim();
  const double delta = radius(y);
  const PFMatrices pf = build_P_F(y);
  const Mat dbar = y.D() / delta;

  Vec rhs = Vec::Zero(m + n);
  rhs.head(m) = deltas;
  const Vec z = refined_solve(pf.F, rhs);
  const Vec scaled_lambda = z.head(m);

  KktOutcome out;
  QuadraticModel& model = out.solution.model;
  model.x0 = y.x0();
  model.c = f0;
  model.H = hessian_from_multipliers(dbar, scaled_lambda, delta);
  model.symmetric = true;
  // Given the unique H, the admissible alphas solve D' alpha = delta_f - 1/2 diag(D'HD);
  // take the minimum-norm one.
  const Vec quad = 0.5 * (y.D().transpose() * model.H * y.D()).diagonal();
  model.g = solve_min_norm(y.D().transpose(), deltas - quad).x;

  SolveDiagnostics& diag = out.solution.diagnostics;
  diag.multipliers = scaled_lambda / std::pow(delta, 4);
  diag.kkt_residual = relative_residual(pf.F, z, rhs);
  diag.feasibility_residual = feasibility_of(interpolation_residuals(y, model.g, model.H, deltas), deltas);
  diag.alpha_unique = numerical_rank(pf.F) == pf.F.rows();
  diag.hessian_unique = true;
  out.feasible = diag.feasibility_residual <= tol;
  return out;
}

Vec deltas_of(const Oracle& f, const SampleSet& y, double& f0) {
  f0 = f(y.x0());
  Vec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = f(y.point(i)) - f0;
  return out;
}

std::string residual_text(double r) { return std::to_string(r); }

}  // namespace

double residual_tolerance() {
  if (const char* env = std::getenv("DFOQ_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0.0) return v;
  }
  return 1e-9;
}

Vec interpolation_residuals(const SampleSet& y, const Vec& g, const Mat& H, const Vec& deltas) {
  const Mat& d = y.D();
  return d.transpose() * g + 0.5 * (d.transpose() * H * d).diagonal() - deltas;
}

Mat mn_multiplier_matrix(const SampleSet& y) {
  const Mat gram = y.D().transpose() * y.D();
  return gram + 0.25 * gram.array().square().matrix();
}

ModelSolution solve_mn(const SampleSet& y, double f0, const Vec& deltas, double tol) {
  KktOutcome out = mn_core(y, f0, deltas, tol);
  if (!out.feasible) {
    fail(ErrorKind::kInfeasible, "MN interpolation is infeasible: no quadratic interpolates the data (residual " +
                                     residual_text(out.solution.diagnostics.feasibility_residual) + ")");
  }
  return std::move(out.solution);
}

ModelSolution solve_mn(const Oracle& f, const SampleSet& y) {
  double f0 = 0.0;
  const Vec deltas = deltas_of(f, y, f0);
  return solve_mn(y, f0, deltas);
}

ModelSolution solve_mfn(const SampleSet& y, double f0, const Vec& deltas, double tol) {
  KktOutcome out = mfn_core(y, f0, deltas, tol);
  if (!out.feasible) {
    fail(ErrorKind::kInfeasible, "MFN interpolation is infeasible: no quadratic interpolates the data (residual " +
                                     residual_text(out.solution.diagnostics.feasibility_residual) + ")");
  }
  return std::move(out.solution);
}

ModelSolution solve_mfn(const Oracle& f, const SampleSet& y) {
  double f0 = 0.0;
  const Vec deltas = deltas_of(f, y, f0);
  return solve_mfn(y, f0, deltas);
}

PoisednessReport poisedness(const SampleSet& y, const Vec& deltas) {
  PoisednessReport report;
  report.mn_feasible = mn_core(y, 0.0, deltas, residual_tolerance()).feasible;
  const Mat f = build_P_F(y).F;
  report.mfn_poised = numerical_rank(f) == f.rows();
  report.F_cond = report.mfn_poised
                      ? matrix_norm(f, NormKind::kOpInf) * matrix_norm(f.inverse(), NormKind::kOpInf)
                      : std::numeric_limits<double>::infinity();
  report.rank_D = numerical_rank(y.D());
  return report;
}

// ---------------------------------------------------------------------------
// QS models

void QSSpec::validate(Eigen::Index n) const {
  // No Hessian terms means H = 0.
  require(!grad_terms.empty(), ErrorKind::kInvalidInput, "QSSpec: at least one gradient term required");
  for (const GradTerm& t : grad_terms) {
    require(t.S.rows() == n && t.S.cols() >= 1 && t.offset.size() == n, ErrorKind::kInvalidInput,
            "QSSpec: gradient term dimensions do not match n");
    require(std::isfinite(t.coefficient) && std::isfinite(t.scale) && t.scale != 0.0, ErrorKind::kInvalidInput,
            "QSSpec: gradient term coefficients must be finite and scale nonzero");
  }
  for (const HessTerm& t : hess_terms) {
    t.pack.validate();
    require(t.pack.dim() == n, ErrorKind::kInvalidInput, "QSSpec: Hessian term dimensions do not match n");
  }
}

SampleSet QSSpec::point_union(const Vec& x0) const {
  validate(x0.size());
  std::vector<Vec> offsets;
  for (const GradTerm& t : grad_terms) {
    offsets.push_back(t.offset);
    for (Eigen::Index i = 0; i < t.S.cols(); ++i) offsets.push_back(t.offset + t.scale * t.S.col(i));
  }
  for (const HessTerm& t : hess_terms) {
    for (Eigen::Index i = 0; i < t.pack.p(); ++i) {
      const Vec s = t.pack.S.col(i);
      offsets.push_back(s);
      const Mat& ti = t.pack.Ts[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < ti.cols(); ++j) {
        offsets.push_back(ti.col(j));
        offsets.push_back(s + ti.col(j));
      }
    }
  }
  return sample_set_from_offsets(x0, offsets);
}

QSSpec qs_centred(const Mat& S) {
  const Vec zero = Vec::Zero(S.rows());
  QSSpec spec;
  spec.grad_terms = {{0.5, zero, S, 1.0}, {0.5, zero, S, -1.0}};
  DirectionPack pack;
  pack.S = S;
  for (Eigen::Index i = 0; i < S.cols(); ++i) pack.Ts.push_back(-S.col(i));
  spec.hess_terms = {{1.0, std::move(pack)}};
  return spec;
}

QSSpec qs_adapted(const Mat& S, Eigen::Index ell) {
  const Mat u = build_U_S_ell(S, ell);
  const Vec zero = Vec::Zero(S.rows());
  const Vec shift = ell == 0 ? zero : Vec(-S.col(ell - 1));
  QSSpec spec;
  spec.grad_terms = {{1.0, zero, S, 1.0}, {1.0, shift, S, 1.0}, {-1.0, shift, S, 2.0}};
  spec.hess_terms = {{1.0, DirectionPack::shared(S, u)}};
  return spec;
}

QSSpec qs_forward(const Mat& S) {
  QSSpec spec;
  spec.grad_terms = {{1.0, Vec::Zero(S.rows()), S, 1.0}};
  spec.hess_terms = {{1.0, DirectionPack::shared(S, S)}};
  return spec;
}

QSSpec qs_preset(const std::string& name, const Mat& S) {
  if (name == "centred" || name == "centered") return qs_centred(S);
  if (name == "forward") return qs_forward(S);
  if (name == "adapted") return qs_adapted(S, 0);
  const std::string prefix = "adapted-";
  if (name.rfind(prefix, 0) == 0) {
    const std::string rest = name.substr(prefix.size());
    char* end = nullptr;
    const long ell = std::strtol(rest.c_str(), &end, 10);
    require(!rest.empty() && *end == '\0' && ell >= 0, ErrorKind::kInvalidInput, "bad QS preset '" + name + "'");
    return qs_adapted(S, static_cast<Eigen::Index>(ell));
  }
  fail(ErrorKind::kInvalidInput, "unknown QS preset '" + name + "' (expected centred, adapted-<ell> or forward)");
}

QuadraticModel build_qs(const Oracle& f, const Vec& x0, const QSSpec& spec) {
  spec.validate(x0.size());
  const Eigen::Index n = x0.size();
  QuadraticModel m;
  m.x0 = x0;
  m.c = f(x0);
  m.g = Vec::Zero(n);
  for (const GradTerm& t : spec.grad_terms) {
    m.g += t.coefficient * gsg(f, x0 + t.offset, t.scale * t.S);
  }
  m.H = Mat::Zero(n, n);
  for (const HessTerm& t : spec.hess_terms) m.H += t.beta * gsh(f, x0, t.pack);
  m.symmetric = (m.H - m.H.transpose()).norm() <= 1e-10 * (1.0 + m.H.norm());
  return m;
}

double model_eval(const QuadraticModel& m, const Vec& x) {
  require(x.size() == m.x0.size(), ErrorKind::kInvalidInput, "model_eval: dimension mismatch");
  const Vec d = x - m.x0;
  return m.c + m.g.dot(d) + 0.5 * d.dot(m.H * d);
}

Vec model_grad(const QuadraticModel& m, const Vec& x) {
  require(x.size() == m.x0.size(), ErrorKind::kInvalidInput, "model_grad: dimension mismatch");
  const Vec d = x - m.x0;
  return m.g + 0.5 * (m.H + m.H.transpose()) * d;
}

const Mat& model_hess(const QuadraticModel& m) { return m.H; }

InterpolationCheck interpolation_check(const QuadraticModel& m, const Oracle& f, const SampleSet& y, double tol) {
  require(y.dim() == m.x0.size(), ErrorKind::kInvalidInput, "interpolation_check: dimension mismatch");
  double worst = std::abs(model_eval(m, y.x0()) - f(y.x0()));
  double fmax = std::abs(f(y.x0()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Vec p = y.point(i);
    const double fp = f(p);
    worst = std::max(worst, std::abs(model_eval(m, p) - fp));
    fmax = std::max(fmax, std::abs(fp));
  }
  return {worst, worst <= tol * (1.0 + fmax)};
}

}  // namespace dfoq
