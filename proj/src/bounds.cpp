#include "dfoq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dfoq/errors.hpp"

namespace dfoq {
namespace {

void require_nonnegative(double v, const char* what) {
  require(std::isfinite(v) && v >= 0.0, ErrorKind::kInvalidInput, std::string(what) + " must be finite and >= 0");
}

void require_interp_family(ModelFamily f) {
  require(f == ModelFamily::kMN || f == ModelFamily::kMFN, ErrorKind::kInvalidInput,
          "directional MN/MFN bound requested for another model family");
}

double pinv_norm_normalized(const Mat& a) {
  return matrix_norm(pinv(a / radius(a)), NormKind::kSpectral);
}

// (||v||_1^2 - ||v||_inf^2) / ||v||^2
double spread_ratio(const Vec& v) {
  const double l1 = v.lpNorm<1>();
  const double linf = v.lpNorm<Eigen::Infinity>();
  return (l1 * l1 - linf * linf) / v.squaredNorm();
}

double radical_inverse(std::uint64_t k, unsigned base) {
  double inv = 1.0 / base;
  double x = 0.0;
  double f = inv;
  while (k > 0) {
    x += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return x;
}

std::vector<unsigned> first_primes(Eigen::Index n) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; static_cast<Eigen::Index>(primes.size()) < n; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

}  // namespace

std::string to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::kMN: return "MN";
    case ModelFamily::kMFN: return "MFN";
    case ModelFamily::kQS: return "QS";
    case ModelFamily::kGeneric: return "generic";
  }
  return "unknown";
}

BoundConstants kappa_generic(double L_grad, double kappa_mH, const SampleSet& y, ModelFamily family) {
  require_nonnegative(L_grad, "L_grad");
  require_nonnegative(kappa_mH, "kappa_mH");
  const double half = 0.5 * (L_grad + kappa_mH);
  const double n = static_cast<double>(y.dim());
  const double pinv_1 = matrix_norm(pinv(normalize(y)), NormKind::kOp1);
  BoundConstants k;
  k.family = family;
  k.kappa_mH = kappa_mH;
  k.kappa_ef = half * std::sqrt(n) * pinv_1 + half;
  k.kappa_eg = 2.0 * k.kappa_ef + 2.0 * kappa_mH;
  return k;
}

double kappa_mH_mfn(double L_grad, const SampleSet& y) {
  require_nonnegative(L_grad, "L_grad");
  const Mat f = build_P_F(y).F;
  require(numerical_rank(f) == f.rows(), ErrorKind::kNotPoised, "sample set is not poised for MFN interpolation");
  const double m = static_cast<double>(y.size());
  return 0.25 * L_grad * m * matrix_norm(f.inverse(), NormKind::kOpInf);
}

double kappa_mH_mn(double kappa_g, double kappa_eg_mfn, double delta_bar, double kappa_mH_mfn) {
  require_nonnegative(kappa_g, "kappa_g");
  require_nonnegative(kappa_eg_mfn, "kappa_eg_mfn");
  require_nonnegative(delta_bar, "delta_bar");
  require_nonnegative(kappa_mH_mfn, "kappa_mH_mfn");
  return std::hypot(kappa_g + kappa_eg_mfn * delta_bar, kappa_mH_mfn);
}

double kappa_mH_qs(double L_grad, const QSSpec& spec) {
  require_nonnegative(L_grad, "L_grad");
  require(!spec.hess_terms.empty(), ErrorKind::kInvalidInput, "kappa_mH_qs: no Hessian terms");
  double total = 0.0;
  for (const HessTerm& t : spec.hess_terms) {
    if (t.beta == 0.0) continue;
    double inner = 0.0;
    for (const Mat& ti : t.pack.Ts) {
      const double nt = pinv_norm_normalized(ti);
      inner += static_cast<double>(ti.cols()) * nt * nt;
    }
    total += std::abs(t.beta) * pinv_norm_normalized(t.pack.S) * std::sqrt(inner);
  }
  return L_grad * total;
}

BoundConstants mfn_constants(const LipschitzData& lip, const SampleSet& y) {
  return kappa_generic(lip.L_grad, kappa_mH_mfn(lip.L_grad, y), y, ModelFamily::kMFN);
}

BoundConstants mn_constants(const LipschitzData& lip, const SampleSet& y, std::optional<double> delta_bar) {
  const double dbar = delta_bar.value_or(radius(y));
  require(dbar >= radius(y) * (1.0 - 1e-14), ErrorKind::kPrecondition, "delta_bar must be at least the set radius");
  const BoundConstants mfn = mfn_constants(lip, y);
  const double kmh = kappa_mH_mn(lip.kappa_g, mfn.kappa_eg, dbar, mfn.kappa_mH);
  return kappa_generic(lip.L_grad, kmh, y, ModelFamily::kMN);
}

BoundConstants qs_constants(const LipschitzData& lip, const QSSpec& spec, const SampleSet& y) {
  const double kmh = spec.hess_terms.empty() ? 0.0 : kappa_mH_qs(lip.L_grad, spec);
  return kappa_generic(lip.L_grad, kmh, y, ModelFamily::kQS);
}

double directional_bound_aligned(double L_hess, double delta) {
  require_nonnegative(L_hess, "L_hess");
  require_nonnegative(delta, "delta");
  return L_hess * delta / 3.0;
}

double directional_bound_cross(ModelFamily family, double kappa_ef, double L_hess, double delta, double norm_di,
                               double norm_dj) {
  require_interp_family(family);
  require_nonnegative(kappa_ef, "kappa_ef");
  require_nonnegative(L_hess, "L_hess");
  require(norm_di > 0.0 && norm_dj > 0.0, ErrorKind::kInvalidInput, "direction norms must be positive");
  const double d2 = delta * delta;
  return (4.0 * kappa_ef * d2 + 2.0 * L_hess * d2 * delta / 3.0) / (norm_di * norm_dj);
}

double directional_bound_general(ModelFamily family, double kappa_ef, double L_hess, const Mat& Dhalf,
                                 const Vec& d) {
  require_interp_family(family);
  require(d.size() == Dhalf.rows(), ErrorKind::kInvalidInput, "direction dimension mismatch");
  require(d.norm() > 0.0, ErrorKind::kInvalidInput, "direction must be nonzero");
  require(numerical_rank(Dhalf) == Dhalf.rows(), ErrorKind::kPrecondition,
          "general directional bound needs D with full row rank");
  const double r = spread_ratio(pinv(Dhalf) * d);
  const double pn = pinv_norm_normalized(Dhalf);
  const double p2 = pn * pn;
  return 4.0 * r * kappa_ef * p2 + L_hess / 3.0 * p2 * (2.0 * r + 1.0) * radius(Dhalf);
}

double hess_error_bound_global(ModelFamily family, double kappa_ef, double L_hess, const Mat& Dhalf) {
  require_interp_family(family);
  require(numerical_rank(Dhalf) == Dhalf.rows(), ErrorKind::kPrecondition,
          "global directional bound needs D with full row rank");
  const double p = static_cast<double>(Dhalf.cols());
  const double r = p - 1.0 / p;
  const double pn = pinv_norm_normalized(Dhalf);
  const double p2 = pn * pn;
  return 4.0 * r * kappa_ef * p2 + L_hess / 3.0 * p2 * (2.0 * r + 1.0) * radius(Dhalf);
}

double directional_bound_gsh_cross(double hess_norm, double L_hess, double delta) {
  require_nonnegative(hess_norm, "hess_norm");
  require_nonnegative(L_hess, "L_hess");
  return hess_norm + L_hess * delta / 3.0;
}

double directional_bound_gsh_general(double hess_norm, double L_hess, const Mat& S, const Vec& d) {
  require(d.size() == S.rows(), ErrorKind::kInvalidInput, "direction dimension mismatch");
  require(d.norm() > 0.0, ErrorKind::kInvalidInput, "direction must be nonzero");
  const Vec v = pinv(S) * d;
  require((S * v - d).norm() <= 1e-8 * d.norm(), ErrorKind::kDomain, "direction is not in the column space of S");
  const double r = spread_ratio(v);
  const double pn = pinv_norm_normalized(S);
  const double p2 = pn * pn;
  return r * hess_norm * p2 + L_hess / 3.0 * p2 * (r + 1.0) * radius(S);
}

double gsh_error_bound_global(double hess_norm, double L_hess, const Mat& S) {
  const double p = static_cast<double>(S.cols());
  const double r = p - 1.0 / p;
  const double pn = pinv_norm_normalized(S);
  const double p2 = pn * pn;
  return r * hess_norm * p2 + L_hess / 3.0 * p2 * (r + 1.0) * radius(S);
}

double directional_error(const Mat& H_model, const Mat& hess, const Vec& u, const Vec& w) {
  const Vec uu = u / u.norm();
  const Vec ww = w / w.norm();
  return std::abs(uu.dot((H_model - hess) * ww));
}

Mat distinct_axes(const Mat& D) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < D.cols(); ++j) {
    const Vec dj = D.col(j) / D.col(j).norm();
    bool parallel = false;
    for (Eigen::Index k : keep) {
      const Vec dk = D.col(k) / D.col(k).norm();
      if (std::abs(dj.dot(dk)) >= 1.0 - 1e-12) {
        parallel = true;
        break;
      }
    }
    if (!parallel) keep.push_back(j);
  }
  Mat out(D.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = D.col(keep[k]);
  return out;
}

std::vector<Vec> ball_probes(const Vec& x0, double delta, Eigen::Index n_samples, const Mat& sample_dirs) {
  require(n_samples >= 1, ErrorKind::kInvalidInput, "at least one ball sample is required");
  require(delta > 0.0, ErrorKind::kInvalidInput, "ball radius must be positive");
  const Eigen::Index n = x0.size();
  std::vector<Vec> pts;
  pts.push_back(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e(i) = delta;
    pts.push_back(x0 + e);
    pts.push_back(x0 - e);
  }
  for (Eigen::Index j = 0; j < sample_dirs.cols(); ++j) {
    const Vec d = sample_dirs.col(j);
    pts.push_back(x0 + d);
    pts.push_back(x0 + delta * d / d.norm());
  }
  const std::vector<unsigned> primes = first_primes(n);
  Eigen::Index accepted = 0;
  const std::uint64_t max_draws = 200000000ULL;
  for (std::uint64_t k = 1; accepted < n_samples && k < max_draws; ++k) {
    Vec u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = 2.0 * radical_inverse(k, primes[static_cast<std::size_t>(i)]) - 1.0;
    if (u.squaredNorm() > 1.0) continue;
    pts.push_back(x0 + delta * u);
    ++accepted;
  }
  return pts;
}

ErrorReport measure_errors(const TestFunction& f, const QuadraticModel& m, const SampleSet& y,
                           Eigen::Index n_samples, std::optional<Mat> axes) {
  require(f.dim == y.dim() && m.x0.size() == y.dim(), ErrorKind::kInvalidInput, "measure_errors: dimension mismatch");
  const double delta = radius(y);
  ErrorReport r;
  const std::vector<Vec> probes = ball_probes(y.x0(), delta, n_samples, y.D());
  r.probes = static_cast<Eigen::Index>(probes.size());
  for (const Vec& x : probes) {
    const double fx = f.eval(x);
    r.f_scale = std::max(r.f_scale, std::abs(fx));
    r.err_f = std::max(r.err_f, std::abs(fx - model_eval(m, x)));
    r.err_g = std::max(r.err_g, (f.grad(x) - model_grad(m, x)).norm());
  }
  const Mat ax = axes ? *axes : distinct_axes(y.D());
  const Mat hess = f.hess(y.x0());
  for (Eigen::Index i = 0; i < ax.cols(); ++i) {
    r.aligned.push_back(directional_error(m.H, hess, ax.col(i), ax.col(i)));
    r.aligned_max = std::max(r.aligned_max, r.aligned.back());
  }
  for (Eigen::Index i = 0; i < ax.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < ax.cols(); ++j) {
      const double e = std::max(directional_error(m.H, hess, ax.col(i), ax.col(j)),
                                directional_error(m.H, hess, ax.col(j), ax.col(i)));
      r.cross.push_back({i, j, e});
      r.cross_max = std::max(r.cross_max, e);
    }
  }
  return r;
}

double roundoff_floor(double f_scale, double delta, int order) {
  return 1e3 * std::numeric_limits<double>::epsilon() * std::max(f_scale, 1e-300) / std::pow(delta, order);
}

std::optional<double> loglog_slope(const std::vector<double>& deltas, const std::vector<double>& errs,
                                   const std::vector<double>& floors) {
  require(deltas.size() == errs.size() && floors.size() == errs.size(), ErrorKind::kInvalidInput,
          "loglog_slope: length mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    if (!(errs[i] > floors[i]) || !(deltas[i] > 0.0)) continue;
    lx.push_back(std::log(deltas[i]));
    ly.push_back(std::log(errs[i]));
  }
  if (lx.size() < 2) return std::nullopt;
  const double k = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace dfoq
