#include "dfoq/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <sstream>

#include "dfoq/bounds.hpp"
#include "dfoq/errors.hpp"
#include "dfoq/models.hpp"
#include "dfoq/relationships.hpp"
#include "dfoq/simplex.hpp"
#include "dfoq/sweep.hpp"
#include "dfoq/testbed.hpp"

namespace dfoq {
namespace {

Check make_check(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

Mat cols(std::initializer_list<std::initializer_list<double>> columns) {
  const Eigen::Index p = static_cast<Eigen::Index>(columns.size());
  const Eigen::Index n = static_cast<Eigen::Index>(columns.begin()->size());
  Mat m(n, p);
  Eigen::Index j = 0;
  for (const auto& c : columns) {
    Eigen::Index i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

double vec_gap(const Vec& a, const Vec& b) { return relative_gap(Mat(a), Mat(b)); }

int uniform_int(std::mt19937_64& gen, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(gen);
}

std::string count_text(int used, int skipped) {
  std::ostringstream s;
  s << used << " instances";
  if (skipped > 0) s << ", " << skipped << " skipped (solver infeasible)";
  return s.str();
}

std::string format_slope(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

double relative_gap(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::kInvalidInput, "relative_gap: shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}

Mat random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(gen);
  }
  return m;
}

Mat random_orthogonal(std::mt19937_64& gen, Eigen::Index n) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(gen, n, n));
  return qr.householderQ() * Mat::Identity(n, n);
}

Mat random_permutation(std::mt19937_64& gen, Eigen::Index n) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), gen);
  Mat p = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, idx[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

Mat random_invertible(std::mt19937_64& gen, Eigen::Index p) {
  return Mat::Identity(p, p) + 0.4 * random_matrix(gen, p, p) / std::sqrt(static_cast<double>(p));
}

Oracle random_quadratic(std::mt19937_64& gen, Eigen::Index n) {
  const Mat r = random_matrix(gen, n, n);
  const Mat a = r + r.transpose();
  const Vec b = random_matrix(gen, n, 1);
  const double c = random_matrix(gen, 1, 1)(0, 0);
  return Oracle([a, b, c](const Vec& x) { return c + b.dot(x) + 0.5 * x.dot(a * x); });
}

Oracle random_smooth(std::mt19937_64& gen, Eigen::Index n) {
  const Mat w = random_matrix(gen, n, 3);
  const Vec phase = random_matrix(gen, 3, 1);
  const Vec amp = random_matrix(gen, 3, 1);
  const Vec u = 0.5 * random_matrix(gen, n, 1);
  const Mat r = random_matrix(gen, n, n);
  const Mat a = 0.25 * (r + r.transpose());
  return Oracle([w, phase, amp, u, a](const Vec& x) {
    double s = 0.1 * std::exp(u.dot(x)) + 0.5 * x.dot(a * x);
    for (Eigen::Index k = 0; k < w.cols(); ++k) s += amp(k) * std::sin(w.col(k).dot(x) + phase(k));
    return s;
  });
}

std::vector<Check> verify_examples() {
  std::vector<Check> out;
  const auto sphere = [](const Vec& x) { return x.squaredNorm(); };

  {
    const Oracle f(sphere);
    const SampleSet y(Vec::Zero(2), cols({{1, 0}, {0, 1}, {2, 0}, {1, 1}}));
    const QuadraticModel mn = solve_mn(f, y).model;
    const QuadraticModel mfn = solve_mfn(f, y).model;
    Vec g_mn(2), g_mfn(2);
    g_mn << 0.0, 0.8;
    g_mfn << 0.0, 1.0;
    Mat h_mn = Mat::Zero(2, 2), h_mfn = Mat::Zero(2, 2);
    h_mn.diagonal() << 2.0, 0.4;
    h_mfn(0, 0) = 2.0;
    const double e = std::max({(mn.g - g_mn).cwiseAbs().maxCoeff(), (mn.H - h_mn).cwiseAbs().maxCoeff(),
                               (mfn.g - g_mfn).cwiseAbs().maxCoeff(), (mfn.H - h_mfn).cwiseAbs().maxCoeff()});
    out.push_back(make_check("example: MN (0,4/5),diag(2,2/5) and MFN (0,1),diag(2,0) on {0,e1,e2,2e1,e1+e2}", e,
                             1e-10));
  }
  {
    const Oracle f(sphere);
    const SampleSet y(Vec::Zero(3), cols({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}}));
    const ModelSolution mn = solve_mn(f, y);
    const ModelSolution mfn = solve_mfn(f, y);
    Mat h = Mat::Zero(3, 3);
    h.diagonal() << 2.0, 2.0, 0.0;
    Vec deltas(4);
    for (Eigen::Index i = 0; i < 4; ++i) deltas(i) = f(y.point(i)) - f(y.x0());
    const PoisednessReport rep = poisedness(y, deltas);
    const double e = std::max({mn.model.g.cwiseAbs().maxCoeff(), (mn.model.H - h).cwiseAbs().maxCoeff(),
                               (mfn.model.H - h).cwiseAbs().maxCoeff(), mfn.model.g.cwiseAbs().maxCoeff()});
    const bool flags = !mfn.diagnostics.alpha_unique && rep.mn_feasible && !rep.mfn_poised;
    out.push_back({"example: {0,+-e1,+-e2} in R^3 is MN-poised but not MFN-poised", flags && e <= 1e-10, e, 1e-10,
                   flags ? "" : "poisedness flags wrong"});
  }
  {
    const Oracle f([](const Vec& x) { return x.sum() * x.sum(); });
    const Mat h = gsh(f, Vec::Zero(2), Mat::Identity(2, 2), cols({{1, 0}}));
    Mat want(2, 2);
    want << 2, 0, 2, 0;
    out.push_back(make_check("example: asymmetric GSH [[2,0],[2,0]] for (1'x)^2", (h - want).cwiseAbs().maxCoeff(),
                             1e-12));
  }
  {
    const Oracle f(sphere);
    const Mat s = Mat::Identity(3, 3).leftCols(2);
    const QuadraticModel qs = build_qs(f, Vec::Zero(3), qs_centred(s));
    const SampleSet y = qs_centred(s).point_union(Vec::Zero(3));
    const QuadraticModel mn = solve_mn(f, y).model;
    const double same = std::max(relative_gap(qs.H, mn.H), vec_gap(qs.g, mn.g));
    QSSpec forward = qs_centred(s);
    forward.grad_terms = {{1.0, Vec::Zero(3), s.leftCols(1), 1.0}};
    const QuadraticModel qf = build_qs(f, Vec::Zero(3), forward);
    const bool differs = std::abs(qf.g(0) - 1.0) <= 1e-12 && qf.g.tail(2).cwiseAbs().maxCoeff() <= 1e-12;
    out.push_back({"example: centred QS coincides with MN; forward-GSG variant gives g=e1", same <= 1e-10 && differs,
                   same, 1e-10, differs ? "" : "forward-GSG gradient is not e1"});
  }
  return out;
}

std::vector<Check> verify_relationships(int instances, std::uint64_t seed) {
  std::vector<Check> out;
  std::mt19937_64 gen(seed);

  {  // equal column spaces
    double mn_gap = 0.0, mfn_gap = 0.0, mfn_h_gap = 0.0;
    int skipped = 0, trusted = 0;
    for (int k = 0; k < instances; ++k) {
      const Eigen::Index n = uniform_int(gen, 2, 4);
      const Eigen::Index p = uniform_int(gen, 1, static_cast<int>(n));
      const Vec x0 = 0.5 * random_matrix(gen, n, 1);
      const Mat s = 0.5 * random_matrix(gen, n, p);
      const bool quad = k % 2 == 0;
      const Mat t = quad ? Mat(s * random_invertible(gen, p)) : Mat(s * random_permutation(gen, p));
      const Oracle f = quad ? random_quadratic(gen, n) : random_smooth(gen, n);
      const SampleSet y = gsh_point_union(x0, s, t);
      const QuadraticModel closed = mn_from_gsh_equal_colspace(f, x0, s, t);
      try {
        const QuadraticModel mn = solve_mn(f, y).model;
        mn_gap = std::max({mn_gap, vec_gap(closed.g, mn.g), relative_gap(closed.H, mn.H)});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kInfeasible) throw;
        ++skipped;
        continue;
      }
      const TrustedModel tm = mfn_from_gsh_equal_colspace(f, x0, s, t);
      const QuadraticModel mfn = solve_mfn(f, y).model;
      mfn_h_gap = std::max(mfn_h_gap, relative_gap(tm.model.H, mfn.H));
      if (tm.alpha_trusted) {
        ++trusted;
        mfn_gap = std::max(mfn_gap, vec_gap(tm.model.g, mfn.g));
      }
    }
    out.push_back(make_check("relationships: equal column spaces, closed form = MN", mn_gap, 1e-9,
                             count_text(instances - skipped, skipped)));
    out.push_back(make_check("relationships: equal column spaces, closed-form H = MFN H", mfn_h_gap, 1e-9));
    out.push_back(make_check("relationships: equal column spaces, closed-form alpha = MFN alpha when poised", mfn_gap,
                             1e-9, std::to_string(trusted) + " poised instances"));
  }
  {  // T = U_S^ell
    double mn_gap = 0.0, mfn_gap = 0.0, adapted_gap = 0.0;
    int skipped = 0, poised = 0;
    for (int k = 0; k < instances; ++k) {
      const Eigen::Index n = uniform_int(gen, 1, 4);
      const Eigen::Index p = uniform_int(gen, 1, static_cast<int>(n));
      const Eigen::Index ell = uniform_int(gen, 0, static_cast<int>(p));
      const Vec x0 = 0.5 * random_matrix(gen, n, 1);
      const Mat s = 0.5 * random_matrix(gen, n, p);
      const Oracle f = random_smooth(gen, n);
      const Mat u = build_U_S_ell(s, ell);
      const SampleSet y = gsh_point_union(x0, s, u);
      const QuadraticModel closed = mn_special_T(f, x0, s, ell);
      if (ell == 0) {
        adapted_gap = std::max(adapted_gap, vec_gap(closed.g, Vec(2.0 * gsg(f, x0, s) - gsg(f, x0, 2.0 * s))));
      }
      try {
        const QuadraticModel mn = solve_mn(f, y).model;
        mn_gap = std::max({mn_gap, vec_gap(closed.g, mn.g), relative_gap(closed.H, mn.H)});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kInfeasible) throw;
        ++skipped;
        continue;
      }
      if (mfn_poised(y)) {
        ++poised;
        const QuadraticModel mfn = solve_mfn(f, y).model;
        mfn_gap = std::max({mfn_gap, vec_gap(closed.g, mfn.g), relative_gap(closed.H, mfn.H)});
      }
    }
    out.push_back(make_check("relationships: T = U_S^ell closed form = MN", mn_gap, 1e-9,
                             count_text(instances - skipped, skipped)));
    out.push_back(make_check("relationships: T = U_S^ell closed form = MFN when poised", mfn_gap, 1e-9,
                             std::to_string(poised) + " poised instances"));
    out.push_back(make_check("relationships: ell = 0 gradient is 2 gsg(S) - gsg(2S)", adapted_gap, 1e-12));
  }
  {  // coordinate-centred
    double mn_gap = 0.0, mfn_gap = 0.0;
    int poised = 0;
    for (int k = 0; k < instances; ++k) {
      const Eigen::Index n = uniform_int(gen, 1, 4);
      const Eigen::Index p = uniform_int(gen, 1, static_cast<int>(n));
      const double h = std::uniform_real_distribution<double>(0.05, 0.5)(gen);
      const Vec x0 = 0.5 * random_matrix(gen, n, 1);
      const Oracle f = random_smooth(gen, n);
      const QuadraticModel closed = mn_coordinate_centered(f, x0, p, h);
      const Mat half = h * Mat::Identity(n, n).leftCols(p);
      const SampleSet y = expand(StructuredSet(x0, half));
      const QuadraticModel mn = solve_mn(f, y).model;
      mn_gap = std::max({mn_gap, vec_gap(closed.g, mn.g), relative_gap(closed.H, mn.H)});
      if (mfn_poised(y)) {
        ++poised;
        const QuadraticModel mfn = solve_mfn(f, y).model;
        mfn_gap = std::max({mfn_gap, vec_gap(closed.g, mfn.g), relative_gap(closed.H, mfn.H)});
      }
    }
    out.push_back(make_check("relationships: coordinate-centred closed form = MN", mn_gap, 1e-9));
    out.push_back(make_check("relationships: coordinate-centred closed form = MFN when poised", mfn_gap, 1e-9,
                             std::to_string(poised) + " poised instances"));
  }
  {  // symmetric bilinear problem
    double gap = 0.0, sym = 0.0, family = 0.0;
    for (int k = 0; k < instances; ++k) {
      const Eigen::Index n = uniform_int(gen, 1, 4);
      const Eigen::Index p = uniform_int(gen, 1, static_cast<int>(n));
      const Vec x0 = 0.5 * random_matrix(gen, n, 1);
      const Mat s = 0.5 * random_matrix(gen, n, p);
      const bool quad = k % 2 == 0;
      const Mat t = quad ? Mat(s * random_invertible(gen, p))
                         : build_U_S_ell(s, uniform_int(gen, 0, static_cast<int>(p)));
      const Oracle f = quad ? random_quadratic(gen, n) : random_smooth(gen, n);
      const Mat g = gsh(f, x0, s, t);
      const BilinearSolution sol = solve_bilinear_min_frobenius({s, t, delta_delta_f(f, x0, s, t), true});
      gap = std::max(gap, relative_gap(sol.H, g));
      sym = std::max(sym, (sol.H - sol.H.transpose()).norm());
      family = std::max(family, affine_family_residual(sol.H, g, s, t));
    }
    out.push_back(make_check("relationships: symmetric bilinear solution = GSH when col(T) = col(S)", gap, 1e-9));
    out.push_back(make_check("relationships: symmetric bilinear solution is exactly symmetric", sym, 0.0));
    out.push_back(make_check("relationships: symmetric solution lies in the GSH affine family", family, 1e-9));
  }
  {  // orthogonal and permutation transforms
    double conj = 0.0, sym_after = 0.0;
    int feas_mismatch = 0, feasible = 0;
    for (int k = 0; k < instances; ++k) {
      const Eigen::Index n = uniform_int(gen, 1, 4);
      const Eigen::Index p = uniform_int(gen, 1, static_cast<int>(n));
      const Vec x0 = 0.5 * random_matrix(gen, n, 1);
      const Mat s = 0.5 * random_matrix(gen, n, p);
      const bool shifted = k % 2 == 0;
      const Mat t = shifted ? build_U_S_ell(s, uniform_int(gen, 0, static_cast<int>(p)))
                            : Mat(0.5 * random_matrix(gen, n, uniform_int(gen, 1, static_cast<int>(n))));
      const Oracle f = random_smooth(gen, n);
      const Mat nmat = random_orthogonal(gen, n);
      const TransformedInstance ti =
          transform_instance(s, t, nmat, random_permutation(gen, p), random_permutation(gen, t.cols()), f, x0);
      const Mat g = gsh(f, x0, s, t);
      const Mat gt = gsh(ti.f, x0, ti.S, ti.T);
      conj = std::max(conj, relative_gap(gt, nmat * g * nmat.transpose()));
      if ((g - g.transpose()).norm() <= 1e-9) sym_after = std::max(sym_after, (gt - gt.transpose()).norm());
      auto feasible_of = [&](const Mat& a, const Mat& b, const Oracle& fn) {
        try {
          solve_bilinear_min_frobenius({a, b, delta_delta_f(fn, x0, a, b), true});
          return true;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kInfeasible) throw;
          return false;
        }
      };
      const bool before = feasible_of(s, t, f);
      const bool after = feasible_of(ti.S, ti.T, ti.f);
      feasible += before ? 1 : 0;
      feas_mismatch += before != after ? 1 : 0;
    }
    out.push_back(make_check("relationships: transformed GSH = N GSH N'", conj, 1e-9));
    out.push_back(make_check("relationships: transform preserves GSH symmetry", sym_after, 1e-9));
    out.push_back({"relationships: transform preserves symmetric-problem feasibility", feas_mismatch == 0,
                   static_cast<double>(feas_mismatch), 0.0,
                   std::to_string(feasible) + " feasible of " + std::to_string(instances)});
  }
  {  // transpose identity
    double gap = 0.0;
    for (int k = 0; k < instances; ++k) {
      const Eigen::Index n = uniform_int(gen, 1, 5);
      const Vec x0 = 0.5 * random_matrix(gen, n, 1);
      const Mat s = 0.5 * random_matrix(gen, n, uniform_int(gen, 1, 5));
      const Mat t = 0.5 * random_matrix(gen, n, uniform_int(gen, 1, 5));
      const Oracle f = random_smooth(gen, n);
      gap = std::max(gap, relative_gap(Mat(gsh(f, x0, s, t).transpose()), gsh(f, x0, t, s)));
    }
    out.push_back(make_check("relationships: GSH transpose identity gsh(S;T)' = gsh(T;S)", gap, 1e-10));
  }
  return out;
}

std::vector<Check> verify_bounds(int grid_points, double delta0, Eigen::Index samples) {
  std::vector<Check> out;
  const std::vector<std::string> models = {"mn", "mfn", "qs:centred", "qs:adapted-0", "qs:adapted-1", "qs:forward"};
  for (Eigen::Index n : {2, 3}) {
    for (const TestFunction& tf : registry(n)) {
      for (const std::string& set : {"structured:" + std::to_string(n), "random:" + std::to_string(n) + ":17"}) {
        for (const std::string& model : models) {
          SweepConfig cfg;
          cfg.function = tf.name;
          cfg.x0 = generic_point(n);
          cfg.set = parse_set_spec(set);
          cfg.model = parse_model_spec(model);
          cfg.deltas = {delta0, 0.5, grid_points};
          cfg.samples = samples;
          const SweepResult r = run_sweep(cfg);
          const SweepSummary& s = r.summary;
          std::ostringstream detail;
          detail << "slopes f=" << (s.f.slope ? format_slope(*s.f.slope) : "n/a")
                 << (s.f.asserted ? "*" : "") << " g=" << (s.g.slope ? format_slope(*s.g.slope) : "n/a")
                 << (s.g.asserted ? "*" : "");
          if (!s.fully_linear_applies) detail << "; no fully linear bound (model does not interpolate or set not poised)";
          const std::string name = "bounds: " + tf.name + " n=" + std::to_string(n) + " " + set + " " + model;
          out.push_back({name, s.pass, s.pass ? 0.0 : 1.0, 0.0, detail.str()});

          GeneralDirectionCheck worst;
          for (std::size_t i = 0; i < r.plan.deltas.size(); ++i) {
            const GeneralDirectionCheck c = check_general_directions(r.plan, r.plan.deltas[i], 100, 1000 + i);
            if (!c.applies) break;
            worst.applies = true;
            worst.directions += c.directions;
            worst.violations += c.violations;
            worst.worst_ratio = std::max(worst.worst_ratio, c.worst_ratio);
          }
          if (worst.applies) {
            out.push_back({name + " general directions", worst.violations == 0, worst.worst_ratio, 1.0,
                           std::to_string(worst.directions) + " directions, " + std::to_string(worst.violations) +
                               " violations"});
          }
        }
      }
    }
  }
  {
    const Oracle f([](const Vec& x) { return x.squaredNorm(); });
    const SampleSet y = expand(StructuredSet(Vec::Zero(3), Mat::Identity(3, 3).leftCols(2)));
    const QuadraticModel mn = solve_mn(f, y).model;
    Vec e3 = Vec::Zero(3);
    e3(2) = 1.0;
    const double err = directional_error(mn.H, 2.0 * Mat::Identity(3, 3), e3, e3);
    out.push_back(make_check("bounds: off-subspace directional error is 2 on the R^3 sphere fixture",
                             std::abs(err - 2.0), 1e-12));
  }
  return out;
}

std::vector<Check> run_verify_suite(const std::string& suite) {
  std::vector<Check> out;
  const bool all = suite == "all";
  require(all || suite == "examples" || suite == "relationships" || suite == "bounds", ErrorKind::kInvalidInput,
          "unknown suite '" + suite + "' (expected examples, relationships, bounds or all)");
  auto append = [&out](std::vector<Check> c) { out.insert(out.end(), c.begin(), c.end()); };
  if (all || suite == "examples") append(verify_examples());
  if (all || suite == "relationships") append(verify_relationships());
  if (all || suite == "bounds") append(verify_bounds());
  return out;
}

}  // namespace dfoq
