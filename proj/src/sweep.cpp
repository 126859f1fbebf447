#include "dfoq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "dfoq/errors.hpp"
#include "dfoq/io.hpp"
#include "dfoq/simplex.hpp"

namespace dfoq {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

long long parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(!s.empty() && used == s.size(), ErrorKind::kInvalidInput, "bad integer '" + s + "' in " + what);
  return v;
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(!s.empty() && used == s.size() && std::isfinite(v), ErrorKind::kInvalidInput,
          "bad number '" + s + "' in " + what);
  return v;
}

// Columns of D that come in +- pairs; empty when D is not of the form [A, -A] up to order.
std::optional<Mat> structured_half(const Mat& D) {
  const Eigen::Index m = D.cols();
  if (m % 2 != 0) return std::nullopt;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  std::vector<Eigen::Index> half;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    bool found = false;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if ((D.col(i) + D.col(j)).norm() <= 1e-12 * D.col(i).norm()) {
        used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = true;
        half.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  Mat out(D.rows(), static_cast<Eigen::Index>(half.size()));
  for (std::size_t k = 0; k < half.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = D.col(half[k]);
  return out;
}

Mat with_negatives(const Mat& half) {
  Mat d(half.rows(), 2 * half.cols());
  d << half, -half;
  return d;
}

// Interpolation judged against the size of the function differences on Y, so
// that a non-interpolating model cannot pass merely because delta is tiny.
bool interpolates_on(const QuadraticModel& m, const Oracle& f, const SampleSet& y) {
  const double f0 = f(y.x0());
  double spread = 0.0;
  double fmax = std::abs(f0);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double fi = f(y.point(i));
    spread = std::max(spread, std::abs(fi - f0));
    fmax = std::max(fmax, std::abs(fi));
  }
  const double violation = interpolation_check(m, f, y).max_violation;
  return violation <= residual_tolerance() * spread + 1e3 * std::numeric_limits<double>::epsilon() * fmax;
}

bool within(double err, std::optional<double> bound, double floor) {
  return !bound || err <= *bound + floor;
}

SlopeCheck make_slope(const std::vector<SweepRow>& rows, int order, bool asserted, double lo, double hi) {
  std::vector<double> d;
  std::vector<double> e;
  std::vector<double> fl;
  for (const SweepRow& r : rows) {
    d.push_back(r.delta);
    e.push_back(order == 0 ? r.err_f : order == 1 ? r.err_g : r.err_dir_aligned_max);
    fl.push_back(roundoff_floor(r.f_scale, r.delta, order));
  }
  SlopeCheck s;
  s.slope = loglog_slope(d, e, fl);
  s.asserted = asserted;
  s.lo = lo;
  s.hi = hi;
  s.pass = !asserted || (s.slope && *s.slope >= lo && *s.slope <= hi);
  return s;
}

nlohmann::json opt_json(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json slope_json(const SlopeCheck& s) {
  nlohmann::json j = {{"slope", opt_json(s.slope)}, {"asserted", s.asserted}, {"pass", s.pass}};
  if (s.asserted) {
    j["range"] = {s.lo, std::isfinite(s.hi) ? nlohmann::json(s.hi) : nlohmann::json(nullptr)};
  }
  return j;
}

}  // namespace

SetSpec parse_set_spec(const std::string& text) {
  require(!text.empty(), ErrorKind::kInvalidInput, "empty --set");
  const std::vector<std::string> parts = split(text, ':');
  SetSpec s;
  if (parts[0] == "structured") {
    require(parts.size() == 2, ErrorKind::kInvalidInput, "expected structured:p");
    s.kind = SetSpec::Kind::kStructured;
    s.p = parse_int(parts[1], "--set");
  } else if (parts[0] == "random") {
    require(parts.size() == 2 || parts.size() == 3, ErrorKind::kInvalidInput, "expected random:p[:seed]");
    s.kind = SetSpec::Kind::kRandom;
    s.p = parse_int(parts[1], "--set");
    if (parts.size() == 3) {
      const long long seed = parse_int(parts[2], "--set");
      require(seed >= 0, ErrorKind::kInvalidInput, "seed must be nonnegative");
      s.seed = static_cast<std::uint64_t>(seed);
    }
  } else {
    s.kind = SetSpec::Kind::kFile;
    s.path = parts[0] == "file" ? text.substr(5) : text;
    require(!s.path.empty(), ErrorKind::kInvalidInput, "empty sample file path");
    return s;
  }
  require(s.p >= 1, ErrorKind::kInvalidInput, "set size p must be positive");
  return s;
}

std::string to_string(const SetSpec& s) {
  switch (s.kind) {
    case SetSpec::Kind::kFile: return "file:" + s.path;
    case SetSpec::Kind::kStructured: return "structured:" + std::to_string(s.p);
    case SetSpec::Kind::kRandom: return "random:" + std::to_string(s.p) + ":" + std::to_string(s.seed);
  }
  return "";
}

ModelSpec parse_model_spec(const std::string& text) {
  ModelSpec m;
  if (text == "mn") {
    m.kind = ModelSpec::Kind::kMN;
  } else if (text == "mfn") {
    m.kind = ModelSpec::Kind::kMFN;
  } else if (text.rfind("qs:", 0) == 0) {
    m.kind = ModelSpec::Kind::kQS;
    m.preset = text.substr(3);
    qs_preset(m.preset, Mat::Identity(1, 1));  // validates the name
  } else {
    fail(ErrorKind::kInvalidInput, "unknown model '" + text + "' (expected mn, mfn or qs:<preset>)");
  }
  return m;
}

std::string to_string(const ModelSpec& m) {
  switch (m.kind) {
    case ModelSpec::Kind::kMN: return "mn";
    case ModelSpec::Kind::kMFN: return "mfn";
    case ModelSpec::Kind::kQS: return "qs:" + m.preset;
  }
  return "";
}

std::vector<double> DeltaGrid::values() const {
  require(std::isfinite(start) && start > 0.0, ErrorKind::kInvalidInput, "delta start must be positive");
  require(factor > 0.0 && factor < 1.0, ErrorKind::kInvalidInput, "delta factor must lie in (0, 1)");
  require(count >= 3, ErrorKind::kInvalidInput, "a sweep needs at least 3 deltas");
  std::vector<double> out;
  double d = start;
  for (int k = 0; k < count; ++k) {
    require(d > 0.0, ErrorKind::kInvalidInput, "delta grid underflows");
    out.push_back(d);
    d *= factor;
  }
  return out;
}

DeltaGrid parse_delta_grid(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  require(parts.size() == 3, ErrorKind::kInvalidInput, "expected --deltas start:factor:count");
  DeltaGrid g{parse_real(parts[0], "--deltas"), parse_real(parts[1], "--deltas"),
              static_cast<int>(parse_int(parts[2], "--deltas"))};
  g.values();
  return g;
}

Mat random_unit_directions(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  require(n >= 1 && p >= 1, ErrorKind::kInvalidInput, "random directions need n, p >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat d(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Vec v(n);
    do {
      for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
    } while (v.norm() < 1e-8);
    d.col(j) = v / v.norm();
  }
  return d;
}

SweepPlan plan_sweep(const SweepConfig& cfg) {
  SweepPlan plan;
  plan.model = cfg.model;
  plan.deltas = cfg.deltas.values();
  require(cfg.samples >= 1, ErrorKind::kInvalidInput, "--samples must be positive");
  plan.samples = cfg.samples;

  std::optional<SampleFile> file;
  if (cfg.set.kind == SetSpec::Kind::kFile) {
    file = read_sample_file(cfg.set.path);
    require(!file->values, ErrorKind::kInvalidInput, "sweeps evaluate the test function; remove \"values\" from the set file");
  }
  Eigen::Index n = cfg.dim;
  if (cfg.x0) {
    require(n == 0 || n == cfg.x0->size(), ErrorKind::kInvalidInput, "--x0 length disagrees with --dim");
    n = cfg.x0->size();
  }
  if (file) {
    require(n == 0 || n == file->set.dim(), ErrorKind::kInvalidInput, "sample file dimension disagrees with --x0/--dim");
    n = file->set.dim();
  }
  if (n == 0) n = cfg.set.p;
  plan.x0 = cfg.x0 ? *cfg.x0 : (file ? file->set.x0() : Vec(Vec::Zero(n)));
  plan.function = find_function(cfg.function, n);

  switch (cfg.set.kind) {
    case SetSpec::Kind::kFile: {
      const std::optional<Mat> half = structured_half(file->set.D());
      plan.structured = half.has_value();
      plan.base = half ? *half : file->set.D();
      break;
    }
    case SetSpec::Kind::kStructured:
      require(cfg.set.p <= n, ErrorKind::kInvalidInput, "structured:p needs p <= n");
      plan.base = Mat::Identity(n, n).leftCols(cfg.set.p);
      plan.structured = true;
      break;
    case SetSpec::Kind::kRandom:
      plan.base = random_unit_directions(n, cfg.set.p, cfg.set.seed != 0 ? cfg.set.seed : cfg.seed);
      plan.structured = true;
      break;
  }
  plan.lip = plan.function.lipschitz(plan.x0, 2.0 * plan.deltas.front());
  return plan;
}

SweepRow sweep_row(const SweepPlan& plan, const TestFunction& f, double delta) {
  const Oracle oracle = f.oracle();
  const Vec& x0 = plan.x0;
  SweepRow row;
  row.delta = delta;

  QuadraticModel model;
  std::optional<SampleSet> y;
  std::optional<BoundConstants> k;
  Mat axes;
  bool gsh_pack = false;

  if (plan.model.kind == ModelSpec::Kind::kQS) {
    const double r1 = radius(qs_preset(plan.model.preset, plan.base).point_union(x0));
    const Mat s = plan.base * (delta / r1);
    const QSSpec spec = qs_preset(plan.model.preset, s);
    y = spec.point_union(x0);
    model = build_qs(oracle, x0, spec);
    row.interpolates = interpolates_on(model, oracle, *y);
    if (row.interpolates) k = qs_constants(plan.lip, spec, *y);
    gsh_pack = plan.structured && (plan.model.preset == "centred" || plan.model.preset == "centered");
    axes = plan.structured ? s : distinct_axes(y->D());
  } else {
    const Mat d = plan.structured ? with_negatives(plan.base) : plan.base;
    const double t = delta / radius(d);
    y = SampleSet(x0, d * t);
    const bool mfn = plan.model.kind == ModelSpec::Kind::kMFN;
    model = mfn ? solve_mfn(oracle, *y).model : solve_mn(oracle, *y).model;
    row.interpolates = interpolation_check(model, oracle, *y).pass;
    axes = plan.structured ? Mat(plan.base * t) : distinct_axes(y->D());
  }
  row.poised = mfn_poised(*y);
  if (plan.model.kind == ModelSpec::Kind::kMFN && row.poised) k = mfn_constants(plan.lip, *y);
  if (plan.model.kind == ModelSpec::Kind::kMN && row.poised) k = mn_constants(plan.lip, *y);

  const ErrorReport rep = measure_errors(f, model, *y, plan.samples, axes);
  const double dy = radius(*y);
  row.f_scale = rep.f_scale;
  row.err_f = rep.err_f;
  row.err_g = rep.err_g;
  row.err_dir_aligned_max = rep.aligned_max;
  row.err_dir_cross_max = rep.cross_max;
  if (k) {
    row.bound_f = k->kappa_ef * dy * dy;
    row.bound_g = k->kappa_eg * dy;
  }

  const double fl2 = roundoff_floor(rep.f_scale, dy, 2);
  bool cross_ok = true;
  const bool interp_family = plan.model.kind != ModelSpec::Kind::kQS;
  if (plan.structured && (interp_family || gsh_pack)) {
    row.bound_dir_aligned = directional_bound_aligned(plan.lip.L_hess, dy);
    if (!rep.cross.empty() && (gsh_pack || k)) {
      double worst_err = -1.0;
      for (const CrossError& c : rep.cross) {
        const double b =
            gsh_pack ? directional_bound_gsh_cross(matrix_norm(f.hess(x0), NormKind::kSpectral), plan.lip.L_hess, dy)
                     : directional_bound_cross(k->family, k->kappa_ef, plan.lip.L_hess, dy, axes.col(c.i).norm(),
                                               axes.col(c.j).norm());
        cross_ok = cross_ok && c.error <= b + fl2;
        if (c.error > worst_err) {
          worst_err = c.error;
          row.bound_dir_cross = b;
        }
      }
    }
  }
  row.bounds_hold = within(row.err_f, row.bound_f, roundoff_floor(rep.f_scale, dy, 0)) &&
                    within(row.err_g, row.bound_g, roundoff_floor(rep.f_scale, dy, 1)) &&
                    within(row.err_dir_aligned_max, row.bound_dir_aligned, fl2) && cross_ok;
  return row;
}

SweepResult run_sweep(const SweepConfig& cfg) { return run_sweep(plan_sweep(cfg), cfg.jobs); }

SweepResult run_sweep(const SweepPlan& plan, int jobs) {
  SweepResult res;
  res.plan = plan;
  const std::size_t count = plan.deltas.size();
  res.rows.resize(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        res.rows[i] = sweep_row(plan, plan.function, plan.deltas[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepSummary& s = res.summary;
  for (const SweepRow& r : res.rows) {
    s.all_bounds_hold = s.all_bounds_hold && r.bounds_hold;
    s.fully_linear_applies = s.fully_linear_applies || r.bound_f.has_value();
    s.directional_applies = s.directional_applies || r.bound_dir_aligned.has_value();
  }
  // Decide which slopes are meaningful by rebuilding the model on the exact
  // second-order Taylor polynomial: when that model already errs, the
  // quadratic part drives the leading error term.
  const double dmin = plan.deltas.back();
  const SweepRow q = sweep_row(plan, taylor_quadratic(plan.function, plan.x0), dmin);
  const double scale = 1.0 + matrix_norm(plan.function.hess(plan.x0), NormKind::kSpectral);
  const bool lead_f = q.err_f > 1e-6 * dmin * dmin * scale;
  const bool lead_g = q.err_g > 1e-6 * dmin * scale;
  // Aligned errors vanish on quadratics; otherwise they must decay at least
  // as fast as the O(delta) bound.
  const bool lead_dir = s.directional_applies && !plan.function.quadratic && q.err_dir_aligned_max <= 1e-6 * scale;
  const double inf = std::numeric_limits<double>::infinity();
  // Decay orders are only claimed for models covered by the fully linear bounds.
  s.f = make_slope(res.rows, 0, lead_f && s.fully_linear_applies, 1.8, 2.2);
  s.g = make_slope(res.rows, 1, lead_g && s.fully_linear_applies, 0.8, 1.2);
  s.aligned = make_slope(res.rows, 2, lead_dir, 0.8, inf);
  // Odd functions about x0 have identically zero aligned errors: nothing to fit.
  if (s.aligned.asserted && !s.aligned.slope) {
    s.aligned.asserted = false;
    s.aligned.pass = true;
  }
  s.pass = s.all_bounds_hold && s.f.pass && s.g.pass && s.aligned.pass;
  return res;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "delta,err_f,bound_f,err_g,bound_g,err_dir_aligned_max,bound_dir_aligned,err_dir_cross_max,bound_dir_cross,"
         "poised\n";
  auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
  for (const SweepRow& row : r.rows) {
    out << format_double(row.delta) << ',' << format_double(row.err_f) << ',' << opt(row.bound_f) << ','
        << format_double(row.err_g) << ',' << opt(row.bound_g) << ',' << format_double(row.err_dir_aligned_max)
        << ',' << opt(row.bound_dir_aligned) << ',' << format_double(row.err_dir_cross_max) << ','
        << opt(row.bound_dir_cross) << ',' << (row.poised ? "true" : "false") << '\n';
  }
  return out.str();
}

nlohmann::json sweep_json(const SweepResult& r, const SweepConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : r.rows) {
    rows.push_back({{"delta", row.delta},
                    {"err_f", row.err_f},
                    {"bound_f", opt_json(row.bound_f)},
                    {"err_g", row.err_g},
                    {"bound_g", opt_json(row.bound_g)},
                    {"err_dir_aligned_max", row.err_dir_aligned_max},
                    {"bound_dir_aligned", opt_json(row.bound_dir_aligned)},
                    {"err_dir_cross_max", row.err_dir_cross_max},
                    {"bound_dir_cross", opt_json(row.bound_dir_cross)},
                    {"poised", row.poised},
                    {"interpolates", row.interpolates},
                    {"bounds_hold", row.bounds_hold}});
  }
  const SweepSummary& s = r.summary;
  const LipschitzData& lip = r.plan.lip;
  return {{"config",
           {{"function", r.plan.function.name},
            {"x0", to_json(r.plan.x0)},
            {"set", to_string(cfg.set)},
            {"model", to_string(cfg.model)},
            {"deltas", {{"start", cfg.deltas.start}, {"factor", cfg.deltas.factor}, {"count", cfg.deltas.count}}},
            {"samples", cfg.samples},
            {"seed", cfg.seed},
            {"structured", r.plan.structured},
            {"base_directions", to_json(r.plan.base)}}},
          {"lipschitz",
           {{"L_grad", lip.L_grad}, {"L_hess", lip.L_hess}, {"kappa_g", lip.kappa_g}, {"region_radius", lip.region_radius}}},
          {"rows", rows},
          {"summary",
           {{"slope_err_f", slope_json(s.f)},
            {"slope_err_g", slope_json(s.g)},
            {"slope_err_dir_aligned", slope_json(s.aligned)},
            {"fully_linear_applies", s.fully_linear_applies},
            {"directional_applies", s.directional_applies},
            {"all_bounds_hold", s.all_bounds_hold},
            {"pass", s.pass}}}};
}

TestFunction taylor_quadratic(const TestFunction& f, const Vec& x0) {
  const double c = f.eval(x0);
  const Vec g = f.grad(x0);
  const Mat h = f.hess(x0);
  TestFunction q;
  q.name = f.name + "-taylor2";
  q.dim = f.dim;
  q.quadratic = true;
  q.eval = [=](const Vec& x) {
    const Vec d = x - x0;
    return c + g.dot(d) + 0.5 * d.dot(h * d);
  };
  q.grad = [=](const Vec& x) { return Vec(g + h * (x - x0)); };
  q.hess = [=](const Vec&) { return h; };
  q.lipschitz = f.lipschitz;
  return q;
}

}  // namespace dfoq

namespace dfoq {

GeneralDirectionCheck check_general_directions(const SweepPlan& plan, double delta, int count, std::uint64_t seed) {
  GeneralDirectionCheck out;
  if (!plan.structured) return out;
  const TestFunction& f = plan.function;
  const Oracle oracle = f.oracle();
  const Vec& x0 = plan.x0;
  const Eigen::Index n = x0.size();
  const Mat hess = f.hess(x0);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  if (plan.model.kind == ModelSpec::Kind::kQS) {
    if (plan.model.preset != "centred" && plan.model.preset != "centered") return out;
    const Mat s = plan.base * (delta / radius(plan.base));
    const Mat h = gsh(oracle, x0, as_gsh_pack(StructuredSet(x0, s)));
    const double hn = matrix_norm(hess, NormKind::kSpectral);
    const double floor = roundoff_floor(std::abs(f.eval(x0)) + 1.0, delta, 2);
    out.applies = true;
    for (int k = 0; k < count; ++k) {
      Vec w(s.cols());
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(gen);
      const Vec d = s * w;
      const double b = directional_bound_gsh_general(hn, plan.lip.L_hess, s, d);
      const double e = directional_error(h, hess, d, d);
      ++out.directions;
      if (e > b + floor) ++out.violations;
      out.worst_ratio = std::max(out.worst_ratio, b > 0.0 ? e / b : (e > floor ? INFINITY : 0.0));
    }
    return out;
  }
  if (numerical_rank(plan.base) < n) return out;
  const Mat half = plan.base * (delta / radius(plan.base));
  const SampleSet y(x0, with_negatives(half));
  if (!mfn_poised(y)) return out;
  const bool mfn = plan.model.kind == ModelSpec::Kind::kMFN;
  const QuadraticModel m = mfn ? solve_mfn(oracle, y).model : solve_mn(oracle, y).model;
  const BoundConstants k = mfn ? mfn_constants(plan.lip, y) : mn_constants(plan.lip, y);
  const double floor = roundoff_floor(std::abs(f.eval(x0)) + 1.0, delta, 2);
  out.applies = true;
  for (int i = 0; i < count; ++i) {
    Vec d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = normal(gen);
    const double b = directional_bound_general(k.family, k.kappa_ef, plan.lip.L_hess, half, d);
    const double e = directional_error(m.H, hess, d, d);
    ++out.directions;
    if (e > b + floor) ++out.violations;
    out.worst_ratio = std::max(out.worst_ratio, b > 0.0 ? e / b : (e > floor ? INFINITY : 0.0));
  }
  return out;
}

}  // namespace dfoq
