// Acceptance checks. With no arguments every criterion runs and prints one
// PASS/FAIL line; `acceptance K` runs criterion K alone. Indented lines below
// a criterion carry its measurements. Exit status is 0 only if all pass.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dfoq/bounds.hpp"
#include "dfoq/models.hpp"
#include "dfoq/simplex.hpp"
#include "dfoq/sweep.hpp"
#include "dfoq/verify.hpp"
#include "qp_oracle.hpp"

namespace {

using dfoq::Mat;
using dfoq::Vec;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void sub(bool ok, const std::string& text) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + text);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

dfoq::Oracle sphere_oracle() {
  return dfoq::Oracle([](const Vec& x) { return x.squaredNorm(); });
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const dfoq::SampleSet y(Vec::Zero(2), (Mat(2, 4) << 1, 0, 2, 1, 0, 1, 0, 1).finished());
  const auto mn = dfoq::solve_mn(sphere_oracle(), y).model;
  const auto mfn = dfoq::solve_mfn(sphere_oracle(), y).model;
  const double e_mn = std::max(max_abs(mn.g - (Vec(2) << 0, 0.8).finished()), max_abs(mn.H - diag({2, 0.4})));
  const double e_mfn = std::max(max_abs(mfn.g - (Vec(2) << 0, 1).finished()), max_abs(mfn.H - diag({2, 0})));
  const double secs = seconds_since(t0);
  o.sub(e_mn <= 1e-10, "MN alpha=(0,4/5), H=diag(2,2/5): max error " + fmt(e_mn));
  o.sub(e_mfn <= 1e-10, "MFN alpha=(0,1), H=diag(2,0): max error " + fmt(e_mfn));
  o.sub(secs < 1.0, "runtime " + fmt(secs) + " s");
  o.summary = "five-point R^2 example, MN and MFN exact values";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const dfoq::SampleSet y(Vec::Zero(3), (Mat(3, 4) << 1, 0, -1, 0, 0, 1, 0, -1, 0, 0, 0, 0).finished());
  const auto mn = dfoq::solve_mn(sphere_oracle(), y).model;
  const auto mfn = dfoq::solve_mfn(sphere_oracle(), y);
  Vec deltas(4);
  for (Eigen::Index i = 0; i < 4; ++i) deltas(i) = y.point(i).squaredNorm();
  const auto report = dfoq::poisedness(y, deltas);
  const double e_mn = std::max(max_abs(mn.g), max_abs(mn.H - diag({2, 2, 0})));
  const double e_mfn = max_abs(mfn.model.H - diag({2, 2, 0}));
  o.sub(e_mn <= 1e-10, "MN (0, diag(2,2,0)): max error " + fmt(e_mn));
  o.sub(e_mfn <= 1e-10, "MFN H=diag(2,2,0): max error " + fmt(e_mfn));
  o.sub(!mfn.diagnostics.alpha_unique, "MFN alpha_unique=false");
  o.sub(report.mn_feasible && !report.mfn_poised, "poisedness: mn_feasible and not mfn_poised");
  o.summary = "R^3 plus-minus set: MN-feasible, not MFN-poised";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const dfoq::Oracle f([](const Vec& x) { return x.sum() * x.sum(); });
  const Mat h = dfoq::gsh(f, Vec::Zero(2), Mat::Identity(2, 2), (Mat(2, 1) << 1, 0).finished());
  const double err = max_abs(h - (Mat(2, 2) << 2, 0, 2, 0).finished());
  o.sub(err <= 1e-12, "gsh((1'x)^2; [e1 e2]; [e1]) = [[2,0],[2,0]]: max error " + fmt(err));
  o.summary = "asymmetric generalized simplex Hessian";
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(20240611);
  double worst = 0.0;
  int bad = 0;
  auto rel = [](const Mat& a, const Mat& b) { return (a - b).norm() / (1.0 + b.norm()); };
  for (int k = 0; k < 100; ++k) {
    const testing::RandomInstance inst = testing::random_poised_instance(gen);
    const auto mn = dfoq::solve_mn(inst.set, 0.0, inst.deltas).model;
    const auto mfn = dfoq::solve_mfn(inst.set, 0.0, inst.deltas).model;
    const auto [a1, h1] = testing::qp_oracle(inst.set, inst.deltas, false);
    const auto [a2, h2] = testing::qp_oracle(inst.set, inst.deltas, true);
    const double e = std::max({rel(mn.g, a1), rel(mn.H, h1), rel(mfn.g, a2), rel(mfn.H, h2)});
    worst = std::max(worst, e);
    bad += e > 1e-8 ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  o.sub(bad == 0, "100 random poised instances, worst relative gap " + fmt(worst) + ", " + std::to_string(bad) +
                      " above 1e-8");
  o.sub(secs < 30.0, "runtime " + fmt(secs) + " s");
  o.summary = "MN/MFN agree with the weighted null-space QP oracle";
  return o;
}

dfoq::SweepResult sweep(const std::string& fn, Eigen::Index n, const std::string& set, const std::string& model,
                        double delta0 = 0.5) {
  dfoq::SweepConfig cfg;
  cfg.function = fn;
  cfg.x0 = dfoq::generic_point(n);
  cfg.set = dfoq::parse_set_spec(set);
  cfg.model = dfoq::parse_model_spec(model);
  cfg.deltas = {delta0, 0.5, 13};
  cfg.samples = 512;
  return dfoq::run_sweep(cfg);
}

std::vector<std::string> set_names(Eigen::Index n) {
  return {"structured:" + std::to_string(n), "random:" + std::to_string(n) + ":17"};
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int sweeps = 0;
  int rows_checked = 0;
  int violations = 0;
  int slopes_asserted = 0;
  int slope_failures = 0;
  std::vector<std::string> failures;
  for (Eigen::Index n : {1, 2, 3}) {
    for (const dfoq::TestFunction& tf : dfoq::registry(n)) {
      for (const std::string& set : set_names(n)) {
        for (const char* model : {"mn", "mfn", "qs:centred", "qs:adapted-0", "qs:adapted-1"}) {
          const dfoq::SweepResult r = sweep(tf.name, n, set, model);
          ++sweeps;
          const std::string tag = tf.name + " n=" + std::to_string(n) + " " + set + " " + model;
          for (const dfoq::SweepRow& row : r.rows) {
            if (!row.bound_f || !row.bound_g) {
              // MFN only has bounds on poised sets; QS only when it interpolates.
              if (std::string(model) != "mfn") {
                ++violations;
                failures.push_back(tag + ": no fully linear bound at delta " + fmt(row.delta));
              }
              continue;
            }
            ++rows_checked;
            const double rad = row.delta;
            const bool ok_f = row.err_f <= *row.bound_f + dfoq::roundoff_floor(row.f_scale, rad, 0);
            const bool ok_g = row.err_g <= *row.bound_g + dfoq::roundoff_floor(row.f_scale, rad, 1);
            if (!ok_f || !ok_g) {
              ++violations;
              failures.push_back(tag + ": bound violated at delta " + fmt(row.delta));
            }
          }
          for (const dfoq::SlopeCheck* s : {&r.summary.f, &r.summary.g}) {
            if (!s->asserted) continue;
            ++slopes_asserted;
            if (!s->pass) {
              ++slope_failures;
              failures.push_back(tag + ": slope " + (s->slope ? fmt(*s->slope) : "n/a") + " outside [" + fmt(s->lo) +
                                 "," + fmt(s->hi) + "]");
            }
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  o.sub(violations == 0, std::to_string(sweeps) + " sweeps, " + std::to_string(rows_checked) + " rows with bounds, " +
                             std::to_string(violations) + " violations");
  o.sub(slope_failures == 0, std::to_string(slopes_asserted) + " slope assertions, " +
                                 std::to_string(slope_failures) + " outside range");
  for (const std::string& f : failures) o.details.push_back("     " + f);
  o.sub(secs < 120.0, "runtime " + fmt(secs) + " s");
  o.summary = "fully linear bounds on a 13-point grid for MN, MFN and interpolating QS";
  return o;
}

Outcome criterion6() {
  Outcome o;
  int aligned_rows = 0;
  int aligned_bad = 0;
  int cross_rows = 0;
  int cross_bad = 0;
  int directions = 0;
  int general_bad = 0;
  for (Eigen::Index n : {1, 2, 3}) {
    for (const dfoq::TestFunction& tf : dfoq::registry(n)) {
      for (const std::string& set : set_names(n)) {
        for (const char* model : {"mn", "mfn", "qs:centred"}) {
          const dfoq::SweepResult r = sweep(tf.name, n, set, model);
          for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const dfoq::SweepRow& row = r.rows[i];
            const double floor = dfoq::roundoff_floor(row.f_scale, row.delta, 2);
            if (row.bound_dir_aligned) {
              ++aligned_rows;
              aligned_bad += row.err_dir_aligned_max <= *row.bound_dir_aligned + floor ? 0 : 1;
            }
            if (row.bound_dir_cross) {
              ++cross_rows;
              cross_bad += row.err_dir_cross_max <= *row.bound_dir_cross + floor ? 0 : 1;
            }
            const dfoq::GeneralDirectionCheck g = dfoq::check_general_directions(r.plan, row.delta, 100, 1000 + i);
            if (g.applies) {
              directions += g.directions;
              general_bad += g.violations;
            }
          }
        }
      }
    }
  }
  o.sub(aligned_bad == 0 && aligned_rows > 0, "aligned bound L*delta/3: " + std::to_string(aligned_rows) + " rows, " +
                                                  std::to_string(aligned_bad) + " violations");
  o.sub(cross_bad == 0 && cross_rows > 0,
        "cross bounds: " + std::to_string(cross_rows) + " rows, " + std::to_string(cross_bad) + " violations");
  o.sub(general_bad == 0 && directions > 0, "general-direction bounds: " + std::to_string(directions) +
                                                " random directions, " + std::to_string(general_bad) + " violations");

  for (Eigen::Index n : {1, 2}) {
    dfoq::SweepConfig cfg;
    cfg.function = "quartic";
    cfg.x0 = dfoq::generic_point(n);
    cfg.set = dfoq::parse_set_spec("structured:" + std::to_string(n));
    cfg.model = dfoq::parse_model_spec("mn");
    cfg.deltas = {1.0, 0.5, 11};
    cfg.samples = 128;
    const dfoq::SweepResult r = dfoq::run_sweep(cfg);
    const auto& s = r.summary.aligned.slope;
    o.sub(s && *s >= 0.8 && *s <= 1.2,
          "quartic n=" + std::to_string(n) + " aligned slope " + (s ? fmt(*s) : "n/a") + " in [0.8,1.2]");
  }

  const dfoq::SampleSet y(Vec::Zero(3), (Mat(3, 4) << 1, 0, -1, 0, 0, 1, 0, -1, 0, 0, 0, 0).finished());
  const auto mn = dfoq::solve_mn(sphere_oracle(), y).model;
  const Vec e3 = Vec::Unit(3, 2);
  const double err = dfoq::directional_error(mn.H, 2.0 * Mat::Identity(3, 3), e3, e3);
  o.sub(std::abs(err - 2.0) <= 1e-12, "R^3 sphere off-subspace directional error " + fmt(err) + " (expected 2)");
  o.summary = "directional Hessian bounds for MN, MFN and the structured-pack GSH";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (const dfoq::Check& c : dfoq::verify_relationships(50, 20240611)) {
    o.sub(c.pass, c.name + ": measured " + fmt(c.measured) + ", tolerance " + fmt(c.tolerance));
  }
  const double secs = seconds_since(t0);
  o.sub(secs < 60.0, "runtime " + fmt(secs) + " s");
  o.summary = "closed-form constructions coincide with the solvers";
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 gen(8);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = 1 + k % 4;
    const dfoq::Oracle f = dfoq::random_smooth(gen, n);
    const Vec x0 = dfoq::random_matrix(gen, n, 1);
    const Mat s = 0.5 * dfoq::random_matrix(gen, n, 1 + k % 3);
    const Mat t = 0.5 * dfoq::random_matrix(gen, n, 1 + (k + 2) % 4);
    worst = std::max(worst, max_abs(dfoq::gsh(f, x0, s, t).transpose() - dfoq::gsh(f, x0, t, s)));
  }
  o.sub(worst <= 1e-10, "50 random shared-T instances, max |gsh(S;T)' - gsh(T;S)| = " + fmt(worst));
  o.summary = "transpose identity of the generalized simplex Hessian";
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Outcome criterion9() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("dfoq_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string args =
      " sweep --function rosenbrock --x0 0.3,-0.2,0.1 --set random:3:42 --model mfn --deltas 0.5:0.5:8 --samples 256"
      " --jobs 4 --format csv --out ";
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = dir / ("run" + std::to_string(i) + ".csv");
    const std::string cmd = std::string(DFOQ_BIN) + args + path.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    o.sub(WIFEXITED(raw) && WEXITSTATUS(raw) == 0, "run " + std::to_string(i + 1) + " exit status");
    outputs[i] = slurp(path);
  }
  std::filesystem::remove_all(dir);
  o.sub(!outputs[0].empty() && outputs[0] == outputs[1],
        "byte-identical CSV (" + std::to_string(outputs[0].size()) + " bytes)");
  o.summary = "two identical dfoq sweep runs give identical CSV";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                          criterion4, criterion5, criterion6,
                                                          criterion7, criterion8, criterion9};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: acceptance [1-%zu ...]\n", criteria.size());
      return 2;
    }
    which.push_back(k);
  }
  if (which.empty()) {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) which.push_back(k);
  }
  bool all = true;
  for (int k : which) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("threw: ") + e.what();
    }
    std::printf("criterion %d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.summary.c_str());
    for (const std::string& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
