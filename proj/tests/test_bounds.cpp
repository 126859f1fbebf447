#include <cmath>
#include <random>

#include "dfoq/bounds.hpp"
#include "dfoq/verify.hpp"
#include "helpers.hpp"

using namespace testing;
using dfoq::ModelFamily;
using dfoq::SampleSet;

TEST_CASE("generic kappa constants") {
  const SampleSet y(Vec::Zero(2), Mat::Identity(2, 2));
  const auto k = dfoq::kappa_generic(2.0, 2.0, y);
  CHECK(k.kappa_ef == doctest::Approx(2.0 * (std::sqrt(2.0) + 1.0)).epsilon(1e-14));
  CHECK(k.kappa_eg == doctest::Approx(2.0 * k.kappa_ef + 4.0).epsilon(1e-14));
  const auto z = dfoq::kappa_generic(0.0, 0.0, y);
  CHECK(z.kappa_ef == 0.0);
  CHECK(z.kappa_eg == 0.0);
}

TEST_CASE("generic kappa matches a separate evaluation and is scale invariant") {
  std::mt19937_64 gen(31);
  for (int i = 0; i < 10; ++i) {
    const SampleSet y(Vec::Zero(3), dfoq::random_matrix(gen, 3, 5));
    const double l = 1.7;
    const double kmh = 0.6;
    const Mat dbar = y.D() / y.D().colwise().norm().maxCoeff();
    const Mat pinv = dbar.completeOrthogonalDecomposition().pseudoInverse();
    const double one_norm = pinv.cwiseAbs().colwise().sum().maxCoeff();
    const double want = (l + kmh) / 2.0 * std::sqrt(3.0) * one_norm + (l + kmh) / 2.0;
    const auto k = dfoq::kappa_generic(l, kmh, y);
    CHECK(k.kappa_ef == doctest::Approx(want).epsilon(1e-10));
    CHECK(dfoq::kappa_generic(l, kmh, dfoq::scale(y, 1e-3)).kappa_ef == doctest::Approx(k.kappa_ef).epsilon(1e-12));
  }
}

TEST_CASE("MFN curvature constant") {
  const SampleSet y(Vec::Zero(2), cols({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}));
  const Mat finv = dfoq::build_P_F(y).F.inverse();
  const double want = 2.0 / 4.0 * 4.0 * finv.cwiseAbs().rowwise().sum().maxCoeff();
  CHECK(dfoq::kappa_mH_mfn(2.0, y) == doctest::Approx(want).epsilon(1e-12));
  CHECK(dfoq::kappa_mH_mfn(2.0, dfoq::scale(y, 0.25)) == doctest::Approx(want).epsilon(1e-12));
  CHECK(dfoq::kappa_mH_mfn(3.0, SampleSet(Vec::Zero(1), cols({{1}}))) == doctest::Approx(15.0 / 16.0).epsilon(1e-14));
  const SampleSet degenerate(Vec::Zero(3), cols({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}}));
  CHECK(error_kind_of([&] { dfoq::kappa_mH_mfn(1.0, degenerate); }) == dfoq::ErrorKind::kNotPoised);
}

TEST_CASE("MN curvature constant") {
  CHECK(dfoq::kappa_mH_mn(0.0, 0.0, 1.0, 7.0) == 7.0);
  CHECK(dfoq::kappa_mH_mn(3.0, 0.0, 1.0, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(dfoq::kappa_mH_mn(1.0, 2.0, 0.5, 1.5) == doctest::Approx(std::hypot(2.0, 1.5)).epsilon(1e-15));
}

TEST_CASE("QS curvature constant") {
  // Shared T = I_n gives q_i = n columns per row, so the root term is sqrt(n * n).
  for (Eigen::Index n = 1; n <= 4; ++n) {
    dfoq::QSSpec spec;
    spec.hess_terms.push_back({1.0, dfoq::DirectionPack::shared(Mat::Identity(n, n), Mat::Identity(n, n))});
    CHECK(dfoq::kappa_mH_qs(1.3, spec) == doctest::Approx(1.3 * double(n)).epsilon(1e-14));
    spec.hess_terms.push_back({0.0, dfoq::DirectionPack::shared(Mat::Identity(n, n), Mat::Identity(n, n))});
    CHECK(dfoq::kappa_mH_qs(1.3, spec) == doctest::Approx(1.3 * double(n)).epsilon(1e-14));
  }
  const dfoq::QSSpec centred = dfoq::qs_centred(Mat::Identity(2, 2));
  CHECK(dfoq::kappa_mH_qs(2.0, centred) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("aligned and cross directional bounds") {
  CHECK(dfoq::directional_bound_aligned(0.0, 0.7) == 0.0);
  CHECK(dfoq::directional_bound_aligned(3.0, 1.0) == doctest::Approx(1.0));
  CHECK(dfoq::directional_bound_cross(ModelFamily::kMN, 1.5, 3.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(4.0 * 1.5 + 2.0));
  CHECK(dfoq::directional_bound_cross(ModelFamily::kMFN, 0.0, 0.0, 1.0, 1.0, 1.0) == 0.0);
  const double got = dfoq::directional_bound_cross(ModelFamily::kMFN, 0.8, 2.5, 0.3, 0.2, 0.3);
  CHECK(got == doctest::Approx((4 * 0.8 * 0.09 + 2 * 2.5 * 0.027 / 3) / 0.06).epsilon(1e-14));
  CHECK(error_kind_of([] { dfoq::directional_bound_cross(ModelFamily::kQS, 1, 1, 1, 1, 1); }) ==
        dfoq::ErrorKind::kInvalidInput);
}

TEST_CASE("general-direction bound") {
  const Mat d = Mat::Identity(2, 2);
  // Along a sample direction v is a coordinate vector and only the L term survives.
  CHECK(dfoq::directional_bound_general(ModelFamily::kMN, 5.0, 3.0, d, vec({1, 0})) == doctest::Approx(1.0));
  // v = (1,1)/sqrt(2): ||v||_1^2 = 2, ||v||_inf^2 = 1/2, so the ratio is 3/2.
  const double kef = 0.9;
  const double l = 1.2;
  CHECK(dfoq::directional_bound_general(ModelFamily::kMFN, kef, l, d, vec({1, 1}) / std::sqrt(2.0)) ==
        doctest::Approx(6.0 * kef + 4.0 * l / 3.0).epsilon(1e-14));
  CHECK(dfoq::hess_error_bound_global(ModelFamily::kMN, 7.0, 3.0, cols({{2}})) == doctest::Approx(2.0));
  CHECK(dfoq::hess_error_bound_global(ModelFamily::kMN, kef, l, d) ==
        doctest::Approx(4.0 * 1.5 * kef + l / 3.0 * 4.0).epsilon(1e-14));
}

TEST_CASE("GSH directional bounds") {
  const Mat s = Mat::Identity(2, 2);
  CHECK(dfoq::directional_bound_gsh_general(2.0, 0.0, s, vec({1, 0})) == 0.0);
  CHECK(dfoq::gsh_error_bound_global(5.0, 3.0, cols({{1, 0}})) == doctest::Approx(1.0));
  CHECK(dfoq::directional_bound_gsh_cross(4.0, 3.0, 2.0) == doctest::Approx(6.0));
  CHECK(error_kind_of([] { dfoq::directional_bound_gsh_general(1.0, 1.0, cols({{1, 0, 0}}), vec({0, 1, 0})); }) ==
        dfoq::ErrorKind::kDomain);

  // f = (1'x)^2 with the structured pack: the GSH recovers only the diagonal.
  const dfoq::TestFunction f = dfoq::find_function("rankone", 2);
  const auto m = dfoq::build_qs(f.oracle(), Vec::Zero(2), dfoq::qs_centred(s));
  const double err = dfoq::directional_error(m.H, f.hess(Vec::Zero(2)), vec({1, 0}), vec({0, 1}));
  CHECK(err == doctest::Approx(2.0));
  CHECK(err <= dfoq::directional_bound_gsh_cross(dfoq::matrix_norm(f.hess(Vec::Zero(2)), dfoq::NormKind::kSpectral),
                                                 0.0, 1.0));
}

TEST_CASE("measured errors") {
  const dfoq::TestFunction q = dfoq::find_function("quadratic", 3);
  const Vec x0 = dfoq::generic_point(3);
  const dfoq::QuadraticModel taylor{x0, q.eval(x0), q.grad(x0), q.hess(x0), true};
  const SampleSet y(x0, 0.1 * Mat::Identity(3, 3));
  const auto rep = dfoq::measure_errors(q, taylor, y, 128);
  CHECK(rep.err_f <= 1e-14);
  CHECK(rep.err_g <= 1e-13);
  CHECK(rep.aligned_max <= 1e-15);

  const dfoq::TestFunction quartic = dfoq::find_function("quartic", 1);
  for (double delta : {1.0, 0.5, 0.125}) {
    const SampleSet y1(Vec::Zero(1), cols({{delta}, {-delta}}));
    const auto m = dfoq::solve_mn(quartic.oracle(), y1).model;
    const auto r = dfoq::measure_errors(quartic, m, y1, 64);
    REQUIRE(r.aligned.size() == 1);
    CHECK(r.aligned[0] == doctest::Approx(2.0 * delta * delta).epsilon(1e-10));
  }

  const dfoq::TestFunction sphere = dfoq::find_function("sphere", 3);
  const SampleSet y3(Vec::Zero(3), cols({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}}));
  const auto m3 = dfoq::solve_mn(sphere.oracle(), y3).model;
  const auto r3 = dfoq::measure_errors(sphere, m3, y3, 64);
  CHECK(r3.aligned_max <= 1e-12);
  const auto off = dfoq::measure_errors(sphere, m3, y3, 64, Mat(Mat::Identity(3, 3)));
  CHECK(off.aligned[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("distinct axes and slopes") {
  const Mat axes = dfoq::distinct_axes(cols({{1, 0}, {0, 1}, {-1, 0}, {0, -2}, {2, 0}}));
  CHECK(axes.cols() == 2);
  const std::vector<double> deltas{1, 0.5, 0.25, 0.125};
  std::vector<double> errs;
  for (double d : deltas) errs.push_back(3 * d * d);
  const auto s = dfoq::loglog_slope(deltas, errs, std::vector<double>(4, 0.0));
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(dfoq::loglog_slope(deltas, errs, std::vector<double>(4, 10.0)).has_value());
  CHECK(dfoq::roundoff_floor(1.0, 0.5, 2) == doctest::Approx(1e3 * 2.220446049250313e-16 * 4.0));
}

TEST_CASE("ball probes stay in the ball and are deterministic") {
  const Vec x0 = vec({0.2, -0.1, 0.4});
  const auto a = dfoq::ball_probes(x0, 0.3, 200, 0.3 * Mat::Identity(3, 3));
  const auto b = dfoq::ball_probes(x0, 0.3, 200, 0.3 * Mat::Identity(3, 3));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] - x0).norm() <= 0.3 * (1 + 1e-12));
    CHECK(max_abs_diff(a[i], b[i]) == 0.0);
  }
}
