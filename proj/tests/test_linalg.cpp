#include <random>

#include "dfoq/verify.hpp"
#include "helpers.hpp"

using namespace testing;
using dfoq::NormKind;

TEST_CASE("pinv of the identity and of a diagonal projector") {
  CHECK(max_abs_diff(dfoq::pinv(Mat::Identity(3, 3)), Mat::Identity(3, 3)) == 0.0);
  const Mat p = rows({{1, 0}, {0, 0}});
  CHECK(max_abs_diff(dfoq::pinv(p), p) == 0.0);
}

TEST_CASE("pinv of a full-column-rank 3x2 matrix is a left inverse") {
  std::mt19937_64 gen(1);
  const Mat m = dfoq::random_matrix(gen, 3, 2);
  CHECK((dfoq::pinv(m) * m - Mat::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("pinv rejects non-finite input") {
  Mat m = Mat::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(error_kind_of([&] { dfoq::pinv(m); }) == dfoq::ErrorKind::kInvalidInput);
}

TEST_CASE("Moore-Penrose identities and double pseudoinverse on random matrices") {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 40; ++k) {
    const Eigen::Index r = 1 + k % 5;
    const Eigen::Index c = 1 + (k / 5) % 5;
    Mat m = dfoq::random_matrix(gen, r, c);
    if (k % 3 == 0 && c > 1) m.col(c - 1) = m.col(0);  // rank deficient
    const Mat a = dfoq::pinv(m);
    const double s = 1.0 + m.norm();
    CHECK((m * a * m - m).norm() <= 1e-10 * s);
    CHECK((a * m * a - a).norm() <= 1e-10 * (1.0 + a.norm()));
    CHECK((m * a - (m * a).transpose()).norm() <= 1e-10 * s);
    CHECK((a * m - (a * m).transpose()).norm() <= 1e-10 * s);
    CHECK((dfoq::pinv(a) - m).norm() <= 1e-10 * s);
  }
}

TEST_CASE("matrix norms") {
  const Mat i2 = Mat::Identity(2, 2);
  CHECK(dfoq::matrix_norm(i2, NormKind::kOp1) == doctest::Approx(1.0));
  CHECK(dfoq::matrix_norm(i2, NormKind::kOpInf) == doctest::Approx(1.0));
  CHECK(dfoq::matrix_norm(i2, NormKind::kSpectral) == doctest::Approx(1.0));
  CHECK(dfoq::matrix_norm(i2, NormKind::kFrobenius) == doctest::Approx(std::sqrt(2.0)));
  const Mat a = rows({{1, -2}, {3, 4}});
  CHECK(dfoq::matrix_norm(a, NormKind::kOp1) == 6.0);
  CHECK(dfoq::matrix_norm(a, NormKind::kOpInf) == 7.0);
  Mat d = Mat::Zero(2, 2);
  d.diagonal() << 3.0, -4.0;
  CHECK(dfoq::matrix_norm(d, NormKind::kSpectral) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("solve_min_norm examples") {
  const auto a = dfoq::solve_min_norm(rows({{1, 1}}), vec({2}));
  CHECK(max_abs_diff(a.x, vec({1, 1})) <= 1e-14);
  CHECK(a.residual <= 1e-14);
  const auto b = dfoq::solve_min_norm(Mat::Identity(2, 2), vec({3, 4}));
  CHECK(max_abs_diff(b.x, vec({3, 4})) == 0.0);
  // Least-squares solution x = (1.5, 0) leaves residual (-0.5, 0.5).
  const auto c = dfoq::solve_min_norm(rows({{1, 0}, {1, 0}}), vec({1, 2}));
  CHECK(c.residual == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(max_abs_diff(c.x, vec({1.5, 0})) <= 1e-14);
}

TEST_CASE("solve_min_norm returns the smallest solution of consistent systems") {
  std::mt19937_64 gen(3);
  for (int k = 0; k < 10; ++k) {
    const Mat a = dfoq::random_matrix(gen, 2, 5);
    const Vec b = a * dfoq::random_matrix(gen, 5, 1);
    const auto sol = dfoq::solve_min_norm(a, b);
    const Mat ns = dfoq::null_space(a);
    REQUIRE(ns.cols() == 3);
    for (int t = 0; t < 100; ++t) {
      const Vec n = ns * dfoq::random_matrix(gen, 3, 1);
      CHECK(sol.x.norm() <= (sol.x + n).norm() + 1e-12);
    }
  }
}

TEST_CASE("constrained_least_norm examples") {
  const auto a = dfoq::constrained_least_norm(Mat::Identity(2, 2), vec({1, 2}), vec({1, 1}));
  CHECK(max_abs_diff(a.z, vec({1, 2})) <= 1e-14);
  const auto b = dfoq::constrained_least_norm(rows({{1, 1}}), vec({2}), vec({1, 4}));
  CHECK(max_abs_diff(b.z, vec({8.0 / 5.0, 2.0 / 5.0})) <= 1e-14);
  CHECK(b.unique);
  const auto c = dfoq::constrained_least_norm(rows({{1, -1}}), vec({0}), vec({1, 1}));
  CHECK(max_abs_diff(c.z, vec({0, 0})) <= 1e-14);
}

TEST_CASE("constrained_least_norm flags inconsistency and non-uniqueness") {
  CHECK(error_kind_of([] {
          dfoq::constrained_least_norm(rows({{1, 0}, {1, 0}}), vec({1, 2}), vec({1, 1}));
        }) == dfoq::ErrorKind::kInfeasible);
  // Second coordinate is free of both objective and constraints.
  const auto s = dfoq::constrained_least_norm(rows({{1, 0}}), vec({1}), vec({1, 0}));
  CHECK_FALSE(s.unique);
  CHECK(max_abs_diff(s.z, vec({1, 0})) <= 1e-14);
}

TEST_CASE("constrained_least_norm with unit weights agrees with solve_min_norm") {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index m = 1 + k % 4;
    const Eigen::Index n = m + 1 + k % 3;
    const Mat a = dfoq::random_matrix(gen, m, n);
    const Vec b = dfoq::random_matrix(gen, m, 1);
    const Vec w = Vec::Ones(n);
    const double gap = (dfoq::constrained_least_norm(a, b, w).z - dfoq::solve_min_norm(a, b).x).norm();
    CHECK(gap <= 1e-10 * (1.0 + b.norm()));
  }
}
