#pragma once

#include <doctest.h>

#include <initializer_list>

#include "dfoq/errors.hpp"
#include "dfoq/linalg.hpp"

namespace testing {

using dfoq::Mat;
using dfoq::Vec;

/// Matrix from a list of columns.
inline Mat cols(std::initializer_list<std::initializer_list<double>> columns) {
  const auto p = static_cast<Eigen::Index>(columns.size());
  const auto n = static_cast<Eigen::Index>(columns.begin()->size());
  Mat m(n, p);
  Eigen::Index j = 0;
  for (const auto& c : columns) {
    Eigen::Index i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

/// Matrix from a list of rows.
inline Mat rows(std::initializer_list<std::initializer_list<double>> rs) { return cols(rs).transpose(); }

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

inline Vec unit(Eigen::Index n, Eigen::Index i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

template <class F>
dfoq::ErrorKind error_kind_of(F&& fn) {
  try {
    fn();
  } catch (const dfoq::Error& e) {
    return e.kind();
  }
  FAIL("expected a dfoq::Error");
  return dfoq::ErrorKind::kInvalidInput;
}

}  // namespace testing
