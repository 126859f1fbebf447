#pragma once

#include <random>
#include <utility>

#include "dfoq/linalg.hpp"
#include "dfoq/models.hpp"
#include "dfoq/sample_set.hpp"
#include "dfoq/verify.hpp"

namespace testing {

/// Interpolation QP over z = (alpha, vech H) solved by the null-space method.
/// Off-diagonal entries of H are stored once, so they carry weight 2.
inline std::pair<dfoq::Vec, dfoq::Mat> qp_oracle(const dfoq::SampleSet& y, const dfoq::Vec& deltas, bool mfn) {
  const Eigen::Index n = y.dim();
  const Eigen::Index m = y.size();
  const Eigen::Index nv = n + n * (n + 1) / 2;
  dfoq::Mat a(m, nv);
  dfoq::Vec w(nv);
  w.head(n).setConstant(mfn ? 0.0 : 1.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const dfoq::Vec d = y.D().col(i);
    a.row(i).head(n) = d.transpose();
    Eigen::Index c = n;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k; l < n; ++l, ++c) {
        a(i, c) = k == l ? 0.5 * d(k) * d(k) : d(k) * d(l);
        w(c) = k == l ? 1.0 : 2.0;
      }
    }
  }
  const dfoq::Vec z = dfoq::constrained_least_norm(a, deltas, w).z;
  dfoq::Mat h(n, n);
  Eigen::Index c = n;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k; l < n; ++l, ++c) h(k, l) = h(l, k) = z(c);
  }
  return {z.head(n), h};
}

struct RandomInstance {
  dfoq::SampleSet set;
  dfoq::Vec deltas;
};

/// Random MFN-poised set with n <= 5 and m <= 12, with random values.
inline RandomInstance random_poised_instance(std::mt19937_64& gen) {
  for (;;) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(1, 5)(gen);
    const Eigen::Index hi = std::min<Eigen::Index>(12, n + n * (n + 1) / 2);
    const Eigen::Index m = std::uniform_int_distribution<Eigen::Index>(n + 1, hi)(gen);
    dfoq::SampleSet y(dfoq::random_matrix(gen, n, 1), dfoq::random_matrix(gen, n, m));
    if (!dfoq::mfn_poised(y)) continue;
    dfoq::Vec d = dfoq::random_matrix(gen, m, 1);
    return {std::move(y), std::move(d)};
  }
}

}  // namespace testing
