#include "dfoq/sample_set.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dfoq/errors.hpp"

namespace dfoq {
namespace {

constexpr double kDuplicateRelTol = 1e-12;

bool same_direction(const Vec& a, const Vec& b) {
  if (a == b) return true;
  return (a - b).norm() <= kDuplicateRelTol * std::max(a.norm(), b.norm());
}

}  // namespace

SampleSet::SampleSet(Vec x0, Mat directions) : x0_(std::move(x0)), d_(std::move(directions)) {
  require(x0_.size() >= 1, ErrorKind::kInvalidInput, "SampleSet: empty center");
  require(d_.cols() >= 1, ErrorKind::kInvalidInput, "SampleSet: at least one direction required");
  require(d_.rows() == x0_.size(), ErrorKind::kInvalidInput, "SampleSet: directions must have dim(x0) rows");
  require(x0_.allFinite() && d_.allFinite(), ErrorKind::kInvalidInput, "SampleSet: non-finite entry");
  for (Eigen::Index i = 0; i < d_.cols(); ++i) {
    require(d_.col(i).norm() > 0.0, ErrorKind::kInvalidInput,
            "SampleSet: direction " + std::to_string(i) + " is zero");
    for (Eigen::Index j = 0; j < i; ++j) {
      require(!same_direction(d_.col(i), d_.col(j)), ErrorKind::kInvalidInput,
              "SampleSet: directions " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
    }
  }
}

StructuredSet::StructuredSet(Vec x0, Mat half_directions) : x0_(std::move(x0)), dhalf_(std::move(half_directions)) {
  require(dhalf_.cols() >= 1 && dhalf_.rows() == x0_.size(), ErrorKind::kInvalidInput,
          "StructuredSet: Dhalf must be n x p with p >= 1");
  // Expansion validates that the 2p directions are distinct and nonzero.
  (void)expand(*this);
}

double radius(const Mat& directions) { return directions.colwise().norm().maxCoeff(); }
double radius(const SampleSet& y) { return radius(y.D()); }

Mat normalize(const Mat& directions) {
  const double r = radius(directions);
  require(r > 0.0, ErrorKind::kInvalidInput, "normalize: zero matrix");
  return directions / r;
}
Mat normalize(const SampleSet& y) { return normalize(y.D()); }

SampleSet scale(const SampleSet& y, double t) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::kInvalidInput, "scale: factor must be positive");
  return SampleSet(y.x0(), t * y.D());
}

StructuredSet scale(const StructuredSet& s, double t) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::kInvalidInput, "scale: factor must be positive");
  return StructuredSet(s.x0(), t * s.Dhalf());
}

PFMatrices build_P_F(const SampleSet& y) {
  const Eigen::Index m = y.size();
  const Eigen::Index n = y.dim();
  const double delta = radius(y);
  const Mat dbar = y.D() / delta;
  const Mat gram = dbar.transpose() * dbar;

  PFMatrices out;
  out.P = 0.25 * gram.array().square().matrix();
  out.F = Mat::Zero(m + n, m + n);
  out.F.topLeftCorner(m, m) = out.P;
  out.F.topRightCorner(m, n) = dbar.transpose();
  out.F.bottomLeftCorner(n, m) = dbar;
  out.Ftilde = Mat::Zero(m + n, m + n);
  out.Ftilde.topLeftCorner(m, m) = std::pow(delta, 4) * out.P;
  out.Ftilde.topRightCorner(m, n) = y.D().transpose();
  out.Ftilde.bottomLeftCorner(n, m) = y.D();
  return out;
}

bool mfn_poised(const SampleSet& y) {
  const Mat f = build_P_F(y).F;
  return numerical_rank(f) == f.rows();
}

SampleSet expand(const StructuredSet& s) {
  const Eigen::Index p = s.Dhalf().cols();
  Mat d(s.Dhalf().rows(), 2 * p);
  d.leftCols(p) = s.Dhalf();
  d.rightCols(p) = -s.Dhalf();
  return SampleSet(s.x0(), std::move(d));
}

DirectionPack as_gsh_pack(const StructuredSet& s) {
  DirectionPack pack;
  pack.S = s.Dhalf();
  for (Eigen::Index i = 0; i < s.p(); ++i) pack.Ts.push_back(-s.Dhalf().col(i));
  return pack;
}

SampleSet sample_set_from_offsets(const Vec& x0, const std::vector<Vec>& offsets) {
  double largest = 0.0;
  for (const Vec& d : offsets) {
    require(d.size() == x0.size(), ErrorKind::kInvalidInput, "sample_set_from_offsets: dimension mismatch");
    largest = std::max(largest, d.norm());
  }
  std::vector<Vec> kept;
  for (const Vec& d : offsets) {
    // Offsets that cancel to (numerically) zero are the center itself.
    if (d.norm() <= kDuplicateRelTol * largest) continue;
    bool dup = false;
    for (const Vec& k : kept) dup = dup || same_direction(d, k);
    if (!dup) kept.push_back(d);
  }
  require(!kept.empty(), ErrorKind::kInvalidInput, "sample_set_from_offsets: no nonzero offsets");
  Mat dm(x0.size(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) dm.col(static_cast<Eigen::Index>(i)) = kept[i];
  return SampleSet(x0, std::move(dm));
}

}  // namespace dfoq
