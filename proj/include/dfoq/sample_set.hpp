#pragma once

#include <vector>

#include "dfoq/direction_pack.hpp"
#include "dfoq/linalg.hpp"

namespace dfoq {

/// Center x0 plus the offsets d^i = y^i - x0 stored as columns of D.
/// Construction rejects zero and duplicate columns.
class SampleSet {
 public:
  SampleSet(Vec x0, Mat directions);

  const Vec& x0() const { return x0_; }
  const Mat& D() const { return d_; }
  Eigen::Index dim() const { return d_.rows(); }
  Eigen::Index size() const { return d_.cols(); }
  Vec point(Eigen::Index i) const { return x0_ + d_.col(i); }

 private:
  Vec x0_;
  Mat d_;
};

/// {x0, x0 + d^i, x0 - d^i}; Dhalf holds the p base directions.
class StructuredSet {
 public:
  StructuredSet(Vec x0, Mat half_directions);

  const Vec& x0() const { return x0_; }
  const Mat& Dhalf() const { return dhalf_; }
  Eigen::Index p() const { return dhalf_.cols(); }

 private:
  Vec x0_;
  Mat dhalf_;
};

struct PoisednessReport {
  bool mn_feasible = false;
  bool mfn_poised = false;
  double F_cond = 0.0;  // infinity-norm condition number of the normalized KKT matrix F
  Eigen::Index rank_D = 0;
};

/// Largest column norm.
double radius(const Mat& directions);
double radius(const SampleSet& y);
/// D / radius(D).
Mat normalize(const Mat& directions);
Mat normalize(const SampleSet& y);

SampleSet scale(const SampleSet& y, double t);
StructuredSet scale(const StructuredSet& s, double t);

struct PFMatrices {
  Mat P;       // m x m, P_ij = 1/4 ((d^i/Delta)'(d^j/Delta))^2
  Mat Ftilde;  // [[Delta^4 P, D'], [D, 0]]
  Mat F;       // [[P, Dbar'], [Dbar, 0]]
};

PFMatrices build_P_F(const SampleSet& y);

/// `deltas(i)` must be f(x0 + d^i) - f(x0).
PoisednessReport poisedness(const SampleSet& y, const Vec& deltas);

/// True when the normalized KKT matrix F is numerically invertible.
bool mfn_poised(const SampleSet& y);

SampleSet expand(const StructuredSet& s);
DirectionPack as_gsh_pack(const StructuredSet& s);

/// Deduplicated sample set from a list of offsets; zero offsets (the center)
/// and repeats within 1e-12 relative are dropped.
SampleSet sample_set_from_offsets(const Vec& x0, const std::vector<Vec>& offsets);

}  // namespace dfoq
