#pragma once

#include <optional>
#include <vector>

#include "dfoq/linalg.hpp"

namespace dfoq {

/// Direction matrices (S, T_1..T_p) of a generalized simplex Hessian. Row
/// i of the Hessian's difference table uses T_i with base direction s^i.
struct DirectionPack {
  Mat S;
  std::vector<Mat> Ts;

  /// Pack with T_1 = ... = T_p = T.
  static DirectionPack shared(const Mat& S, const Mat& T);

  Eigen::Index dim() const { return S.rows(); }
  Eigen::Index p() const { return S.cols(); }

  /// The common T when every T_i is bitwise identical.
  std::optional<Mat> shared_T() const;

  /// Throws kInvalidInput unless all matrices have n rows, p >= 1 and |Ts| = p.
  void validate() const;
};

}  // namespace dfoq
