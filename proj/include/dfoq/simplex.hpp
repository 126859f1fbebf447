#pragma once

#include "dfoq/direction_pack.hpp"
#include "dfoq/linalg.hpp"
#include "dfoq/oracle.hpp"

namespace dfoq {

/// Forward differences f(x0 + s^i) - f(x0), one per column of S.
Vec delta_f(const Oracle& f, const Vec& x0, const Mat& S);

/// Generalized simplex gradient (S')^+ delta_f(x0; S).
Vec gsg(const Oracle& f, const Vec& x0, const Mat& S);

/// Mixed second differences f(x0+s^i+t^j) - f(x0+s^i) - f(x0+t^j) + f(x0).
Mat delta_delta_f(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T);

/// Generalized simplex Hessian. A shared T uses (S')^+ dd_f T^+; distinct
/// T_i are assembled row by row from gsg(x0 + s^i; T_i) - gsg(x0; T_i).
/// The result is not symmetric in general.
Mat gsh(const Oracle& f, const Vec& x0, const DirectionPack& pack);
Mat gsh(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T);

/// (gsg(x0; S) + gsg(x0; -S)) / 2.
Vec centred_gsg(const Oracle& f, const Vec& x0, const Mat& S);

/// gsg(x0; S) + gsg(x0 - s^ell; S) - gsg(x0 - s^ell; 2S) with s^0 = 0, so
/// ell = 0 gives 2 gsg(x0; S) - gsg(x0; 2S).
Vec adapted_centred_gsg(const Oracle& f, const Vec& x0, const Mat& S, Eigen::Index ell);

/// U_S^0 = S; for ell >= 1 column j is s^j - s^ell and column ell is -s^ell.
/// S must have full column rank.
Mat build_U_S_ell(const Mat& S, Eigen::Index ell);

}  // namespace dfoq
