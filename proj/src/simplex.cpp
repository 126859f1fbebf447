#include "dfoq/simplex.hpp"

#include <string>

#include "dfoq/errors.hpp"

namespace dfoq {

DirectionPack DirectionPack::shared(const Mat& S, const Mat& T) {
  DirectionPack pack{S, std::vector<Mat>(static_cast<std::size_t>(S.cols()), T)};
  pack.validate();
  return pack;
}

std::optional<Mat> DirectionPack::shared_T() const {
  if (Ts.empty()) return std::nullopt;
  for (const Mat& t : Ts) {
    if (t.rows() != Ts.front().rows() || t.cols() != Ts.front().cols() || t != Ts.front()) return std::nullopt;
  }
  return Ts.front();
}

void DirectionPack::validate() const {
  require(S.rows() >= 1 && S.cols() >= 1, ErrorKind::kInvalidInput, "DirectionPack: S must be non-empty");
  require(static_cast<Eigen::Index>(Ts.size()) == S.cols(), ErrorKind::kInvalidInput,
          "DirectionPack: expected one T_i per column of S");
  for (const Mat& t : Ts) {
    require(t.rows() == S.rows() && t.cols() >= 1, ErrorKind::kInvalidInput,
            "DirectionPack: each T_i must be n x q_i with q_i >= 1");
  }
}

namespace {

void check_dims(const Vec& x0, const Mat& m, const char* what) {
  require(m.rows() == x0.size() && m.cols() >= 1, ErrorKind::kInvalidInput,
          std::string(what) + ": direction matrix must be n x p with p >= 1");
}

}  // namespace

Vec delta_f(const Oracle& f, const Vec& x0, const Mat& S) {
  check_dims(x0, S, "delta_f");
  const double f0 = f(x0);
  Vec out(S.cols());
  for (Eigen::Index i = 0; i < S.cols(); ++i) out(i) = f(x0 + S.col(i)) - f0;
  return out;
}

Vec gsg(const Oracle& f, const Vec& x0, const Mat& S) {
  return pinv(S.transpose()) * delta_f(f, x0, S);
}

Mat delta_delta_f(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T) {
  check_dims(x0, S, "delta_delta_f");
  check_dims(x0, T, "delta_delta_f");
  const double f0 = f(x0);
  Vec ft(T.cols());
  for (Eigen::Index j = 0; j < T.cols(); ++j) ft(j) = f(x0 + T.col(j));
  Mat out(S.cols(), T.cols());
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    const double fs = f(x0 + S.col(i));
    for (Eigen::Index j = 0; j < T.cols(); ++j) {
      const Vec st = S.col(i) + T.col(j);
      out(i, j) = f(x0 + st) - fs - ft(j) + f0;
    }
  }
  return out;
}

Mat gsh(const Oracle& f, const Vec& x0, const DirectionPack& pack) {
  pack.validate();
  check_dims(x0, pack.S, "gsh");
  const Mat st_pinv = pinv(pack.S.transpose());
  if (auto t = pack.shared_T()) {
    return st_pinv * delta_delta_f(f, x0, pack.S, *t) * pinv(*t);
  }
  const Eigen::Index n = x0.size();
  Mat rows(pack.p(), n);
  for (Eigen::Index i = 0; i < pack.p(); ++i) {
    const Mat& ti = pack.Ts[static_cast<std::size_t>(i)];
    const Vec shifted = x0 + pack.S.col(i);
    const Mat ti_pinv_t = pinv(ti.transpose());
    // Both gradients share (T_i')^+, so difference the tables first.
    const double fs = f(shifted);
    const double f0 = f(x0);
    Vec diff(ti.cols());
    for (Eigen::Index j = 0; j < ti.cols(); ++j) {
      const Vec st = pack.S.col(i) + ti.col(j);
      diff(j) = (f(x0 + st) - fs) - (f(x0 + ti.col(j)) - f0);
    }
    rows.row(i) = (ti_pinv_t * diff).transpose();
  }
  return st_pinv * rows;
}

Mat gsh(const Oracle& f, const Vec& x0, const Mat& S, const Mat& T) {
  return gsh(f, x0, DirectionPack::shared(S, T));
}

Vec centred_gsg(const Oracle& f, const Vec& x0, const Mat& S) {
  return 0.5 * (gsg(f, x0, S) + gsg(f, x0, -S));
}

Vec adapted_centred_gsg(const Oracle& f, const Vec& x0, const Mat& S, Eigen::Index ell) {
  require(ell >= 0 && ell <= S.cols(), ErrorKind::kInvalidInput, "adapted_centred_gsg: ell out of range");
  const Vec shift = ell == 0 ? Vec::Zero(x0.size()).eval() : S.col(ell - 1).eval();
  const Vec base = x0 - shift;
  return gsg(f, x0, S) + gsg(f, base, S) - gsg(f, base, 2.0 * S);
}

Mat build_U_S_ell(const Mat& S, Eigen::Index ell) {
  require(S.rows() >= 1 && S.cols() >= 1, ErrorKind::kInvalidInput, "build_U_S_ell: empty S");
  require(ell >= 0 && ell <= S.cols(), ErrorKind::kInvalidInput, "build_U_S_ell: ell out of range");
  require(numerical_rank(S) == S.cols(), ErrorKind::kInvalidInput,
          "build_U_S_ell: S must have full column rank");
  if (ell == 0) return S;
  const Vec s_ell = S.col(ell - 1);
  Mat u = S.colwise() - s_ell;
  u.col(ell - 1) = -s_ell;
  return u;
}

}  // namespace dfoq
