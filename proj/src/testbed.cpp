#include "dfoq/testbed.hpp"

#include <algorithm>
#include <cmath>

#include "dfoq/errors.hpp"

namespace dfoq {
namespace {

// Largest |x_i| over the ball B(c, r) is bounded by |c_i| + r.
Vec coordinate_bounds(const Vec& c, double r) { return c.cwiseAbs().array() + r; }

double outer_radius(const Vec& c, double r) { return c.norm() + r; }

TestFunction sphere(Eigen::Index n) {
  TestFunction t;
  t.name = "sphere";
  t.dim = n;
  t.quadratic = true;
  t.eval = [](const Vec& x) { return x.squaredNorm(); };
  t.grad = [](const Vec& x) { return Vec(2.0 * x); };
  t.hess = [n](const Vec&) { return Mat(2.0 * Mat::Identity(n, n)); };
  t.lipschitz = [](const Vec& c, double r) {
    return LipschitzData{2.0, 0.0, 2.0 * outer_radius(c, r), r};
  };
  return t;
}

TestFunction rank_one(Eigen::Index n) {
  TestFunction t;
  t.name = "rankone";
  t.dim = n;
  t.quadratic = true;
  t.eval = [](const Vec& x) { return x.sum() * x.sum(); };
  t.grad = [n](const Vec& x) { return Vec(2.0 * x.sum() * Vec::Ones(n)); };
  t.hess = [n](const Vec&) { return Mat(2.0 * Mat::Ones(n, n)); };
  // |1'x| <= sqrt(n) ||x||, and ||2 * 1 1'|| = 2n.
  t.lipschitz = [n](const Vec& c, double r) {
    const double dn = static_cast<double>(n);
    return LipschitzData{2.0 * dn, 0.0, 2.0 * dn * outer_radius(c, r), r};
  };
  return t;
}

Mat quadratic_matrix(Eigen::Index n) {
  Mat a = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 3.0 + 0.5 * static_cast<double>(i);
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = 1.0;
  }
  return a;
}

Vec quadratic_vector(Eigen::Index n) {
  Vec b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = 0.5 - 0.25 * static_cast<double>(i);
  return b;
}

TestFunction convex_quadratic(Eigen::Index n) {
  const Mat a = quadratic_matrix(n);
  const Vec b = quadratic_vector(n);
  const double a_norm = matrix_norm(a, NormKind::kSpectral);
  TestFunction t;
  t.name = "quadratic";
  t.dim = n;
  t.quadratic = true;
  t.eval = [a, b](const Vec& x) { return 0.5 * x.dot(a * x) + b.dot(x); };
  t.grad = [a, b](const Vec& x) { return Vec(a * x + b); };
  t.hess = [a](const Vec&) { return a; };
  t.lipschitz = [a_norm, b](const Vec& c, double r) {
    return LipschitzData{a_norm, 0.0, a_norm * outer_radius(c, r) + b.norm(), r};
  };
  return t;
}

TestFunction quartic(Eigen::Index n) {
  TestFunction t;
  t.name = "quartic";
  t.dim = n;
  t.eval = [](const Vec& x) { return x.array().pow(4).sum(); };
  t.grad = [](const Vec& x) { return Vec(4.0 * x.array().cube().matrix()); };
  t.hess = [](const Vec& x) { return Mat((12.0 * x.array().square()).matrix().asDiagonal()); };
  // Hessian difference is diag(12 (x_i + y_i)(x_i - y_i)), so L_hess = 24 max m_i;
  // the gradient Jacobian is diag(12 x_i^2).
  t.lipschitz = [](const Vec& c, double r) {
    const Vec m = coordinate_bounds(c, r);
    const double mmax = m.maxCoeff();
    return LipschitzData{12.0 * mmax * mmax, 24.0 * mmax, 4.0 * std::sqrt(m.array().pow(6).sum()), r};
  };
  return t;
}

// Chained Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
TestFunction rosenbrock(Eigen::Index n) {
  TestFunction t;
  t.name = "rosenbrock";
  t.dim = n;
  t.eval = [n](const Vec& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double a = x(i + 1) - x(i) * x(i);
      const double b = 1.0 - x(i);
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  t.grad = [n](const Vec& x) {
    Vec g = Vec::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double a = x(i + 1) - x(i) * x(i);
      g(i) += -400.0 * x(i) * a - 2.0 * (1.0 - x(i));
      g(i + 1) += 200.0 * a;
    }
    return g;
  };
  t.hess = [n](const Vec& x) {
    Mat h = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      h(i, i) += 1200.0 * x(i) * x(i) - 400.0 * x(i + 1) + 2.0;
      h(i + 1, i + 1) += 200.0;
      h(i, i + 1) += -400.0 * x(i);
      h(i + 1, i) += -400.0 * x(i);
    }
    return h;
  };
  // With M = max m_i: the directional derivative of the Hessian along u has
  // entries 2400 x_i u_i - 400 u_{i+1} on the diagonal and -400 u_i off it, so
  // its Frobenius norm is at most sqrt(2 * 2400^2 M^2 + 4 * 400^2) ||u||.
  // The gradient constant is the largest absolute row sum of the Hessian.
  t.lipschitz = [n](const Vec& c, double r) {
    const double m = coordinate_bounds(c, r).maxCoeff();
    const double l_hess = std::sqrt(2.0 * 2400.0 * 2400.0 * m * m + 4.0 * 400.0 * 400.0);
    const double l_grad = 1200.0 * m * m + 1200.0 * m + 202.0;
    const double g_entry = 400.0 * m * (m + m * m) + 2.0 * (1.0 + m) + 200.0 * (m + m * m);
    return LipschitzData{l_grad, l_hess, std::sqrt(static_cast<double>(n)) * g_entry, r};
  };
  return t;
}

TestFunction trig(Eigen::Index n) {
  TestFunction t;
  t.name = "trig";
  t.dim = n;
  t.eval = [](const Vec& x) { return x.array().sin().sum(); };
  t.grad = [](const Vec& x) { return Vec(x.array().cos().matrix()); };
  t.hess = [](const Vec& x) { return Mat((-x.array().sin()).matrix().asDiagonal()); };
  // Diagonal Hessians with 1-Lipschitz entries, so both constants are 1.
  t.lipschitz = [n](const Vec&, double r) {
    return LipschitzData{1.0, 1.0, std::sqrt(static_cast<double>(n)), r};
  };
  return t;
}

TestFunction exponential(Eigen::Index n) {
  TestFunction t;
  t.name = "exponential";
  t.dim = n;
  t.eval = [](const Vec& x) { return std::exp(x.sum()); };
  t.grad = [n](const Vec& x) { return Vec(std::exp(x.sum()) * Vec::Ones(n)); };
  t.hess = [n](const Vec& x) { return Mat(std::exp(x.sum()) * Mat::Ones(n, n)); };
  // 1'x <= sum m_i on the ball; ||1 1'|| = n and |1'u| <= sqrt(n) ||u||.
  t.lipschitz = [n](const Vec& c, double r) {
    const double dn = static_cast<double>(n);
    const double e = std::exp(coordinate_bounds(c, r).sum());
    return LipschitzData{dn * e, dn * std::sqrt(dn) * e, std::sqrt(dn) * e, r};
  };
  return t;
}

}  // namespace

std::vector<std::string> function_names() {
  return {"sphere", "rankone", "quadratic", "quartic", "rosenbrock", "trig", "exponential"};
}

std::vector<TestFunction> registry(Eigen::Index n) {
  require(n >= 1, ErrorKind::kInvalidInput, "registry: dimension must be positive");
  std::vector<TestFunction> out{sphere(n), rank_one(n), convex_quadratic(n), quartic(n)};
  if (n >= 2) out.push_back(rosenbrock(n));
  out.push_back(trig(n));
  out.push_back(exponential(n));
  return out;
}

TestFunction find_function(const std::string& name, Eigen::Index n) {
  for (TestFunction& t : registry(n)) {
    if (t.name == name) return t;
  }
  if (name == "rosenbrock") fail(ErrorKind::kInvalidInput, "rosenbrock needs dimension >= 2");
  std::string known;
  for (const std::string& s : function_names()) known += (known.empty() ? "" : ", ") + s;
  fail(ErrorKind::kInvalidInput, "unknown function '" + name + "' (known: " + known + ")");
}

Vec generic_point(Eigen::Index n) {
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 0.35 * std::cos(1.3 * static_cast<double>(i + 1));
  return x;
}

FdCheck fd_check(const TestFunction& tf, const Vec& x, double h) {
  require(h > 0.0, ErrorKind::kInvalidInput, "fd_check: step must be positive");
  const Eigen::Index n = x.size();
  const Vec g = tf.grad(x);
  const Mat hs = tf.hess(x);
  FdCheck out;
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec xp = x;
    Vec xm = x;
    xp(i) += h;
    xm(i) -= h;
    const double fd = (tf.eval(xp) - tf.eval(xm)) / (2.0 * h);
    out.grad_err = std::max(out.grad_err, std::abs(fd - g(i)));
    const Vec col = (tf.grad(xp) - tf.grad(xm)) / (2.0 * h);
    out.hess_err = std::max(out.hess_err, (col - hs.col(i)).cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace dfoq
