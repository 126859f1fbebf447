#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dfoq/linalg.hpp"
#include "dfoq/lipschitz.hpp"
#include "dfoq/oracle.hpp"

namespace dfoq {

/// Analytic objective with exact derivatives. `lipschitz(c, r)` returns
/// closed-form constants valid on the ball B(c, r).
struct TestFunction {
  std::string name;
  Eigen::Index dim = 0;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  std::function<LipschitzData(const Vec&, double)> lipschitz;
  bool quadratic = false;

  Oracle oracle(bool cache = true) const { return Oracle(eval, cache); }
};

/// Names of every registered function, in registry order.
std::vector<std::string> function_names();

/// All functions that exist in dimension n (Rosenbrock needs n >= 2).
std::vector<TestFunction> registry(Eigen::Index n);

/// Throws kInvalidInput for an unknown name or an unsupported dimension.
TestFunction find_function(const std::string& name, Eigen::Index n);

/// A fixed point with distinct nonzero coordinates, used where a generic
/// center is wanted.
Vec generic_point(Eigen::Index n);

struct FdCheck {
  double grad_err = 0.0;  // max |grad - central difference of eval|
  double hess_err = 0.0;  // max |hess - central difference of grad|
};

FdCheck fd_check(const TestFunction& tf, const Vec& x, double h);

}  // namespace dfoq
