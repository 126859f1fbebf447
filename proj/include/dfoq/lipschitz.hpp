#pragma once

namespace dfoq {

/// Smoothness constants of f valid on a ball of radius `region_radius`.
struct LipschitzData {
  double L_grad = 0.0;   // Lipschitz constant of the gradient
  double L_hess = 0.0;   // Lipschitz constant of the Hessian (spectral norm)
  double kappa_g = 0.0;  // bound on the gradient norm over the region
  double region_radius = 0.0;
};

}  // namespace dfoq
