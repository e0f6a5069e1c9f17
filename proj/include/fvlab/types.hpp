#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace fvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Project-wide tolerance table. The identities being checked are exact in
// the math; these constants only absorb floating-point accumulation.
namespace tol {
inline constexpr double row_sum = 1e-12;
inline constexpr double spectral = 1e-10;
inline constexpr double semigroup = 1e-9;
inline constexpr double lyapunov_residual = 1e-9;
inline constexpr double symmetry = 1e-12;
inline constexpr double support_zero = 1e-15;      // entries below this count as structural zeros
inline constexpr double route_agreement = 1e-6;    // relative, |K_lyap - K_int| <= tol*(1+|K|)
inline constexpr double mass_underflow = 1e-300;
}  // namespace tol

// Sentinel for the spectral gap of a one-state domain, where no second
// eigenvalue exists.
inline constexpr double kGapInfinity = std::numeric_limits<double>::infinity();

}  // namespace fvlab
