#pragma once

#include "fvlab/spectral.hpp"

namespace fvlab {

// Coordinates on the (k-1)-dimensional zero-sum / zero-mean subspaces.
//
// Measure side: basis e_i = delta_{x_i} - delta_{x_0}, i = 1..k-1, so the
// coordinates of xi are simply its weights at the non-reference states.
// Function side: the dual basis g_i = 1_{x_i} - pi(x_i) 1, so the
// coordinates of a centered f are f(x_i) - f(x_0). With these choices the
// duality bracket <xi, f> is the plain dot product of coordinate vectors.
struct ReducedBasis {
  Vec pi;
  int reference_state = 0;  // fixed to index 0

  explicit ReducedBasis(Vec pi_) : pi(std::move(pi_)) {}

  int full_dim() const { return static_cast<int>(pi.size()); }
  int dim() const { return full_dim() - 1; }

  Vec restrict_measure(const Vec& xi) const;
  Vec lift_measure(const Vec& coords) const;
  Vec restrict_function(const Vec& f) const;
  Vec lift_function(const Vec& coords) const;
};

enum class BasisKind { measure_side, function_side };

// Linear map represented on the reduced subspaces; basis_kind tags the
// basis of the codomain.
struct OperatorOnZeroSum {
  Mat reduced;
  BasisKind basis_kind = BasisKind::measure_side;
  int reference_state = 0;

  int dim() const { return static_cast<int>(reduced.rows()); }
};

// B_0 = (P^pi_D)^* - (1-lambda) I on the zero-sum measure subspace. Every
// eigenvalue has real part <= -gamma.
OperatorOnZeroSum drift_operator(const PiReturnProcess& pr);

// Symmetric positive definite A^pi_D with <A f, f> = Dirichlet form of f.
OperatorOnZeroSum diffusion_operator(const PiReturnProcess& pr);

}  // namespace fvlab
