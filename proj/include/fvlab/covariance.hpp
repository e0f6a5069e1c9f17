#pragma once

#include <string>
#include <vector>

#include "fvlab/reduced.hpp"

namespace fvlab {

// <N f, f> = sum_l c^l <zeta^l, f>^2, with the zeta^l in reduced measure
// coordinates.
struct SymmetricDecomposition {
  std::vector<Vec> vectors;
  Vec coefficients;
};

SymmetricDecomposition diagonalize_symmetric(const OperatorOnZeroSum& N);

struct DefinitenessCertificate {
  bool positive_definite = false;
  double c_N = 0.0;  // minimal eigenvalue under the l2 coordinate norm
};

DefinitenessCertificate is_positive_definite(const OperatorOnZeroSum& N);

enum class CovarianceRoute { lyapunov, integral };

struct CovarianceOperator {
  Mat reduced;  // symmetric (k-1)x(k-1), maps function coords to measure coords
  CovarianceRoute route = CovarianceRoute::lyapunov;
  double residual = 0.0;  // ||B K + K B^T + 2A||_inf for the lyapunov route
};

// Unique symmetric K with B K + K B^* + 2A = 0, via the vectorized
// Kronecker linear system (k is small).
CovarianceOperator solve_lyapunov(const OperatorOnZeroSum& B, const OperatorOnZeroSum& A);

// K through the Lyapunov route with B = B_0 and A = A^pi_D.
CovarianceOperator covariance_lyapunov(const PiReturnProcess& pr);

struct IntegralCovariance {
  double value = 0.0;          // Var_pi(f) + 2 lambda * integral, Q_s integrand
  double value_pi_route = 0.0; // same with the P^pi_{s,D} integrand
  double horizon = 0.0;        // truncation time T
};

// <K f, f> by quadrature of the CLT integral formula, for centered f.
// Both integrand variants are evaluated and must agree within 10*tol.
IntegralCovariance covariance_integral(const PiReturnProcess& pr, const Vec& f, double tol_quad);

// Finite-horizon variant <K_t f, f>; nondecreasing in t.
double covariance_finite_time(const PiReturnProcess& pr, const Vec& f, double t, double tol_quad);

// A^pi_D :: R = (1/2) sum_{x,y} pi(x) p^pi(x,y) <theta^{x,y}, R theta^{x,y}>.
double contract_dirichlet(const PiReturnProcess& pr, const OperatorOnZeroSum& R);

// Quadratic form <K f, f> for a full-dimensional f; rejects non-centered f.
double quadratic_form(const CovarianceOperator& K, const ReducedBasis& basis, const Vec& f);

}  // namespace fvlab
