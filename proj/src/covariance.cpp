#include "fvlab/covariance.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace fvlab {

namespace {

void require_symmetric(const Mat& m, const char* who) {
  if ((m - m.transpose()).lpNorm<Eigen::Infinity>() > tol::symmetry)
    throw NotSymmetric(std::string(who) + ": operator is not symmetric");
}

// Composite Simpson on [0, T] with panel doubling until successive
// estimates differ by < tol/4. Fixed panel layout and ordered summation
// keep the result deterministic under parallel evaluation.
template <typename F>
double adaptive_simpson(F&& integrand, double T, double tol_quad) {
  if (T <= 0.0) return 0.0;
  double previous = 0.0;
  for (int panels = 8; panels <= (1 << 20); panels *= 2) {
    const double h = T / panels;
    std::vector<double> values(panels + 1);
#ifdef FVLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i <= panels; ++i) values[i] = integrand(i * h);
    double acc = values[0] + values[panels];
    for (int i = 1; i < panels; i += 2) acc += 4.0 * values[i];
    for (int i = 2; i < panels; i += 2) acc += 2.0 * values[i];
    double estimate = acc * h / 3.0;
    if (panels >= 32 && std::abs(estimate - previous) < tol_quad / 4.0) return estimate;
    previous = estimate;
  }
  return previous;
}

double truncation_horizon(const PiReturnProcess& pr, const Vec& f, double tol_quad) {
  const double gamma = pr.spectral.gamma;
  if (!(gamma > 0.0)) throw TailBoundFailure("spectral gap is not positive");
  if (std::isinf(gamma)) return 0.0;  // one-state domain, integrand vanishes
  const double delta = gamma / 10.0;
  // Tail of the integrand decays like e^{-2(gamma-delta)s}; pick T so the
  // remaining mass is below tol.
  const double scale = 1.0 + var_pi(pr.spectral.pi, f);
  return std::log(scale / tol_quad) / (2.0 * (gamma - delta));
}

}  // namespace

SymmetricDecomposition diagonalize_symmetric(const OperatorOnZeroSum& N) {
  require_symmetric(N.reduced, "diagonalize_symmetric");
  SymmetricDecomposition decomp;
  const int d = N.dim();
  decomp.coefficients = Vec(d);
  if (d == 0) return decomp;
  Eigen::SelfAdjointEigenSolver<Mat> solver(N.reduced);
  if (solver.info() != Eigen::Success) throw EigenFailure("symmetric eigensolve failed");
  decomp.coefficients = solver.eigenvalues();
  for (int l = 0; l < d; ++l) decomp.vectors.push_back(solver.eigenvectors().col(l));
  return decomp;
}

DefinitenessCertificate is_positive_definite(const OperatorOnZeroSum& N) {
  require_symmetric(N.reduced, "is_positive_definite");
  if (N.dim() == 0) return {true, kGapInfinity};  // vacuous on the trivial space
  Eigen::SelfAdjointEigenSolver<Mat> solver(N.reduced);
  if (solver.info() != Eigen::Success) throw EigenFailure("symmetric eigensolve failed");
  double min_eig = solver.eigenvalues().minCoeff();
  return {min_eig > tol::symmetry, min_eig};
}

CovarianceOperator solve_lyapunov(const OperatorOnZeroSum& B, const OperatorOnZeroSum& A) {
  require_symmetric(A.reduced, "solve_lyapunov");
  const int d = B.dim();
  if (A.dim() != d) throw DimensionMismatch("solve_lyapunov: operator sizes differ");
  CovarianceOperator K{Mat::Zero(d, d), CovarianceRoute::lyapunov, 0.0};
  if (d == 0) return K;

  Eigen::EigenSolver<Mat> spectrum(B.reduced);
  if (spectrum.info() != Eigen::Success) throw EigenFailure("drift eigensolve failed");
  for (int i = 0; i < d; ++i)
    if (spectrum.eigenvalues()(i).real() >= 0.0)
      throw UnstableDrift("drift has an eigenvalue with nonnegative real part");

  // vec form: (I (x) B + B (x) I) vec(K) = -2 vec(A).
  Mat system = Mat::Zero(d * d, d * d);
  const Mat id = Mat::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      system.block(i * d, j * d, d, d) = id(i, j) * B.reduced + B.reduced(i, j) * id;
  Vec rhs(d * d);
  for (int j = 0; j < d; ++j) rhs.segment(j * d, d) = -2.0 * A.reduced.col(j);

  Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible()) throw SingularSystem("Kronecker system is singular");
  Vec sol = lu.solve(rhs);
  for (int j = 0; j < d; ++j) K.reduced.col(j) = sol.segment(j * d, d);
  K.reduced = 0.5 * (K.reduced + K.reduced.transpose().eval());
  K.residual = (B.reduced * K.reduced + K.reduced * B.reduced.transpose() + 2.0 * A.reduced)
                   .lpNorm<Eigen::Infinity>();
  if (K.residual > tol::lyapunov_residual)
    throw SingularSystem("Lyapunov residual above tolerance");
  return K;
}

CovarianceOperator covariance_lyapunov(const PiReturnProcess& pr) {
  return solve_lyapunov(drift_operator(pr), diffusion_operator(pr));
}

IntegralCovariance covariance_integral(const PiReturnProcess& pr, const Vec& f, double tol_quad) {
  if (tol_quad <= 0.0) throw InvalidParams("covariance_integral: tol must be positive");
  const Vec& pi = pr.spectral.pi;
  if (std::abs(pi.dot(f)) > tol::spectral)
    throw NotCentered("covariance_integral requires <pi, f> = 0");

  IntegralCovariance out;
  const double base = var_pi(pi, f);
  const double lambda = pr.spectral.lambda;
  if (f.lpNorm<Eigen::Infinity>() == 0.0) return out;

  out.horizon = truncation_horizon(pr, f, tol_quad);
  auto q_integrand = [&](double s) {
    return std::exp(2.0 * lambda * s) * var_pi(pi, killed_semigroup(pr.chain, f, s));
  };
  auto pi_integrand = [&](double s) {
    return std::exp(2.0 * lambda * s) * var_pi(pi, pi_semigroup(pr, f, s));
  };
  out.value = base + 2.0 * lambda * adaptive_simpson(q_integrand, out.horizon, tol_quad);
  out.value_pi_route = base + 2.0 * lambda * adaptive_simpson(pi_integrand, out.horizon, tol_quad);
  if (std::abs(out.value - out.value_pi_route) > 10.0 * tol_quad)
    throw Error("covariance_integral: integrand variants disagree");
  return out;
}

double covariance_finite_time(const PiReturnProcess& pr, const Vec& f, double t, double tol_quad) {
  if (t < 0.0) throw NegativeTime("covariance_finite_time: t < 0");
  if (tol_quad <= 0.0) throw InvalidParams("covariance_finite_time: tol must be positive");
  const Vec& pi = pr.spectral.pi;
  if (std::abs(pi.dot(f)) > tol::spectral)
    throw NotCentered("covariance_finite_time requires <pi, f> = 0");
  const double lambda = pr.spectral.lambda;
  auto q_integrand = [&](double s) {
    return std::exp(2.0 * lambda * s) * var_pi(pi, killed_semigroup(pr.chain, f, s));
  };
  return var_pi(pi, f) + 2.0 * lambda * adaptive_simpson(q_integrand, t, tol_quad);
}

double contract_dirichlet(const PiReturnProcess& pr, const OperatorOnZeroSum& R) {
  require_symmetric(R.reduced, "contract_dirichlet");
  ReducedBasis basis(pr.spectral.pi);
  const int k = pr.k();
  if (R.dim() != basis.dim()) throw DimensionMismatch("contract_dirichlet: size mismatch");
  double acc = 0.0;
  for (int x = 0; x < k; ++x)
    for (int y = 0; y < k; ++y) {
      if (x == y) continue;
      Vec t = basis.restrict_measure(theta(pr.chain, x, y));
      acc += pr.spectral.pi(x) * pr.p_pi(x, y) * t.dot(R.reduced * t);
    }
  return 0.5 * acc;
}

double quadratic_form(const CovarianceOperator& K, const ReducedBasis& basis, const Vec& f) {
  if (std::abs(basis.pi.dot(f)) > tol::spectral)
    throw NotCentered("quadratic_form requires <pi, f> = 0");
  Vec c = basis.restrict_function(f);
  return c.dot(K.reduced * c);
}

}  // namespace fvlab
