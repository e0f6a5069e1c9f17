#include "fvlab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace fvlab {

namespace {

// Dense spectrum of p_D; returns (spectral radius, gap to the rest).
std::pair<double, double> dense_gap(const Mat& p_D) {
  Eigen::EigenSolver<Mat> solver(p_D);
  if (solver.info() != Eigen::Success) throw EigenFailure("dense eigensolve failed");
  const auto& ev = solver.eigenvalues();
  int perron = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (ev(i).real() > ev(perron).real()) perron = i;
  double radius = ev(perron).real();
  if (ev.size() == 1) return {radius, kGapInfinity};
  double second = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < ev.size(); ++i)
    if (i != perron) second = std::max(second, ev(i).real());
  return {radius, radius - second};
}

Vec dense_left_perron(const Mat& p_D) {
  Eigen::EigenSolver<Mat> solver(p_D.transpose());
  if (solver.info() != Eigen::Success) throw EigenFailure("dense eigensolve failed");
  const auto& ev = solver.eigenvalues();
  int perron = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (ev(i).real() > ev(perron).real()) perron = i;
  Vec pi = solver.eigenvectors().col(perron).real();
  if (pi.sum() < 0.0) pi = -pi;
  double mass = pi.sum();
  if (mass <= 0.0) throw EigenFailure("Perron vector has nonpositive mass");
  return pi / mass;
}

}  // namespace

SpectralData solve_qsd(const FiniteChain& chain) {
  const int k = chain.k();
  SpectralData spec;

  if (k == 1) {
    spec.pi = Vec::Ones(1);
    spec.lambda = chain.q(0);
    spec.gamma = kGapInfinity;
    spec.perron_residual = 0.0;
    return spec;
  }

  auto [radius, gap] = dense_gap(chain.p_D);
  spec.lambda = 1.0 - radius;
  spec.gamma = gap;

  // Power iteration on P_D^T; Perron-Frobenius guarantees convergence for
  // primitive support. Periodic support stalls and falls back to the dense
  // left eigenvector.
  const Mat pt = chain.p_D.transpose();
  Vec v = Vec::Constant(k, 1.0 / k);
  bool converged = false;
  for (int it = 0; it < 100000; ++it) {
    Vec w = pt * v;
    double mass = w.sum();
    if (mass <= 0.0) break;
    w /= mass;
    double change = (w - v).lpNorm<Eigen::Infinity>();
    v = w;
    if (change < 1e-15) {
      converged = true;
      break;
    }
  }
  spec.pi = converged ? v : dense_left_perron(chain.p_D);

  spec.perron_residual = (pt * spec.pi - radius * spec.pi).lpNorm<Eigen::Infinity>();
  if (!converged && spec.perron_residual > tol::spectral)
    throw EigenFailure("QSD residual above tolerance");
  for (int i = 0; i < k; ++i)
    if (spec.pi(i) <= 0.0) throw EigenFailure("QSD has a nonpositive entry");
  return spec;
}

Vec expm_markov_apply(const Mat& M, const Vec& v, double t) {
  if (t < 0.0) throw NegativeTime("expm_markov_apply: t < 0");
  if (M.rows() != v.size()) throw DimensionMismatch("expm_markov_apply: size mismatch");
  constexpr double kChunk = 64.0;
  Vec result = v;
  double remaining = t;
  while (remaining > 0.0) {
    double dt = std::min(remaining, kChunk);
    remaining -= dt;
    // e^{dt(M-I)} result = e^{-dt} sum_m dt^m/m! M^m result.
    Vec term = result;
    Vec acc = term * std::exp(-dt);
    double weight = std::exp(-dt);  // Poisson(dt) mass at m = 0
    double cumulative = weight;
    for (int m = 1; cumulative < 1.0 - 1e-14; ++m) {
      term = M * term;
      weight *= dt / m;
      acc += weight * term;
      cumulative += weight;
      if (m > 100000) throw EigenFailure("uniformization did not truncate");
    }
    result = acc;
  }
  return result;
}

Vec killed_semigroup(const FiniteChain& chain, const Vec& f, double t) {
  if (t < 0.0) throw NegativeTime("killed_semigroup: t < 0");
  return expm_markov_apply(chain.p_D, f, t);
}

Vec yaglom_conditional(const FiniteChain& chain, const Vec& mu, double t) {
  if (t < 0.0) throw NegativeTime("yaglom_conditional: t < 0");
  Vec evolved = expm_markov_apply(chain.p_D.transpose(), mu, t);
  double mass = evolved.sum();
  if (mass < tol::mass_underflow) throw MassUnderflow("survival mass underflow");
  return evolved / mass;
}

PiReturnProcess build_pi_return(const FiniteChain& chain, const SpectralData& spec) {
  const int k = chain.k();
  if (spec.pi.size() != k) throw DimensionMismatch("build_pi_return: size mismatch");
  PiReturnProcess pr;
  pr.chain = chain;
  pr.spectral = spec;
  pr.p_pi = chain.p_D + chain.q * spec.pi.transpose();
  for (int i = 0; i < k; ++i) {
    double row = pr.p_pi.row(i).sum();
    if (std::abs(row - 1.0) > tol::row_sum)
      throw InconsistentSpectralData("pi-return row not stochastic");
  }
  double stat_residual = (pr.p_pi.transpose() * spec.pi - spec.pi).lpNorm<Eigen::Infinity>();
  if (stat_residual > tol::spectral)
    throw InconsistentSpectralData("pi fails stationarity under the pi-return kernel");
  return pr;
}

Vec pi_semigroup(const PiReturnProcess& pr, const Vec& f, double t) {
  if (t < 0.0) throw NegativeTime("pi_semigroup: t < 0");
  return expm_markov_apply(pr.p_pi, f, t);
}

double dirichlet_form(const PiReturnProcess& pr, const Vec& f) {
  return dirichlet_bilinear(pr, f, f);
}

double dirichlet_bilinear(const PiReturnProcess& pr, const Vec& f, const Vec& g) {
  const int k = pr.k();
  if (f.size() != k || g.size() != k) throw DimensionMismatch("dirichlet_form: size mismatch");
  double acc = 0.0;
  for (int x = 0; x < k; ++x)
    for (int y = 0; y < k; ++y)
      acc += pr.spectral.pi(x) * pr.p_pi(x, y) * (f(y) - f(x)) * (g(y) - g(x));
  return 0.5 * acc;
}

double var_pi(const Vec& pi, const Vec& f) {
  double mean = pi.dot(f);
  double acc = 0.0;
  for (int i = 0; i < pi.size(); ++i) acc += pi(i) * (f(i) - mean) * (f(i) - mean);
  return acc;
}

DecayReport check_decay(const PiReturnProcess& pr, const Vec& f, double delta,
                        const std::vector<double>& t_grid) {
  DecayReport report;
  double norm_f = f.lpNorm<Eigen::Infinity>();
  if (norm_f == 0.0) {
    report.trivial = true;
    return report;
  }
  if (std::abs(pr.spectral.pi.dot(f)) > tol::spectral)
    throw NotCentered("check_decay requires <pi, f> = 0");
  if (delta <= 0.0) throw InvalidParams("check_decay requires delta > 0");

  double rate = pr.spectral.lambda + pr.spectral.gamma - delta;
  for (double t : t_grid) {
    Vec ft = pi_semigroup(pr, f, t);
    double ratio = std::exp(t * rate) * ft.lpNorm<Eigen::Infinity>() / norm_f;
    report.ratios.push_back(ratio);
    if (!std::isfinite(ratio)) report.finite = false;
  }
  report.c_delta = *std::max_element(report.ratios.begin(), report.ratios.end());

  // Stability: the sup over the later half of the grid must not exceed the
  // sup over the earlier half (the true ratio decays like e^{-t delta}).
  std::size_t half = report.ratios.size() / 2;
  if (half > 0) {
    double early = *std::max_element(report.ratios.begin(), report.ratios.begin() + half);
    double late = *std::max_element(report.ratios.begin() + half, report.ratios.end());
    report.stable = late <= early * (1.0 + 1e-9) + 1e-12;
  }
  return report;
}

}  // namespace fvlab
