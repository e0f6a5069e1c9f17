#pragma once

#include <vector>

#include "fvlab/chain.hpp"

namespace fvlab {

// QSD triple of a chain: pi is the left Perron vector of p_D, 1-lambda its
// spectral radius, gamma the gap to the rest of the spectrum.
struct SpectralData {
  Vec pi;
  double lambda = 0.0;
  double gamma = 0.0;          // kGapInfinity when |D| = 1
  double perron_residual = 0.0;  // ||P_D^T pi - (1-lambda) pi||_inf
};

SpectralData solve_qsd(const FiniteChain& chain);

// e^{t(M - I)} v by uniformization: Poisson-weighted powers of M, truncated
// when the remaining Poisson mass drops below 1e-14. Preserves nonnegativity
// and (sub)stochastic structure. Long horizons are split into fixed chunks.
Vec expm_markov_apply(const Mat& M, const Vec& v, double t);

// Q_t f = e^{t(P_D - I)} f.
Vec killed_semigroup(const FiniteChain& chain, const Vec& f, double t);

// Law of x_t conditioned on survival, started from mu.
Vec yaglom_conditional(const FiniteChain& chain, const Vec& mu, double t);

struct PiReturnProcess {
  FiniteChain chain;
  SpectralData spectral;
  Mat p_pi;  // p_D(x,y) + q(x) pi(y), row-stochastic with stationary law pi

  int k() const { return chain.k(); }
  Mat generator() const { return p_pi - Mat::Identity(p_pi.rows(), p_pi.cols()); }
};

PiReturnProcess build_pi_return(const FiniteChain& chain, const SpectralData& spec);

// P^pi_{t,D} f = e^{t(P^pi_D - I)} f.
Vec pi_semigroup(const PiReturnProcess& pr, const Vec& f, double t);

// (1/2) sum_{x,y} pi(x) p^pi(x,y) [f(y)-f(x)]^2.
double dirichlet_form(const PiReturnProcess& pr, const Vec& f);

// Symmetric bilinear polarization of the Dirichlet form.
double dirichlet_bilinear(const PiReturnProcess& pr, const Vec& f, const Vec& g);

double var_pi(const Vec& pi, const Vec& f);

struct DecayReport {
  double c_delta = 0.0;     // fitted constant, sup over the grid
  bool finite = true;
  bool stable = true;       // no growth trend across the grid
  bool trivial = false;     // f = 0
  std::vector<double> ratios;
};

// Checks the exponential decay bound max_x |P^pi_t f| <= C e^{-t(lambda+gamma-delta)} ||f||_inf
// over a time grid, for centered f.
DecayReport check_decay(const PiReturnProcess& pr, const Vec& f, double delta,
                        const std::vector<double>& t_grid);

}  // namespace fvlab
