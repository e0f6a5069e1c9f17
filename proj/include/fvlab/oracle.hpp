#pragma once

#include <Eigen/Sparse>
#include <map>
#include <vector>

#include "fvlab/covariance.hpp"

namespace fvlab {

// Complete enumeration of P^n(D): compositions of n into k parts,
// lexicographic order, with a count-vector -> id bijection.
struct SimplexLattice {
  int n = 0;
  int k = 0;
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, int> index;

  int size() const { return static_cast<int>(states.size()); }
  int id_of(const std::vector<int>& counts) const;
};

inline constexpr long kDefaultLatticeCap = 2'000'000;

SimplexLattice enumerate_simplex(int n, int k, long cap = kDefaultLatticeCap);

// Full rate matrix of the empirical-measure chain on the lattice:
// eta -> eta + theta^{x,y}/n at rate n eta(x) (p_D(x,y) + q(x) n eta(y)/(n-1)).
struct FVGeneratorMatrix {
  SimplexLattice lattice;
  Eigen::SparseMatrix<double> rates;  // row-indexed by source id, row sums 0
};

FVGeneratorMatrix build_fv_generator(const FiniteChain& chain, int n,
                                     long cap = kDefaultLatticeCap);

// Stationary distribution: nu G = 0, nu . 1 = 1, by direct linear solve.
Vec exact_stationary(const FVGeneratorMatrix& gen);

// Closed-form product stationary law for k = 2, where the count at the
// second state is a birth-death chain on {0, ..., n}. Independent of the
// linear-solve path; also usable beyond the lattice cap.
Vec birth_death_stationary(const FiniteChain& chain, int n);

// n E[(eta - pi)(eta - pi)^T] in reduced measure coordinates.
Mat exact_fluctuation_covariance(const FiniteChain& chain, const SpectralData& spec, int n,
                                 long cap = kDefaultLatticeCap);

// Exact E[<B0(eta-pi) + <eta-pi, q>(eta-pi), R(eta-pi)>] under the
// stationary law; the bound |value| <= C(R)/n is checked by the callers.
double check_moment_estimate(const FiniteChain& chain, const SpectralData& spec, int n,
                             const OperatorOnZeroSum& R, long cap = kDefaultLatticeCap);

struct VarianceConditionReport {
  double alpha = 0.0;  // max q - min q
  double gamma = 0.0;
  bool holds = false;  // alpha < gamma
};

VarianceConditionReport check_variance_condition(const FiniteChain& chain,
                                                 const SpectralData& spec);

// Second moment E ||eta - pi||^2 (l2 norm on weights) under the exact law.
double exact_second_moment(const FiniteChain& chain, const SpectralData& spec, int n,
                           long cap = kDefaultLatticeCap);

// Representable fluctuations xi = sqrt(n)(eta - pi) with ||xi||_2 <= radius,
// returned in reduced measure coordinates.
std::vector<Vec> representable_xis(const FiniteChain& chain, const SpectralData& spec, int n,
                                   double radius, long cap = kDefaultLatticeCap);

struct GeneratorComparison {
  double sup_diff = 0.0;
  int points = 0;
};

// sup over xi_list of |M^n psi(xi) - Mbar psi(xi)| for the quadratic
// psi(xi) = (1/2)<xi, R xi> + <xi, g>, with exact finite differences over
// the jump set.
GeneratorComparison compare_fluctuation_generators(const PiReturnProcess& pr, int n,
                                                   const OperatorOnZeroSum& R, const Vec& g,
                                                   const std::vector<Vec>& xi_list);

}  // namespace fvlab
