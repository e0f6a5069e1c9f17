#include "fvlab/oracle.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <numeric>

namespace fvlab {

int SimplexLattice::id_of(const std::vector<int>& counts) const {
  auto it = index.find(counts);
  if (it == index.end()) throw InvalidParams("lattice: count vector not found");
  return it->second;
}

namespace {

long lattice_size(int n, int k) {
  // C(n+k-1, k-1), saturating at a large sentinel.
  long result = 1;
  for (int i = 1; i <= k - 1; ++i) {
    result = result * (n + i) / i;
    if (result > 100 * kDefaultLatticeCap) return result;
  }
  return result;
}

}  // namespace

SimplexLattice enumerate_simplex(int n, int k, long cap) {
  if (n < 2 || k < 1) throw InvalidParams("enumerate_simplex requires n >= 2, k >= 1");
  if (lattice_size(n, k) > cap) throw TooLarge("simplex lattice exceeds the configured cap");
  SimplexLattice lattice;
  lattice.n = n;
  lattice.k = k;
  std::vector<int> current(k, 0);
  // lexicographic recursion, iteratively
  std::function<void(int, int)> emit = [&](int pos, int remaining) {
    if (pos == k - 1) {
      current[pos] = remaining;
      lattice.index.emplace(current, lattice.size());
      lattice.states.push_back(current);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      current[pos] = c;
      emit(pos + 1, remaining - c);
    }
  };
  emit(0, n);
  return lattice;
}

FVGeneratorMatrix build_fv_generator(const FiniteChain& chain, int n, long cap) {
  const int k = chain.k();
  FVGeneratorMatrix gen;
  gen.lattice = enumerate_simplex(n, k, cap);
  const int m = gen.lattice.size();
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> next(k);
  for (int id = 0; id < m; ++id) {
    const auto& counts = gen.lattice.states[id];
    double out_rate = 0.0;
    for (int x = 0; x < k; ++x) {
      if (counts[x] == 0) continue;
      for (int y = 0; y < k; ++y) {
        if (y == x) continue;
        double rate = counts[x] * (chain.p_D(x, y) +
                                   chain.q(x) * static_cast<double>(counts[y]) / (n - 1));
        if (rate <= 0.0) continue;
        next = counts;
        --next[x];
        ++next[y];
        triplets.emplace_back(id, gen.lattice.id_of(next), rate);
        out_rate += rate;
      }
    }
    triplets.emplace_back(id, id, -out_rate);
  }
  gen.rates.resize(m, m);
  gen.rates.setFromTriplets(triplets.begin(), triplets.end());
  return gen;
}

Vec exact_stationary(const FVGeneratorMatrix& gen) {
  const int m = gen.lattice.size();
  if (m == 1) return Vec::Ones(1);
  // Solve G^T nu = 0 with the last balance equation replaced by sum = 1.
  Eigen::SparseMatrix<double> system = gen.rates.transpose();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < system.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(system, col); it; ++it)
      if (it.row() != m - 1) triplets.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < m; ++col) triplets.emplace_back(m - 1, col, 1.0);
  Eigen::SparseMatrix<double> modified(m, m);
  modified.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(modified);
  if (solver.info() != Eigen::Success) throw SingularSolve("stationary solve failed");
  Vec rhs = Vec::Zero(m);
  rhs(m - 1) = 1.0;
  Vec nu = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw SingularSolve("stationary solve failed");

  double residual = (gen.rates.transpose() * nu).lpNorm<Eigen::Infinity>();
  if (residual > tol::spectral) throw SingularSolve("stationary residual above tolerance");
  for (int i = 0; i < m; ++i)
    if (nu(i) < -tol::spectral) throw SingularSolve("stationary law has a negative entry");
  return nu.cwiseMax(0.0) / nu.cwiseMax(0.0).sum();
}

Vec birth_death_stationary(const FiniteChain& chain, int n) {
  if (chain.k() != 2) throw InvalidParams("birth-death fast path requires k = 2");
  // j = count at state 1. Birth j -> j+1 moves a particle from state 0;
  // death j -> j-1 moves one back. Detailed balance gives a product law.
  auto birth = [&](int j) {
    return (n - j) * (chain.p_D(0, 1) + chain.q(0) * static_cast<double>(j) / (n - 1));
  };
  auto death = [&](int j) {
    return j * (chain.p_D(1, 0) + chain.q(1) * static_cast<double>(n - j) / (n - 1));
  };
  Vec log_nu(n + 1);
  log_nu(0) = 0.0;
  for (int j = 1; j <= n; ++j) log_nu(j) = log_nu(j - 1) + std::log(birth(j - 1) / death(j));
  double peak = log_nu.maxCoeff();
  Vec nu = (log_nu.array() - peak).exp();
  return nu / nu.sum();
}

namespace {

// Expectation of a per-state functional under the exact stationary law,
// with the k = 2 birth-death specialization used beyond the lattice cap.
template <typename F>
double lattice_expectation(const FiniteChain& chain, int n, long cap, F&& functional) {
  const int k = chain.k();
  if (k == 2) {
    Vec nu = birth_death_stationary(chain, n);
    double acc = 0.0;
    std::vector<int> counts(2);
    for (int j = 0; j <= n; ++j) {
      counts[0] = n - j;
      counts[1] = j;
      acc += nu(j) * functional(counts);
    }
    return acc;
  }
  auto gen = build_fv_generator(chain, n, cap);
  Vec nu = exact_stationary(gen);
  double acc = 0.0;
  for (int id = 0; id < gen.lattice.size(); ++id)
    acc += nu(id) * functional(gen.lattice.states[id]);
  return acc;
}

Vec centered_weights(const std::vector<int>& counts, int n, const Vec& pi) {
  Vec w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    w(i) = static_cast<double>(counts[i]) / n - pi(i);
  return w;
}

}  // namespace

Mat exact_fluctuation_covariance(const FiniteChain& chain, const SpectralData& spec, int n,
                                 long cap) {
  ReducedBasis basis(spec.pi);
  const int d = basis.dim();
  Mat second = Mat::Zero(d, d);
  if (d == 0) return second;
  const int k = chain.k();

  auto accumulate = [&](const Vec& nu_like, auto&& counts_of, int m) {
    for (int id = 0; id < m; ++id) {
      Vec diff = centered_weights(counts_of(id), n, spec.pi);
      Vec coords = basis.restrict_measure(diff);
      second += nu_like(id) * coords * coords.transpose();
    }
  };

  if (k == 2) {
    Vec nu = birth_death_stationary(chain, n);
    std::vector<int> counts(2);
    accumulate(nu,
               [&](int j) -> const std::vector<int>& {
                 counts[0] = n - j;
                 counts[1] = j;
                 return counts;
               },
               n + 1);
  } else {
    auto gen = build_fv_generator(chain, n, cap);
    Vec nu = exact_stationary(gen);
    accumulate(nu, [&](int id) -> const std::vector<int>& { return gen.lattice.states[id]; },
               gen.lattice.size());
  }
  return static_cast<double>(n) * second;
}

double check_moment_estimate(const FiniteChain& chain, const SpectralData& spec, int n,
                             const OperatorOnZeroSum& R, long cap) {
  if ((R.reduced - R.reduced.transpose()).lpNorm<Eigen::Infinity>() > tol::symmetry)
    throw NotSymmetric("check_moment_estimate: R must be symmetric");
  ReducedBasis basis(spec.pi);
  if (basis.dim() == 0) return 0.0;
  auto pr = build_pi_return(chain, spec);
  auto B0 = drift_operator(pr);
  return lattice_expectation(chain, n, cap, [&](const std::vector<int>& counts) {
    Vec diff = centered_weights(counts, n, spec.pi);
    Vec d = basis.restrict_measure(diff);
    double exit_bracket = diff.dot(chain.q);
    Vec rho = B0.reduced * d + exit_bracket * d;
    return rho.dot(R.reduced * d);
  });
}

VarianceConditionReport check_variance_condition(const FiniteChain& chain,
                                                 const SpectralData& spec) {
  VarianceConditionReport report;
  report.alpha = chain.q.maxCoeff() - chain.q.minCoeff();
  report.gamma = spec.gamma;
  report.holds = report.alpha < report.gamma;
  return report;
}

double exact_second_moment(const FiniteChain& chain, const SpectralData& spec, int n, long cap) {
  return lattice_expectation(chain, n, cap, [&](const std::vector<int>& counts) {
    return centered_weights(counts, n, spec.pi).squaredNorm();
  });
}

std::vector<Vec> representable_xis(const FiniteChain& chain, const SpectralData& spec, int n,
                                   double radius, long cap) {
  ReducedBasis basis(spec.pi);
  std::vector<Vec> xis;
  const double root_n = std::sqrt(static_cast<double>(n));
  auto consider = [&](const std::vector<int>& counts) {
    Vec xi = root_n * centered_weights(counts, n, spec.pi);
    if (xi.norm() <= radius) xis.push_back(basis.restrict_measure(xi));
  };
  if (chain.k() == 2) {
    std::vector<int> counts(2);
    for (int j = 0; j <= n; ++j) {
      counts[0] = n - j;
      counts[1] = j;
      consider(counts);
    }
  } else {
    auto lattice = enumerate_simplex(n, chain.k(), cap);
    for (const auto& counts : lattice.states) consider(counts);
  }
  return xis;
}

GeneratorComparison compare_fluctuation_generators(const PiReturnProcess& pr, int n,
                                                   const OperatorOnZeroSum& R, const Vec& g,
                                                   const std::vector<Vec>& xi_list) {
  if ((R.reduced - R.reduced.transpose()).lpNorm<Eigen::Infinity>() > tol::symmetry)
    throw NotSymmetric("compare_fluctuation_generators: R must be symmetric");
  const FiniteChain& chain = pr.chain;
  const Vec& pi = pr.spectral.pi;
  ReducedBasis basis(pi);
  const int k = chain.k();
  const double root_n = std::sqrt(static_cast<double>(n));
  auto B0 = drift_operator(pr);
  const double diffusion_term = contract_dirichlet(pr, R);

  auto psi = [&](const Vec& d) { return 0.5 * d.dot(R.reduced * d) + d.dot(g); };

  GeneratorComparison result;
  for (const Vec& d : xi_list) {
    Vec xi = basis.lift_measure(d);
    // representability: eta = pi + xi/sqrt(n) must be a lattice point
    bool representable = true;
    for (int x = 0; x < k; ++x) {
      double count = (pi(x) + xi(x) / root_n) * n;
      if (count < -1e-9 || std::abs(count - std::round(count)) > 1e-6) representable = false;
    }
    if (!representable) throw NonRepresentableXi("xi is not sqrt(n)(eta - pi) for a lattice eta");

    double generator_n = 0.0;
    for (int x = 0; x < k; ++x) {
      double eta_x = pi(x) + xi(x) / root_n;
      if (eta_x <= 0.0) continue;
      for (int y = 0; y < k; ++y) {
        if (y == x) continue;
        double eta_y = pi(y) + xi(y) / root_n;
        double rate = n * eta_x *
                      (chain.p_D(x, y) + chain.q(x) * (static_cast<double>(n) / (n - 1)) * eta_y);
        if (rate <= 0.0) continue;
        Vec jump = basis.restrict_measure(theta(chain, x, y)) / root_n;
        generator_n += rate * (psi(d + jump) - psi(d));
      }
    }
    double generator_limit = (B0.reduced * d).dot(R.reduced * d + g) + diffusion_term;
    result.sup_diff = std::max(result.sup_diff, std::abs(generator_n - generator_limit));
    ++result.points;
  }
  return result;
}

}  // namespace fvlab
