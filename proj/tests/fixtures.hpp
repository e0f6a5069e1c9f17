#pragma once

#include "fvlab/chain.hpp"
#include "fvlab/rng.hpp"

namespace fixtures {

// Symmetric two-state domain with uniform exit rate 1/2; the graveyard is a
// third absorbing state.
inline fvlab::FiniteChain chain_a() {
  fvlab::Mat p(3, 3);
  p << 0.0, 0.5, 0.5,
       0.5, 0.0, 0.5,
       0.0, 0.0, 1.0;
  return fvlab::build_chain(p, {"1", "2", "3"}, {"1", "2"});
}

// One-state domain with exit rate 0.3.
inline fvlab::FiniteChain chain_b() {
  fvlab::Mat p(2, 2);
  p << 0.7, 0.3,
       0.0, 1.0;
  return fvlab::build_chain(p, {"1", "2"}, {"1"});
}

// No killing: the two-state flip chain, D = E.
inline fvlab::FiniteChain chain_c() {
  fvlab::Mat p(2, 2);
  p << 0.0, 1.0,
       1.0, 0.0;
  return fvlab::build_chain(p, {"1", "2"}, {"1", "2"});
}

// Random irreducible chain: k domain states plus an absorbing graveyard,
// strictly positive weights on a full cycle so p_D is irreducible.
inline fvlab::FiniteChain random_irreducible_chain(fvlab::Rng& rng, int max_k = 20,
                                                   bool with_killing = true) {
  int k = 2 + static_cast<int>(rng.next_below(max_k - 1));
  bool killed = with_killing && rng.next_double() < 0.8;
  int m = k + (killed ? 1 : 0);
  fvlab::Mat p = fvlab::Mat::Zero(m, m);
  for (int x = 0; x < k; ++x) {
    std::vector<double> weights(m, 0.0);
    for (int y = 0; y < k; ++y) weights[y] = rng.next_double() * rng.next_double();
    weights[(x + 1) % k] += 0.3;  // guarantees a strongly connected support
    if (killed) weights[k] = 0.4 * rng.next_double();
    double total = 0.0;
    for (double w : weights) total += w;
    for (int y = 0; y < m; ++y) p(x, y) = weights[y] / total;
  }
  if (killed) p(k, k) = 1.0;
  std::vector<std::string> states, domain;
  for (int i = 0; i < m; ++i) states.push_back("s" + std::to_string(i));
  for (int i = 0; i < k; ++i) domain.push_back(states[i]);
  return fvlab::build_chain(p, states, domain);
}

// Random pi-centered function on D.
inline fvlab::Vec random_centered(fvlab::Rng& rng, const fvlab::Vec& pi) {
  fvlab::Vec f(pi.size());
  for (int i = 0; i < f.size(); ++i) f(i) = 2.0 * rng.next_double() - 1.0;
  return fvlab::project_zero_mean(f, pi);
}

inline const fvlab::Vec f0 = (fvlab::Vec(2) << 1.0, -1.0).finished();

}  // namespace fixtures
