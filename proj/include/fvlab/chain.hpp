#pragma once

#include <string>
#include <vector>

#include "fvlab/errors.hpp"
#include "fvlab/types.hpp"

namespace fvlab {

// Finite-state chain with a distinguished domain D. State labels are mapped
// to dense indices in declaration order; all vectors and matrices below are
// index-based. Immutable after construction.
struct FiniteChain {
  std::vector<std::string> states;        // labels of E
  Mat transition;                         // row-stochastic p(x,y) on E
  std::vector<std::string> domain;        // labels of D, subset of states
  std::vector<int> domain_index;          // index in E of each domain state
  Mat p_D;                                // restriction of transition to D x D
  Vec q;                                  // exit rates, q(x) = sum_{y not in D} p(x,y)

  int k() const { return static_cast<int>(domain.size()); }
};

// Validates stochasticity, restricts to D, computes q and checks strong
// connectivity of the support of p_D.
FiniteChain build_chain(const Mat& transition, const std::vector<std::string>& states,
                        const std::vector<std::string>& domain_labels);

// Parses the chain JSON document: {"states": [...], "transition": [[...]], "domain": [...]}.
FiniteChain load_chain(const std::string& path);
FiniteChain parse_chain(const std::string& json_text);

// Duality bracket <rho, f> = sum_x rho(x) f(x).
double bracket(const Vec& rho, const Vec& f);

// Elementary zero-sum measure theta^{x,y}(z) = 1{y=z} - 1{x=z} on D.
Vec theta(const FiniteChain& chain, int x, int y);

// f - <pi, f> 1; the result is pi-centered.
Vec project_zero_mean(const Vec& f, const Vec& pi);

// xi - <xi, 1> pi; the result has zero total mass. The projection is taken
// along R*pi, matching the direct-sum decomposition of the measure space.
Vec project_zero_sum(const Vec& xi, const Vec& pi);

bool strongly_connected(const Mat& support);

}  // namespace fvlab
