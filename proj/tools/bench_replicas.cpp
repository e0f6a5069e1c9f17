// Compares the serial reference replica runner against the OpenMP one on a
// synthetic chain, and verifies the outputs are bit-identical.

#include <chrono>
#include <iostream>

#ifdef FVLAB_HAVE_OPENMP
#include <omp.h>
#endif

#include "fvlab/simulate.hpp"

namespace {

fvlab::FiniteChain ring_chain(int k_domain) {
  // ring on k_domain states plus one graveyard state reached at rate 0.1
  int m = k_domain + 1;
  fvlab::Mat p = fvlab::Mat::Zero(m, m);
  std::vector<std::string> states;
  for (int i = 0; i < k_domain; ++i) {
    p(i, (i + 1) % k_domain) = 0.45;
    p(i, (i + k_domain - 1) % k_domain) = 0.45;
    p(i, k_domain) = 0.1;
    states.push_back("s" + std::to_string(i));
  }
  p(k_domain, k_domain) = 1.0;
  states.push_back("out");
  std::vector<std::string> domain(states.begin(), states.end() - 1);
  return fvlab::build_chain(p, states, domain);
}

}  // namespace

int main() {
  auto chain = ring_chain(8);
  auto spec = fvlab::solve_qsd(chain);

  fvlab::SimParams params;
  params.n = 512;
  params.samples = 400;
  params.seed = 42;
  const int replicas = 16;

  auto clock_now = [] { return std::chrono::steady_clock::now(); };
  auto seconds = [](auto a, auto b) {
    return std::chrono::duration<double>(b - a).count();
  };

  auto t0 = clock_now();
  auto serial = fvlab::sample_replicas_serial(chain, spec, params, replicas);
  auto t1 = clock_now();
  auto parallel = fvlab::sample_replicas_parallel(chain, spec, params, replicas);
  auto t2 = clock_now();

  bool identical = serial.size() == parallel.size();
  for (std::size_t r = 0; identical && r < serial.size(); ++r) {
    identical = serial[r].size() == parallel[r].size();
    for (std::size_t s = 0; identical && s < serial[r].size(); ++s)
      identical = serial[r][s].counts == parallel[r][s].counts;
  }

  double ts = seconds(t0, t1), tp = seconds(t1, t2);
  std::cout << "serial:   " << ts << " s\n";
  std::cout << "parallel: " << tp << " s";
#ifdef FVLAB_HAVE_OPENMP
  std::cout << "  (" << omp_get_max_threads() << " threads, speedup " << ts / tp << "x)";
#endif
  std::cout << "\nbit-identical: " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
