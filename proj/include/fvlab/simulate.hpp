#pragma once

#include <cstdint>
#include <vector>

#include "fvlab/covariance.hpp"
#include "fvlab/rng.hpp"

namespace fvlab {

struct ParticleConfiguration {
  std::vector<int> positions;   // domain indices
  std::vector<int> counts;      // counts per domain state, kept in sync
  double time = 0.0;

  int n() const { return static_cast<int>(positions.size()); }
};

struct EmpiricalMeasure {
  std::vector<int> counts;
  int n = 0;

  Vec weights() const;
};

struct FluctuationSample {
  Vec xi;  // sqrt(n) (eta - pi), zero total mass
  int n = 0;
};

// Sampler for one row of the full transition matrix, with exits to E\D
// aggregated into a single outcome.
struct JumpTable {
  std::vector<double> cumulative;  // size k+1; last slot is the exit event
};

std::vector<JumpTable> build_jump_tables(const FiniteChain& chain);

enum class InitKind { iid_pi, uniform, point };

struct SimParams {
  int n = 2;
  double burn_in = -1.0;   // < 0 means the 20/gamma (1+ln n) default
  double spacing = -1.0;   // < 0 means the 5/gamma default
  int samples = 1;
  std::uint64_t seed = 0;
  InitKind init = InitKind::iid_pi;
  int init_state = 0;      // for InitKind::point
};

ParticleConfiguration initial_configuration(const FiniteChain& chain, const SpectralData& spec,
                                            const SimParams& params, Rng& rng);

// One exponential event of the n-particle dynamics: a uniformly chosen
// particle jumps along the full row p(x, .); exits resample onto a uniform
// one of the other n-1 particles.
void fv_step(const FiniteChain& chain, const std::vector<JumpTable>& tables,
             ParticleConfiguration& config, Rng& rng);

std::vector<EmpiricalMeasure> sample_stationary(const FiniteChain& chain,
                                                const SpectralData& spec,
                                                const SimParams& params);

// Replica batch: replica r uses the stream derived from (seed, r). The
// OpenMP variant must produce bit-identical output to the serial one.
std::vector<std::vector<EmpiricalMeasure>> sample_replicas_serial(
    const FiniteChain& chain, const SpectralData& spec, const SimParams& params, int replicas);
std::vector<std::vector<EmpiricalMeasure>> sample_replicas_parallel(
    const FiniteChain& chain, const SpectralData& spec, const SimParams& params, int replicas);

// Jump-chain trajectory of the pi-return process; returns (time, state) pairs.
struct Trajectory {
  std::vector<double> times;
  std::vector<int> states;
};

Trajectory simulate_pi_return(const PiReturnProcess& pr, double t_end, int x0,
                              std::uint64_t seed);

// Occupation fractions of a trajectory up to t_end.
Vec occupation_fractions(const Trajectory& traj, int k, double t_end);

struct OUState {
  Vec xi;  // reduced measure coordinates
  double time = 0.0;
};

// Euler-Maruyama for d xi = B0 xi dt + sum_l sqrt(2 c^l) zeta^l dw^l.
std::vector<OUState> simulate_ou(const OperatorOnZeroSum& B0,
                                 const SymmetricDecomposition& decomp, double dt, double t_end,
                                 std::uint64_t seed, const Vec& xi0);

FluctuationSample fluctuation(const EmpiricalMeasure& eta, const SpectralData& spec);

}  // namespace fvlab
