#include "fvlab/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace fvlab {

Vec EmpiricalMeasure::weights() const {
  Vec w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w(i) = static_cast<double>(counts[i]) / n;
  return w;
}

std::vector<JumpTable> build_jump_tables(const FiniteChain& chain) {
  const int k = chain.k();
  std::vector<JumpTable> tables(k);
  for (int x = 0; x < k; ++x) {
    auto& cum = tables[x].cumulative;
    cum.resize(k + 1);
    double acc = 0.0;
    for (int y = 0; y < k; ++y) {
      acc += chain.p_D(x, y);
      cum[y] = acc;
    }
    cum[k] = 1.0;  // exit event absorbs the remaining q(x) mass
  }
  return tables;
}

ParticleConfiguration initial_configuration(const FiniteChain& chain, const SpectralData& spec,
                                            const SimParams& params, Rng& rng) {
  const int k = chain.k();
  ParticleConfiguration config;
  config.positions.resize(params.n);
  config.counts.assign(k, 0);
  std::vector<double> cum(k);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += spec.pi(i);
    cum[i] = acc;
  }
  for (int p = 0; p < params.n; ++p) {
    int state = 0;
    switch (params.init) {
      case InitKind::iid_pi: {
        double u = rng.next_double();
        state = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        state = std::min(state, k - 1);
        break;
      }
      case InitKind::uniform:
        state = static_cast<int>(rng.next_below(k));
        break;
      case InitKind::point:
        state = params.init_state;
        break;
    }
    config.positions[p] = state;
    ++config.counts[state];
  }
  return config;
}

void fv_step(const FiniteChain& chain, const std::vector<JumpTable>& tables,
             ParticleConfiguration& config, Rng& rng) {
  const int n = config.n();
  const int k = chain.k();
  // Every particle carries total rate 1 (self-loops and exit attempts
  // included), so the aggregate clock rings at rate n.
  config.time += rng.next_exponential(static_cast<double>(n));
  int p = static_cast<int>(rng.next_below(n));
  int x = config.positions[p];
  const auto& cum = tables[x].cumulative;
  double u = rng.next_double();
  int outcome = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  int dest;
  if (outcome < k) {
    dest = outcome;  // possibly a self-loop no-op
  } else {
    // exit attempt: adopt the position of one of the other n-1 particles
    int other = static_cast<int>(rng.next_below(n - 1));
    if (other >= p) ++other;
    dest = config.positions[other];
  }
  if (dest != x) {
    --config.counts[x];
    ++config.counts[dest];
    config.positions[p] = dest;
  }
}

namespace {

double default_burn_in(const SpectralData& spec, int n) {
  double gamma = std::isinf(spec.gamma) ? 1.0 : spec.gamma;
  return 20.0 / gamma * (1.0 + std::log(static_cast<double>(n)));
}

double default_spacing(const SpectralData& spec) {
  double gamma = std::isinf(spec.gamma) ? 1.0 : spec.gamma;
  return 5.0 / gamma;
}

std::vector<EmpiricalMeasure> sample_one_stream(const FiniteChain& chain,
                                                const SpectralData& spec,
                                                const SimParams& params,
                                                std::uint64_t stream) {
  if (params.n < 2) throw InvalidParams("sample_stationary requires n >= 2");
  if (params.samples < 1) throw InvalidParams("sample_stationary requires samples >= 1");
  double burn_in = params.burn_in >= 0.0 ? params.burn_in : default_burn_in(spec, params.n);
  double spacing = params.spacing >= 0.0 ? params.spacing : default_spacing(spec);

  Rng rng(params.seed, stream);
  auto tables = build_jump_tables(chain);
  auto config = initial_configuration(chain, spec, params, rng);

  std::vector<EmpiricalMeasure> out;
  out.reserve(params.samples);
  double next_record = burn_in;
  while (static_cast<int>(out.size()) < params.samples) {
    while (config.time < next_record) fv_step(chain, tables, config, rng);
    out.push_back(EmpiricalMeasure{config.counts, params.n});
    next_record += spacing;
    if (spacing == 0.0) {
      // degenerate spacing: record the same configuration
      while (static_cast<int>(out.size()) < params.samples)
        out.push_back(EmpiricalMeasure{config.counts, params.n});
    }
  }
  return out;
}

}  // namespace

std::vector<EmpiricalMeasure> sample_stationary(const FiniteChain& chain,
                                                const SpectralData& spec,
                                                const SimParams& params) {
  return sample_one_stream(chain, spec, params, 0);
}

std::vector<std::vector<EmpiricalMeasure>> sample_replicas_serial(
    const FiniteChain& chain, const SpectralData& spec, const SimParams& params, int replicas) {
  std::vector<std::vector<EmpiricalMeasure>> out(replicas);
  for (int r = 0; r < replicas; ++r) out[r] = sample_one_stream(chain, spec, params, r);
  return out;
}

std::vector<std::vector<EmpiricalMeasure>> sample_replicas_parallel(
    const FiniteChain& chain, const SpectralData& spec, const SimParams& params, int replicas) {
  std::vector<std::vector<EmpiricalMeasure>> out(replicas);
#ifdef FVLAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int r = 0; r < replicas; ++r) out[r] = sample_one_stream(chain, spec, params, r);
  return out;
}

Trajectory simulate_pi_return(const PiReturnProcess& pr, double t_end, int x0,
                              std::uint64_t seed) {
  if (t_end < 0.0) throw NegativeTime("simulate_pi_return: t_end < 0");
  const int k = pr.k();
  if (x0 < 0 || x0 >= k) throw StateNotInDomain("simulate_pi_return: bad start state");
  Rng rng(seed, 0);
  std::vector<std::vector<double>> cum(k, std::vector<double>(k));
  for (int x = 0; x < k; ++x) {
    double acc = 0.0;
    for (int y = 0; y < k; ++y) {
      acc += pr.p_pi(x, y);
      cum[x][y] = acc;
    }
    cum[x][k - 1] = 1.0;
  }
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  double t = 0.0;
  int x = x0;
  for (;;) {
    t += rng.next_exponential(1.0);  // per-state total rate is 1
    if (t > t_end) break;
    double u = rng.next_double();
    int y = static_cast<int>(std::lower_bound(cum[x].begin(), cum[x].end(), u) - cum[x].begin());
    y = std::min(y, k - 1);
    if (y != x) {
      traj.times.push_back(t);
      traj.states.push_back(y);
      x = y;
    }
  }
  return traj;
}

Vec occupation_fractions(const Trajectory& traj, int k, double t_end) {
  Vec occupation = Vec::Zero(k);
  if (t_end <= 0.0 || traj.times.empty()) {
    if (!traj.states.empty()) occupation(traj.states.front()) = 1.0;
    return occupation;
  }
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    double stop = (i + 1 < traj.times.size()) ? traj.times[i + 1] : t_end;
    occupation(traj.states[i]) += stop - traj.times[i];
  }
  return occupation / t_end;
}

std::vector<OUState> simulate_ou(const OperatorOnZeroSum& B0,
                                 const SymmetricDecomposition& decomp, double dt, double t_end,
                                 std::uint64_t seed, const Vec& xi0) {
  if (dt <= 0.0) throw InvalidStepSize("simulate_ou requires dt > 0");
  if (t_end < 0.0) throw NegativeTime("simulate_ou: t_end < 0");
  const int d = B0.dim();
  for (int l = 0; l < decomp.coefficients.size(); ++l)
    if (decomp.coefficients(l) < 0.0)
      throw InvalidParams("simulate_ou requires nonnegative noise coefficients");
  Rng rng(seed, 0);
  std::vector<OUState> states;
  const auto steps = static_cast<std::int64_t>(std::floor(t_end / dt + 0.5));
  states.reserve(static_cast<std::size_t>(steps) + 1);
  Vec xi = xi0;
  states.push_back({xi, 0.0});
  std::vector<Vec> noise_dirs;
  for (int l = 0; l < d; ++l)
    noise_dirs.push_back(std::sqrt(2.0 * decomp.coefficients(l) * dt) * decomp.vectors[l]);
  for (std::int64_t s = 1; s <= steps; ++s) {
    Vec drift = B0.reduced * xi * dt;
    xi += drift;
    for (int l = 0; l < d; ++l) xi += noise_dirs[l] * rng.next_gaussian();
    states.push_back({xi, s * dt});
  }
  return states;
}

FluctuationSample fluctuation(const EmpiricalMeasure& eta, const SpectralData& spec) {
  if (static_cast<int>(eta.counts.size()) != spec.pi.size())
    throw DimensionMismatch("fluctuation: size mismatch");
  FluctuationSample sample;
  sample.n = eta.n;
  sample.xi = std::sqrt(static_cast<double>(eta.n)) * (eta.weights() - spec.pi);
  return sample;
}

}  // namespace fvlab
