// End-to-end acceptance gate. Each criterion prints exactly one line:
//   [PASS] A<i>: <description>
//   [FAIL] A<i>: <description> -- <detail>
// The process exits 0 when every criterion passes and 2 otherwise.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "fvlab/experiment.hpp"

using namespace fvlab;

namespace {

bool g_all_pass = true;

void report(int index, const char* description, bool pass, const std::string& detail = "") {
  std::printf("[%s] A%d: %s%s%s\n", pass ? "PASS" : "FAIL", index, description,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  g_all_pass = g_all_pass && pass;
}

PiReturnProcess make_pr(const FiniteChain& chain) {
  return build_pi_return(chain, solve_qsd(chain));
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// A1: QSD exactness on the fixtures and 50 random chains.
void a1() {
  bool pass = true;
  std::string detail;
  Rng rng(101);
  std::vector<FiniteChain> chains = {fixtures::chain_a(), fixtures::chain_b(),
                                     fixtures::chain_c()};
  for (int i = 0; i < 50; ++i) chains.push_back(fixtures::random_irreducible_chain(rng, 20));
  for (const auto& chain : chains) {
    auto spec = solve_qsd(chain);
    double residual =
        (chain.p_D.transpose() * spec.pi - (1.0 - spec.lambda) * spec.pi).lpNorm<Eigen::Infinity>();
    double killing = std::abs(spec.pi.dot(chain.q) - spec.lambda);
    if (residual > 1e-10 || killing > 1e-10 || spec.pi.minCoeff() <= 0.0) {
      pass = false;
      detail = "residual=" + fmt(residual) + " killing_gap=" + fmt(killing) +
               " min_pi=" + fmt(spec.pi.minCoeff());
      break;
    }
  }
  report(1, "QSD exactness on fixtures and 50 random chains", pass, detail);
}

// A2: Lyapunov and integral routes agree on fixtures and random chains.
void a2() {
  bool pass = true;
  std::string detail;
  Rng rng(202);
  std::vector<FiniteChain> chains = {fixtures::chain_a(), fixtures::chain_c()};
  for (int i = 0; i < 8; ++i) chains.push_back(fixtures::random_irreducible_chain(rng, 7));
  for (const auto& chain : chains) {
    if (chain.k() < 2) continue;
    auto pr = make_pr(chain);
    auto K = covariance_lyapunov(pr);
    ReducedBasis basis(pr.spectral.pi);
    for (int d = 0; d < 20; ++d) {
      Vec f = fixtures::random_centered(rng, pr.spectral.pi);
      double lyap = quadratic_form(K, basis, f);
      double integral = covariance_integral(pr, f, 1e-9).value;
      double gap = std::abs(lyap - integral);
      if (gap > 1e-6 * (1.0 + std::abs(lyap))) {
        pass = false;
        detail = "k=" + std::to_string(chain.k()) + " lyapunov=" + fmt(lyap) +
                 " integral=" + fmt(integral);
      }
    }
  }
  report(2, "covariance routes agree within 1e-6 relative", pass, detail);
}

// A3: closed-form anchors for the symmetric two-state fixture.
void a3() {
  auto chain = fixtures::chain_a();
  auto spec = solve_qsd(chain);
  auto pr = build_pi_return(chain, spec);
  auto K = covariance_lyapunov(pr);
  ReducedBasis basis(spec.pi);
  double lyap = quadratic_form(K, basis, fixtures::f0);
  double integral = covariance_integral(pr, fixtures::f0, 1e-10).value;
  bool pass = std::abs(spec.lambda - 0.5) <= 1e-8 && std::abs(spec.gamma - 1.0) <= 1e-8 &&
              std::abs(spec.pi(0) - 0.5) <= 1e-8 && std::abs(spec.pi(1) - 0.5) <= 1e-8 &&
              std::abs(lyap - 1.5) <= 1e-8 && std::abs(integral - 1.5) <= 1e-8;
  report(3, "two-state anchor: lambda=1/2, gamma=1, pi uniform, <K f0,f0>=3/2",
         pass,
         pass ? "" : "lambda=" + fmt(spec.lambda) + " gamma=" + fmt(spec.gamma) +
                     " lyapunov=" + fmt(lyap) + " integral=" + fmt(integral));
}

// A4: without killing the covariance degenerates to the stationary variance.
void a4() {
  auto pr = make_pr(fixtures::chain_c());
  auto K = covariance_lyapunov(pr);
  ReducedBasis basis(pr.spectral.pi);
  Rng rng(404);
  bool pass = true;
  std::string detail;
  for (int d = 0; d < 20; ++d) {
    Vec f = fixtures::random_centered(rng, pr.spectral.pi);
    double form = quadratic_form(K, basis, f);
    double variance = var_pi(pr.spectral.pi, f);
    if (std::abs(form - variance) > 1e-10) {
      pass = false;
      detail = "form=" + fmt(form) + " var=" + fmt(variance);
    }
  }
  report(4, "lambda=0 degeneracy: <K f,f> = Var_pi(f)", pass, detail);
}

// A5: simulated lattice occupation frequencies match the exact stationary law.
void a5() {
  bool pass = true;
  std::string detail;

  Mat p3(4, 4);
  p3 << 0.2, 0.3, 0.3, 0.2,
        0.4, 0.1, 0.4, 0.1,
        0.3, 0.3, 0.3, 0.1,
        0.0, 0.0, 0.0, 1.0;
  auto three_state = build_chain(p3, {"a", "b", "c", "out"}, {"a", "b", "c"});

  struct Case {
    FiniteChain chain;
    int n;
  };
  std::vector<Case> cases = {{fixtures::chain_a(), 3}, {three_state, 4}};

  for (const auto& c : cases) {
    auto spec = solve_qsd(c.chain);
    auto gen = build_fv_generator(c.chain, c.n);
    Vec nu = exact_stationary(gen);

    SimParams params;
    params.n = c.n;
    params.samples = 120000;
    params.seed = 505;
    auto samples = sample_stationary(c.chain, spec, params);

    // occupation counts per lattice state, plus the autocorrelation of the
    // first coordinate to turn raw samples into an effective sample size
    std::vector<double> hits(gen.lattice.size(), 0.0);
    std::vector<double> coord_series;
    coord_series.reserve(samples.size());
    for (const auto& eta : samples) {
      hits[gen.lattice.id_of(eta.counts)] += 1.0;
      coord_series.push_back(static_cast<double>(eta.counts[0]));
    }
    double iat = integrated_autocorrelation(coord_series);
    double n_eff = static_cast<double>(samples.size()) / iat;
    if (n_eff < 1e5) {
      pass = false;
      detail = "effective samples " + fmt(n_eff) + " < 1e5";
      break;
    }
    for (int id = 0; id < gen.lattice.size(); ++id) {
      double freq = hits[id] / static_cast<double>(samples.size());
      double se = std::sqrt(std::max(nu(id) * (1.0 - nu(id)), 1e-12) / n_eff);
      if (std::abs(freq - nu(id)) > 4.0 * se) {
        pass = false;
        detail = "n=" + std::to_string(c.n) + " state " + std::to_string(id) +
                 ": freq=" + fmt(freq) + " exact=" + fmt(nu(id)) + " se=" + fmt(se);
      }
    }
  }
  report(5, "simulation matches the exact lattice law within 4 SE", pass, detail);
}

// A6: the exact finite-n covariance trends to the CLT covariance.
void a6() {
  auto chain = fixtures::chain_a();
  auto spec = solve_qsd(chain);
  ReducedBasis basis(spec.pi);
  Vec c = basis.restrict_function(fixtures::f0);

  bool pass = true;
  std::string detail;
  double target = 1.5;
  double previous_gap = 1e300;
  double last = 0.0;
  for (int n = 2; n <= 1024; n *= 2) {
    Mat cov = exact_fluctuation_covariance(chain, spec, n);
    last = c.dot(cov * c);
    double gap = std::abs(last - target);
    if (gap > previous_gap + 1e-12) {
      pass = false;
      detail = "distance grows at n=" + std::to_string(n);
    }
    previous_gap = gap;
  }
  if (std::abs(last - target) > 0.02 * target) {
    pass = false;
    detail = "value at n=1024 is " + fmt(last);
  }
  report(6, "exact covariance trend reaches 3/2 within 2% at n=1024", pass, detail);
}

// A7: n * moment estimate stays bounded in n.
void a7() {
  Mat p3(4, 4);
  p3 << 0.1, 0.4, 0.3, 0.2,
        0.3, 0.2, 0.4, 0.1,
        0.5, 0.2, 0.2, 0.1,
        0.0, 0.0, 0.0, 1.0;
  std::vector<FiniteChain> chains = {fixtures::chain_a(),
                                     build_chain(p3, {"a", "b", "c", "out"}, {"a", "b", "c"})};
  bool pass = true;
  std::string detail;
  for (const auto& chain : chains) {
    auto spec = solve_qsd(chain);
    int d = chain.k() - 1;
    OperatorOnZeroSum R{Mat::Identity(d, d), BasisKind::measure_side, 0};
    std::vector<double> scaled;
    for (int n = 2; n <= 64; n *= 2)
      scaled.push_back(n * std::abs(check_moment_estimate(chain, spec, n, R)));
    double early = *std::max_element(scaled.begin(), scaled.begin() + 3);
    double late = *std::max_element(scaled.end() - 3, scaled.end());
    if (late > 2.0 * early + 1e-9) {
      pass = false;
      detail = "k=" + std::to_string(chain.k()) + " early=" + fmt(early) + " late=" + fmt(late);
    }
  }
  report(7, "n * moment estimate shows no growth trend for n up to 64", pass, detail);
}

// A8: the empirical-fluctuation generator converges to its limit.
void a8() {
  auto chain = fixtures::chain_a();
  auto spec = solve_qsd(chain);
  auto pr = build_pi_return(chain, spec);
  OperatorOnZeroSum R{Mat::Identity(1, 1), BasisKind::measure_side, 0};
  Vec g = Vec::Constant(1, 0.5);
  bool pass = true;
  std::string detail;
  double first = 0.0, previous = 1e300;
  for (int n = 8; n <= 512; n *= 2) {
    auto xis = representable_xis(chain, spec, n, 3.0);
    auto cmp = compare_fluctuation_generators(pr, n, R, g, xis);
    // the representable set widens with n, so adjacent levels can tie
    // exactly; require non-increase per doubling and strict overall decrease
    if (cmp.sup_diff > previous + 1e-12) {
      pass = false;
      detail = "sup difference " + fmt(cmp.sup_diff) + " grew at n=" + std::to_string(n);
    }
    if (n == 8) first = cmp.sup_diff;
    previous = cmp.sup_diff;
  }
  if (!(previous < first)) {
    pass = false;
    detail = "no overall decrease: " + fmt(first) + " -> " + fmt(previous);
  }
  report(8, "fluctuation generator difference decreases as n doubles", pass, detail);
}

// A9: the limiting OU process reproduces the CLT variance.
void a9() {
  auto pr = make_pr(fixtures::chain_a());
  auto B0 = drift_operator(pr);
  auto decomp = diagonalize_symmetric(diffusion_operator(pr));
  const double dt = 1e-3, t_end = 1e4;
  auto path = simulate_ou(B0, decomp, dt, t_end, 909, Vec::Zero(1));

  ReducedBasis basis(pr.spectral.pi);
  Vec c = basis.restrict_function(fixtures::f0);
  std::size_t burn = static_cast<std::size_t>(path.size() / 20);
  std::vector<double> series;
  series.reserve(path.size() - burn);
  for (std::size_t i = burn; i < path.size(); ++i) series.push_back(c.dot(path[i].xi));

  double iat = integrated_autocorrelation(series);
  double n_eff = static_cast<double>(series.size()) / iat;
  double variance = sample_variance(series);
  double se = variance * std::sqrt(2.0 / n_eff);
  double tolerance = 3.0 * se + 5.0 * dt;
  bool pass = std::abs(variance - 1.5) <= tolerance;
  report(9, "OU stationary variance matches 3/2", pass,
         pass ? "" : "variance=" + fmt(variance) + " tolerance=" + fmt(tolerance));
}

// A10: full Monte Carlo pipeline at n=256 with normality testing.
void a10() {
  auto tmp = std::filesystem::temp_directory_path() / "fvlab_acceptance_chain.json";
  {
    std::ofstream out(tmp);
    out << R"({"states": ["1", "2", "3"],)"
        << R"( "transition": [[0, 0.5, 0.5], [0.5, 0, 0.5], [0, 0, 1]],)"
        << R"( "domain": ["1", "2"]})";
  }
  ExperimentConfig config;
  config.chain_path = tmp.string();
  config.n_list = {256};
  config.samples = 2720;
  config.replicas = 8;
  config.seed = 1010;
  auto result = run_experiment(config);

  const Json& entry = result.report["per_n"][0];
  double ess = entry["effective_samples"].get<double>();
  bool variance_ok = true, ks_ok = true;
  for (const auto& dir : entry["directions"]) {
    variance_ok = variance_ok && dir["variance_pass"].get<bool>();
    ks_ok = ks_ok && dir["ks_pass"].get<bool>();
  }
  bool pass = ess >= 2000.0 && variance_ok && ks_ok && result.all_pass;
  report(10, "Monte Carlo CLT at n=256: variance within 3 SE and KS not rejected", pass,
         pass ? "" : "ess=" + fmt(ess) + " variance_ok=" + std::to_string(variance_ok) +
                     " ks_ok=" + std::to_string(ks_ok));
}

// A11: exponential decay bound of the centered semigroup.
void a11() {
  std::vector<double> grid;
  for (int t = 0; t <= 10; ++t) grid.push_back(static_cast<double>(t));
  bool pass = true;
  std::string detail;

  for (const auto& chain : {fixtures::chain_a(), fixtures::chain_b(), fixtures::chain_c()}) {
    auto pr = make_pr(chain);
    Vec f;
    if (chain.k() == 1) {
      f = Vec::Zero(1);  // the only centered function on one state
    } else {
      f = fixtures::f0;
    }
    double delta = std::isinf(pr.spectral.gamma) ? 0.1 : pr.spectral.gamma / 10.0;
    auto decay = check_decay(pr, f, delta, grid);
    bool ok = decay.trivial || (decay.finite && decay.stable);
    if (!ok) {
      pass = false;
      detail = "k=" + std::to_string(chain.k()) + " C_delta=" + fmt(decay.c_delta);
    }
  }
  report(11, "semigroup decay bound holds at delta = gamma/10", pass, detail);
}

}  // namespace

int main() {
  a1();
  a2();
  a3();
  a4();
  a5();
  a6();
  a7();
  a8();
  a9();
  a10();
  a11();
  std::printf("%s\n", g_all_pass ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
  return g_all_pass ? 0 : 2;
}
