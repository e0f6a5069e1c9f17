#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "fvlab/experiment.hpp"

using namespace fvlab;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

const char* kChainAJson = R"({
  "states": ["1", "2", "3"],
  "transition": [[0, 0.5, 0.5], [0.5, 0, 0.5], [0, 0, 1]],
  "domain": ["1", "2"]
})";

}  // namespace

TEST_CASE("normal_cdf reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.1586552539).epsilon(1e-6));
}

TEST_CASE("KS statistic and p-value") {
  // exact normal quantiles give a tiny statistic
  std::vector<double> quantiles;
  int n = 200;
  for (int i = 1; i <= n; ++i) {
    double p = (i - 0.5) / n;
    // bisection inverse of normal_cdf
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    quantiles.push_back(0.5 * (lo + hi));
  }
  double d_good = ks_statistic_normal(quantiles);
  CHECK(d_good < 0.01);
  CHECK(ks_pvalue(d_good, n) > 0.9);

  // a uniform sample is far from normal
  std::vector<double> uniform;
  for (int i = 0; i < n; ++i) uniform.push_back(static_cast<double>(i) / n);
  double d_bad = ks_statistic_normal(uniform);
  CHECK(d_bad > 0.2);
  CHECK(ks_pvalue(d_bad, n) < 1e-6);

  // p-value is decreasing in the statistic
  CHECK(ks_pvalue(0.05, 400) > ks_pvalue(0.10, 400));
}

TEST_CASE("gaussian sampler passes its own KS test") {
  Rng rng(2718);
  std::vector<double> sample;
  for (int i = 0; i < 5000; ++i) sample.push_back(rng.next_gaussian());
  double d = ks_statistic_normal(sample);
  CHECK(ks_pvalue(d, 5000.0) > 0.001);
}

TEST_CASE("autocorrelation and effective sample size") {
  Rng rng(11);
  std::vector<double> iid;
  for (int i = 0; i < 4000; ++i) iid.push_back(rng.next_gaussian());
  double iat_iid = integrated_autocorrelation(iid);
  CHECK(iat_iid == doctest::Approx(1.0).epsilon(0.15));

  // AR(1) with coefficient 0.8 has IAT (1+rho)/(1-rho) = 9
  std::vector<double> ar;
  double x = 0.0;
  for (int i = 0; i < 40000; ++i) {
    x = 0.8 * x + rng.next_gaussian();
    ar.push_back(x);
  }
  double iat_ar = integrated_autocorrelation(ar);
  CHECK(iat_ar == doctest::Approx(9.0).epsilon(0.25));

  auto est = mean_with_autocorr(ar);
  CHECK(est.ess < ar.size() / 4.0);
  CHECK(std::abs(est.mean) < 5.0 * est.se + 0.05);
}

TEST_CASE("variance with jackknife errors") {
  Rng rng(13);
  std::vector<double> sample;
  double sigma = 2.0;
  for (int i = 0; i < 20000; ++i) sample.push_back(sigma * rng.next_gaussian());
  auto est = variance_block_jackknife(sample, 50);
  CHECK(est.blocks == 50);
  CHECK(est.se > 0.0);
  CHECK(std::abs(est.value - sigma * sigma) < 4.0 * est.se);
  CHECK(est.value == doctest::Approx(sample_variance(sample)).epsilon(1e-9));
}

TEST_CASE("config parsing") {
  auto config = parse_config(R"({
    "chain": "chain.json",
    "n_list": [4, 8],
    "seed": 7,
    "samples": 500,
    "replicas": 4,
    "ks_alpha": 0.05
  })");
  CHECK(config.chain_path == "chain.json");
  CHECK(config.n_list == std::vector<int>{4, 8});
  CHECK(config.seed == 7);
  CHECK(config.samples == 500);
  CHECK(config.replicas == 4);
  CHECK(config.ks_alpha == doctest::Approx(0.05));
  CHECK(config.random_directions == 5);  // default

  CHECK_THROWS_AS(parse_config("{"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"chain": "x", "n_list": [2]})"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"chain": "x", "n_list": [], "seed": 1})"), InvalidParams);
  CHECK_THROWS_AS(parse_config(R"({"chain": "x", "n_list": [1], "seed": 1})"), InvalidParams);
}

TEST_CASE("test directions are centered and normalized") {
  auto chain = fixtures::chain_a();
  auto pr = build_pi_return(chain, solve_qsd(chain));
  auto K = covariance_lyapunov(pr);
  auto directions = test_directions(pr, K, 5, 99);
  CHECK(directions.size() == 6);  // 1 eigen-direction + 5 random
  for (const auto& f : directions) {
    CHECK(std::abs(pr.spectral.pi.dot(f)) < 1e-10);
    CHECK(f.lpNorm<Eigen::Infinity>() == doctest::Approx(1.0));
  }
}

TEST_CASE("run_experiment produces a complete report") {
  auto chain_path = write_temp("fvlab_test_chain_a.json", kChainAJson);
  auto out_dir = (std::filesystem::temp_directory_path() / "fvlab_test_report").string();
  std::filesystem::remove_all(out_dir);

  ExperimentConfig config;
  config.chain_path = chain_path;
  config.n_list = {16};
  config.samples = 400;
  config.replicas = 4;
  config.seed = 4242;
  config.random_directions = 2;
  config.out_dir = out_dir;
  auto result = run_experiment(config);

  const Json& report = result.report;
  CHECK(report["schema_version"] == 1);
  CHECK(report["qsd"]["lambda"].get<double>() == doctest::Approx(0.5));
  CHECK(report["covariance"]["routes_agree"] == true);
  REQUIRE(report["per_n"].size() == 1);
  CHECK(report["per_n"][0]["n"] == 16);
  CHECK(report["per_n"][0]["directions"].size() == 3);
  // exact oracle is available at k = 2, so the variance reference is exact
  CHECK(report["per_n"][0]["directions"][0]["reference_kind"] == "exact_oracle");

  CHECK(std::filesystem::exists(out_dir + "/report.json"));
  CHECK(std::filesystem::exists(out_dir + "/covariance_trend.csv"));

  // determinism: a rerun yields byte-identical output
  auto rerun = run_experiment(config);
  CHECK(rerun.report.dump() == report.dump());
}

TEST_CASE("run_experiment on a one-state domain is trivially green") {
  auto chain_path = write_temp("fvlab_test_chain_b.json", R"({
    "states": ["1", "2"],
    "transition": [[0.7, 0.3], [0, 1]],
    "domain": ["1"]
  })");
  ExperimentConfig config;
  config.chain_path = chain_path;
  config.n_list = {4};
  config.seed = 1;
  auto result = run_experiment(config);
  CHECK(result.all_pass);
  CHECK(result.report["per_n"].empty());
}

TEST_CASE("lln_check trends downward") {
  auto chain_path = write_temp("fvlab_test_chain_a.json", kChainAJson);
  ExperimentConfig config;
  config.chain_path = chain_path;
  config.n_list = {4, 32, 128};
  config.samples = 320;
  config.replicas = 4;
  config.seed = 31;
  auto result = lln_check(config);
  CHECK(result.all_pass);
  REQUIRE(result.report["per_n"].size() == 3);
  double first = result.report["per_n"][0]["l2_mean"].get<double>();
  double last = result.report["per_n"][2]["l2_mean"].get<double>();
  CHECK(last < first);
}
