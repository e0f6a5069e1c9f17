#include "fvlab/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fvlab {

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  ExperimentConfig config;
  if (!doc.contains("chain") || !doc.contains("n_list") || !doc.contains("seed"))
    throw ParseError("config must contain 'chain', 'n_list' and 'seed' (no wall-clock seeding)");
  config.chain_path = doc["chain"].get<std::string>();
  config.n_list = doc["n_list"].get<std::vector<int>>();
  if (config.n_list.empty()) throw InvalidParams("config: n_list must be nonempty");
  for (int n : config.n_list)
    if (n < 2) throw InvalidParams("config: every n must be >= 2");
  config.seed = doc["seed"].get<std::uint64_t>();
  config.samples = doc.value("samples", config.samples);
  config.replicas = doc.value("replicas", config.replicas);
  config.burn_in = doc.value("burn_in", config.burn_in);
  config.spacing = doc.value("spacing", config.spacing);
  config.route_tol = doc.value("route_tol", config.route_tol);
  config.quad_tol = doc.value("quad_tol", config.quad_tol);
  config.ks_alpha = doc.value("ks_alpha", config.ks_alpha);
  config.random_directions = doc.value("random_directions", config.random_directions);
  config.out_dir = doc.value("out_dir", config.out_dir);
  config.lattice_cap = doc.value("lattice_cap", config.lattice_cap);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportWriteFailure("cannot open for writing: " + path);
  out << content;
  if (!out) throw ReportWriteFailure("write failed: " + path);
}

std::vector<Vec> test_directions(const PiReturnProcess& pr, const CovarianceOperator& K,
                                 int random_count, std::uint64_t seed) {
  ReducedBasis basis(pr.spectral.pi);
  std::vector<Vec> directions;
  if (basis.dim() == 0) return directions;
  OperatorOnZeroSum k_op{K.reduced, BasisKind::measure_side, 0};
  auto decomp = diagonalize_symmetric(k_op);
  for (const auto& v : decomp.vectors) {
    Vec f = basis.lift_function(v);
    directions.push_back(f / f.lpNorm<Eigen::Infinity>());
  }
  Rng rng(seed, 0xd1cULL);
  for (int r = 0; r < random_count; ++r) {
    Vec f(basis.full_dim());
    for (int i = 0; i < f.size(); ++i) f(i) = 2.0 * rng.next_double() - 1.0;
    f = project_zero_mean(f, pr.spectral.pi);
    double norm = f.lpNorm<Eigen::Infinity>();
    if (norm < 1e-8) {
      --r;
      continue;
    }
    directions.push_back(f / norm);
  }
  return directions;
}

namespace {

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

bool oracle_available(const FiniteChain& chain, int n, long cap) {
  if (chain.k() == 2) return true;
  try {
    enumerate_simplex(n, chain.k(), cap);
    return true;
  } catch (const TooLarge&) {
    return false;
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  Json& report = result.report;
  report["schema_version"] = 1;
  report["seed"] = config.seed;

  FiniteChain chain = load_chain(config.chain_path);
  SpectralData spec = solve_qsd(chain);
  ReducedBasis basis(spec.pi);
  report["chain"] = {{"k", chain.k()}, {"states", chain.domain}};
  report["qsd"] = {{"lambda", spec.lambda},
                   {"gamma", std::isinf(spec.gamma) ? Json("inf") : Json(spec.gamma)},
                   {"pi", vec_to_json(spec.pi)},
                   {"perron_residual", spec.perron_residual}};

  bool all_pass = true;

  if (basis.dim() == 0) {
    // one-state domain: K = 0 and every statistical test is vacuous
    report["covariance"] = {{"K_lyapunov", Json::array()}, {"K_integral_quadratic_forms", Json::array()}};
    report["per_n"] = Json::array();
    report["all_pass"] = true;
    result.all_pass = true;
    if (!config.out_dir.empty()) {
      std::filesystem::create_directories(config.out_dir);
      write_text_file(config.out_dir + "/report.json", report.dump(2) + "\n");
    }
    return result;
  }

  PiReturnProcess pr = build_pi_return(chain, spec);
  CovarianceOperator K = covariance_lyapunov(pr);
  auto directions = test_directions(pr, K, config.random_directions, config.seed);
  const int num_dirs = static_cast<int>(directions.size());

  Json cov_json;
  cov_json["K_lyapunov"] = matrix_to_json(K.reduced);
  cov_json["lyapunov_residual"] = K.residual;

  // route agreement per direction
  Json route_json = Json::array();
  bool routes_agree = true;
  std::vector<double> k_quadratic(num_dirs);
  for (int d = 0; d < num_dirs; ++d) {
    double lyap = quadratic_form(K, basis, directions[d]);
    auto integral = covariance_integral(pr, directions[d], config.quad_tol);
    double delta = std::abs(lyap - integral.value);
    bool ok = delta <= config.route_tol * (1.0 + std::abs(lyap));
    routes_agree = routes_agree && ok;
    k_quadratic[d] = lyap;
    route_json.push_back({{"direction", d},
                          {"f", vec_to_json(directions[d])},
                          {"lyapunov", lyap},
                          {"integral", integral.value},
                          {"integral_pi_route", integral.value_pi_route},
                          {"delta", delta},
                          {"pass", ok}});
  }
  cov_json["route_agreement"] = route_json;
  cov_json["routes_agree"] = routes_agree;
  report["covariance"] = cov_json;
  all_pass = all_pass && routes_agree;

  std::ostringstream trend_csv;
  trend_csv << "n,direction,exact_quadratic,mc_variance,mc_se,mc_mean,mc_ess,ks_p\n";

  Json per_n = Json::array();
  for (int n : config.n_list) {
    Json entry;
    entry["n"] = n;

    const bool has_oracle = oracle_available(chain, n, config.lattice_cap);
    Mat exact_cov;
    std::vector<double> exact_quadratic(num_dirs, 0.0);
    if (has_oracle) {
      exact_cov = exact_fluctuation_covariance(chain, spec, n, config.lattice_cap);
      entry["exact_n_cov"] = matrix_to_json(exact_cov);
      for (int d = 0; d < num_dirs; ++d) {
        Vec c = basis.restrict_function(directions[d]);
        exact_quadratic[d] = c.dot(exact_cov * c);
      }
    }

    SimParams params;
    params.n = n;
    params.burn_in = config.burn_in;
    params.spacing = config.spacing;
    params.samples = std::max(1, config.samples / std::max(1, config.replicas));
    params.seed = config.seed;
    auto replicas = sample_replicas_parallel(chain, spec, params, config.replicas);

    // per-direction projection series, replica-major order
    std::vector<std::vector<double>> series(num_dirs);
    double iat_sum = 0.0;
    int iat_count = 0;
    for (const auto& replica : replicas) {
      std::vector<std::vector<double>> local(num_dirs);
      for (const auto& eta : replica) {
        auto sample = fluctuation(eta, spec);
        Vec coords = basis.restrict_measure(sample.xi);
        for (int d = 0; d < num_dirs; ++d) {
          double value = coords.dot(basis.restrict_function(directions[d]));
          local[d].push_back(value);
          series[d].push_back(value);
        }
      }
      for (int d = 0; d < num_dirs; ++d) {
        iat_sum += integrated_autocorrelation(local[d]);
        ++iat_count;
      }
    }
    double mean_iat = iat_count > 0 ? iat_sum / iat_count : 1.0;
    double total_samples = static_cast<double>(series.empty() ? 0 : series[0].size());
    double ess = total_samples / std::max(1.0, mean_iat);
    entry["mean_iat"] = mean_iat;
    entry["effective_samples"] = ess;

    Json dir_json = Json::array();
    bool n_pass = true;
    const double bonferroni = config.ks_alpha / std::max(1, num_dirs);
    for (int d = 0; d < num_dirs; ++d) {
      auto var_est = variance_block_jackknife(series[d], config.replicas >= 8 ? config.replicas : 50);
      auto mean_est = mean_with_autocorr(series[d]);

      double reference = has_oracle ? exact_quadratic[d] : k_quadratic[d];
      bool var_ok = std::abs(var_est.value - reference) <= 3.0 * var_est.se + 1e-12;

      double sigma = std::sqrt(std::max(k_quadratic[d], 1e-300));
      std::vector<double> standardized = series[d];
      for (double& v : standardized) v /= sigma;
      double ks_d = ks_statistic_normal(standardized);
      double ks_p = ks_pvalue(ks_d, ess);
      bool ks_ok = ks_p >= bonferroni;

      n_pass = n_pass && var_ok && ks_ok;
      dir_json.push_back({{"direction", d},
                          {"mc_variance", var_est.value},
                          {"mc_variance_se", var_est.se},
                          {"mc_mean", mean_est.mean},
                          {"mc_mean_se", mean_est.se},
                          {"reference", reference},
                          {"reference_kind", has_oracle ? "exact_oracle" : "K_lyapunov"},
                          {"variance_pass", var_ok},
                          {"ks_statistic", ks_d},
                          {"ks_p", ks_p},
                          {"ks_threshold", bonferroni},
                          {"ks_pass", ks_ok}});
      trend_csv << n << ',' << d << ',' << reference << ',' << var_est.value << ','
                << var_est.se << ',' << mean_est.mean << ',' << ess << ',' << ks_p << "\n";
    }
    entry["directions"] = dir_json;
    entry["pass"] = n_pass;
    all_pass = all_pass && n_pass;
    per_n.push_back(entry);
  }
  report["per_n"] = per_n;
  report["all_pass"] = all_pass;
  result.all_pass = all_pass;

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_text_file(config.out_dir + "/report.json", report.dump(2) + "\n");
    write_text_file(config.out_dir + "/covariance_trend.csv", trend_csv.str());
  }
  return result;
}

ExperimentResult lln_check(const ExperimentConfig& config) {
  ExperimentResult result;
  Json& report = result.report;
  report["schema_version"] = 1;
  report["seed"] = config.seed;
  report["check"] = "lln";

  FiniteChain chain = load_chain(config.chain_path);
  SpectralData spec = solve_qsd(chain);

  struct Row {
    int n;
    MeanEstimate l2, tv;
  };
  std::vector<Row> rows;
  for (int n : config.n_list) {
    SimParams params;
    params.n = n;
    params.burn_in = config.burn_in;
    params.spacing = config.spacing;
    params.samples = std::max(1, config.samples / std::max(1, config.replicas));
    params.seed = config.seed;
    auto replicas = sample_replicas_parallel(chain, spec, params, config.replicas);
    std::vector<double> l2_series, tv_series;
    for (const auto& replica : replicas)
      for (const auto& eta : replica) {
        Vec diff = eta.weights() - spec.pi;
        l2_series.push_back(diff.norm());
        tv_series.push_back(0.5 * diff.lpNorm<1>());
      }
    rows.push_back({n, mean_with_autocorr(l2_series), mean_with_autocorr(tv_series)});
  }

  bool monotone = true;
  Json per_n = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      double slack = 3.0 * (rows[i].l2.se + rows[i - 1].l2.se);
      monotone = monotone && rows[i].l2.mean <= rows[i - 1].l2.mean + slack;
    }
    per_n.push_back({{"n", rows[i].n},
                     {"l2_mean", rows[i].l2.mean},
                     {"l2_se", rows[i].l2.se},
                     {"tv_mean", rows[i].tv.mean},
                     {"tv_se", rows[i].tv.se},
                     {"ess", rows[i].l2.ess}});
  }
  report["per_n"] = per_n;
  report["monotone_decrease"] = monotone;
  result.all_pass = monotone;

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_text_file(config.out_dir + "/lln.json", report.dump(2) + "\n");
    std::ostringstream csv;
    csv << "n,l2_mean,l2_se,tv_mean,tv_se\n";
    for (const auto& row : rows)
      csv << row.n << ',' << row.l2.mean << ',' << row.l2.se << ',' << row.tv.mean << ','
          << row.tv.se << "\n";
    write_text_file(config.out_dir + "/lln.csv", csv.str());
  }
  return result;
}

}  // namespace fvlab
