#pragma once

#include <json.hpp>

#include "fvlab/oracle.hpp"
#include "fvlab/simulate.hpp"
#include "fvlab/stats.hpp"

namespace fvlab {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string chain_path;
  std::vector<int> n_list;
  int samples = 2000;       // recorded samples per n (across all replicas)
  int replicas = 8;
  double burn_in = -1.0;    // < 0: module default
  double spacing = -1.0;
  std::uint64_t seed = 1;
  double route_tol = tol::route_agreement;
  double quad_tol = 1e-8;
  double ks_alpha = 0.01;
  int random_directions = 5;
  std::string out_dir;      // empty: no files written
  long lattice_cap = kDefaultLatticeCap;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ExperimentResult {
  Json report;
  bool all_pass = false;
};

// Full verification pipeline: QSD -> K by both routes -> exact oracle ->
// particle simulation -> fluctuation statistics and KS normality tests.
ExperimentResult run_experiment(const ExperimentConfig& config);

// E||eta - pi|| (l2 and total variation) per n, with the monotone-decrease
// trend check.
ExperimentResult lln_check(const ExperimentConfig& config);

// Centered test directions: eigenbasis of K plus seeded random ones.
std::vector<Vec> test_directions(const PiReturnProcess& pr, const CovarianceOperator& K,
                                 int random_count, std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace fvlab
