#pragma once

#include <vector>

namespace fvlab {

double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov statistic against the standard normal.
double ks_statistic_normal(std::vector<double> sample);

// Asymptotic Kolmogorov p-value for statistic d with n_eff samples.
double ks_pvalue(double d, double n_eff);

// Integrated autocorrelation time via the initial positive-sum rule.
double integrated_autocorrelation(const std::vector<double>& series);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;       // standard error using the effective sample size
  double ess = 0.0;
  double iat = 1.0;
};

MeanEstimate mean_with_autocorr(const std::vector<double>& series);

struct VarianceEstimate {
  double value = 0.0;
  double se = 0.0;      // block-jackknife standard error
  int blocks = 0;
};

// Sample variance of an autocorrelated series with a delete-one-block
// jackknife standard error.
VarianceEstimate variance_block_jackknife(const std::vector<double>& series, int blocks = 50);

double sample_variance(const std::vector<double>& series);

}  // namespace fvlab
