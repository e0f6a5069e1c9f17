#include "fvlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fvlab {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double cdf = normal_cdf(sample[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return d;
}

double ks_pvalue(double d, double n_eff) {
  if (n_eff <= 0.0 || d <= 0.0) return 1.0;
  double x = (std::sqrt(n_eff) + 0.12 + 0.11 / std::sqrt(n_eff)) * d;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * x * x);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double integrated_autocorrelation(const std::vector<double>& series) {
  const auto n = series.size();
  if (n < 4) return 1.0;
  double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= n;
  if (c0 <= 0.0) return 1.0;
  double iat = 1.0;
  const std::size_t max_lag = n / 4;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += (series[i] - mean) * (series[i + lag] - mean);
    c /= n;
    double rho = c / c0;
    if (rho <= 0.0) break;
    iat += 2.0 * rho;
  }
  return std::max(iat, 1.0);
}

MeanEstimate mean_with_autocorr(const std::vector<double>& series) {
  MeanEstimate est;
  const auto n = static_cast<double>(series.size());
  if (series.empty()) return est;
  est.mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  est.iat = integrated_autocorrelation(series);
  est.ess = n / est.iat;
  double var = 0.0;
  for (double v : series) var += (v - est.mean) * (v - est.mean);
  var /= std::max(n - 1.0, 1.0);
  est.se = std::sqrt(var / std::max(est.ess, 1.0));
  return est;
}

double sample_variance(const std::vector<double>& series) {
  const auto n = static_cast<double>(series.size());
  if (series.size() < 2) return 0.0;
  double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  return var / (n - 1.0);
}

VarianceEstimate variance_block_jackknife(const std::vector<double>& series, int blocks) {
  VarianceEstimate est;
  est.value = sample_variance(series);
  const auto n = series.size();
  blocks = std::min<std::size_t>(blocks, n / 2);
  if (blocks < 2) return est;
  est.blocks = blocks;

  std::vector<double> leave_out(blocks);
  for (int b = 0; b < blocks; ++b) {
    std::size_t lo = n * b / blocks;
    std::size_t hi = n * (b + 1) / blocks;
    std::vector<double> rest;
    rest.reserve(n - (hi - lo));
    rest.insert(rest.end(), series.begin(), series.begin() + lo);
    rest.insert(rest.end(), series.begin() + hi, series.end());
    leave_out[b] = sample_variance(rest);
  }
  double mean_lo = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / blocks;
  double acc = 0.0;
  for (double v : leave_out) acc += (v - mean_lo) * (v - mean_lo);
  est.se = std::sqrt(acc * (blocks - 1.0) / blocks);
  return est;
}

}  // namespace fvlab
