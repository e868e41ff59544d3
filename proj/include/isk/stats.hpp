#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace isk {

struct SampleSummary {
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stderr_of_mean = 0.0;
};

SampleSummary summarize(std::span<const double> xs);

double sample_skewness(std::span<const double> xs);
double sample_excess_kurtosis(std::span<const double> xs);

// Standard normal CDF and quantile function.
double normal_cdf(double x);
double normal_quantile(double p);

/// One-sample Kolmogorov-Smirnov test against the standard normal, applied to
/// already-standardized data. The p-value uses the asymptotic Kolmogorov
/// distribution with the small-sample correction of Stephens.
struct KsReport {
  double distance = 0.0;
  double p_value = 1.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool degenerate = false;  // zero variance: no test performed
};

KsReport ks_normal_test(std::span<const double> standardized);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

/// Time-series mean with blocked standard error; the block size grows until
/// the error estimate stabilizes. autocorr_time is the integrated
/// autocorrelation implied by the blocked/naive variance ratio.
struct BlockedEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::int64_t n = 0;
  double autocorr_time = 0.0;
  std::int64_t block_size = 1;
};

BlockedEstimate blocked_mean(std::span<const double> series);

}  // namespace isk
