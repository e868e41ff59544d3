#include "isk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isk {

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = static_cast<std::int64_t>(xs.size());
  if (s.n == 0) return s;
  double acc = 0;
  for (double x : xs) acc += x;
  s.mean = acc / s.n;
  if (s.n < 2) return s;
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = ss / (s.n - 1);
  s.stderr_of_mean = std::sqrt(s.variance / s.n);
  return s;
}

namespace {

double central_moment(std::span<const double> xs, double mean, int order) {
  double acc = 0;
  for (double x : xs) acc += std::pow(x - mean, order);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

double sample_skewness(std::span<const double> xs) {
  const auto s = summarize(xs);
  const double m2 = central_moment(xs, s.mean, 2);
  if (m2 <= 0) return 0.0;
  return central_moment(xs, s.mean, 3) / std::pow(m2, 1.5);
}

double sample_excess_kurtosis(std::span<const double> xs) {
  const auto s = summarize(xs);
  const double m2 = central_moment(xs, s.mean, 2);
  if (m2 <= 0) return 0.0;
  return central_moment(xs, s.mean, 4) / (m2 * m2) - 3.0;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  // Acklam's rational approximation, polished by one Newton step on the CDF
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return x - e / pdf;
}

namespace {

// Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)
double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsReport ks_normal_test(std::span<const double> standardized) {
  KsReport r;
  const std::int64_t n = static_cast<std::int64_t>(standardized.size());
  if (n < 2) throw std::domain_error("ks_normal_test: need at least 2 points");
  r.skewness = sample_skewness(standardized);
  r.excess_kurtosis = sample_excess_kurtosis(standardized);

  std::vector<double> xs(standardized.begin(), standardized.end());
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  r.distance = d;
  const double sn = std::sqrt(static_cast<double>(n));
  r.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("ls_slope: need matched series of length >= 2");
  const auto sx = summarize(x);
  const auto sy = summarize(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - sx.mean) * (y[i] - sy.mean);
    sxx += (x[i] - sx.mean) * (x[i] - sx.mean);
  }
  if (sxx == 0) throw std::domain_error("ls_slope: degenerate x values");
  return sxy / sxx;
}

BlockedEstimate blocked_mean(std::span<const double> series) {
  BlockedEstimate e;
  e.n = static_cast<std::int64_t>(series.size());
  if (e.n == 0) return e;
  const auto full = summarize(series);
  e.mean = full.mean;
  e.stderr_of_mean = full.stderr_of_mean;
  if (e.n < 8) return e;

  const double naive_var = full.variance / e.n;
  double prev = naive_var;
  std::int64_t block = 1;
  std::vector<double> blocks(series.begin(), series.end());
  while (static_cast<std::int64_t>(blocks.size()) / 2 >= 8) {
    // merge adjacent pairs
    std::vector<double> next(blocks.size() / 2);
    for (std::size_t k = 0; k < next.size(); ++k)
      next[k] = 0.5 * (blocks[2 * k] + blocks[2 * k + 1]);
    blocks = std::move(next);
    block *= 2;
    const auto bs = summarize(blocks);
    const double var = bs.variance / bs.n;
    e.stderr_of_mean = std::sqrt(var);
    e.block_size = block;
    if (block >= 4 && var < prev * 1.05) break;  // error estimate has plateaued
    prev = var;
  }
  if (naive_var > 0) {
    const double ratio = (e.stderr_of_mean * e.stderr_of_mean) / naive_var;
    e.autocorr_time = std::max(0.0, 0.5 * (ratio - 1.0));
  }
  return e;
}

}  // namespace isk
