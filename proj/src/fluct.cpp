#include "isk/fluct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isk/disorder.hpp"
#include "isk/errors.hpp"
#include "isk/exact.hpp"
#include "isk/parallel.hpp"
#include "isk/quadrature.hpp"

namespace isk {

namespace {

constexpr std::uint64_t kGammaOuter = 0x474fu;
constexpr std::uint64_t kGammaInner = 0x4749u;

double log_2cosh(double x) {
  return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x)));
}

}  // namespace

EnergyModel ensemble_model(const ModelParams& params, const DisorderSample& sample,
                           const InteractionKernel& kernel, const BoxGeometry& geometry) {
  ModelParams p = params;
  p.t = 1.0;
  EnergyModel model = interpolating_model(p, sample, kernel, geometry);
  if (params.gamma != 0.0)
    for (std::int64_t i = 0; i < model.size(); ++i)
      model.field[i] += params.gamma * sample.field(i);
  return model;
}

PressureEnsemble ensemble_pressures(const BoxGeometry& geometry, const ModelParams& params,
                                    int n_samples, EnsembleEngine engine,
                                    const InteractionKernel& kernel,
                                    std::uint64_t master_seed, int workers,
                                    const McConfig& mc) {
  if (n_samples < 2)
    throw std::domain_error("ensemble_pressures: need at least 2 samples");
  const double inv_n = 1.0 / static_cast<double>(geometry.volume());
  // beta = 0 leaves a pure RFIM: 1D NN chains then go through the transfer
  // matrix, which is exact at any length
  const bool tm_path = engine == EnsembleEngine::Exact && params.beta == 0.0 &&
                       geometry.dimension() == 1 && is_1d_nearest_neighbor(kernel);
  const auto pressures = parallel_map(n_samples, workers, [&](std::int64_t s) {
    if (tm_path) {
      const auto gaussians =
          sample_site_fields(geometry, master_seed, static_cast<std::uint64_t>(s));
      return transfer_matrix_rfim_pressure(geometry.volume(), params.kappa, params.h,
                                           params.gamma, gaussians, kernel);
    }
    const DisorderSample sample(geometry, master_seed, static_cast<std::uint64_t>(s));
    const EnergyModel model = ensemble_model(params, sample, kernel, geometry);
    if (engine == EnsembleEngine::Exact) return enum_log_partition(model) * inv_n;
    return thermo_integration_pressure(
               model, uniform_nodes(21),
               seed::derive(master_seed, seed::kChainRng, static_cast<std::uint64_t>(s), 1),
               mc)
        .mean;
  });

  PressureEnsemble e;
  e.params = params;
  e.volume = geometry.volume();
  e.pressures = pressures;
  e.engine = engine == EnsembleEngine::Exact ? "exact" : "mc";
  const auto s = summarize(pressures);
  e.mean = s.mean;
  e.variance = s.variance;
  e.rescaled_variance = static_cast<double>(e.volume) * s.variance;
  return e;
}

KsReport clt_test(const PressureEnsemble& ensemble) {
  if (static_cast<std::int64_t>(ensemble.pressures.size()) < 100)
    throw std::domain_error("clt_test: need at least 100 samples");
  if (ensemble.variance <= 0.0) {
    KsReport r;
    r.degenerate = true;
    return r;
  }
  const double sd = std::sqrt(ensemble.variance);
  std::vector<double> standardized(ensemble.pressures.size());
  for (std::size_t i = 0; i < standardized.size(); ++i)
    standardized[i] = (ensemble.pressures[i] - ensemble.mean) / sd;
  return ks_normal_test(standardized);
}

double tilt_log_moment(double c, double m0) {
  if (std::abs(m0) > 1.0)
    throw std::domain_error("tilt_log_moment: |m0| must be <= 1");
  // log(cosh c + m0 sinh c), written to stay finite for large |c|
  if (c >= 0.0)
    return c + std::log(0.5 * (1.0 + m0) + 0.5 * (1.0 - m0) * std::exp(-2.0 * c));
  return -c + std::log(0.5 * (1.0 - m0) + 0.5 * (1.0 + m0) * std::exp(2.0 * c));
}

namespace {

// <sigma_center> of the RFIM on the buffer box at the given Boltzmann fields.
double center_magnetization(const std::vector<double>& fields, double kappa,
                            const InteractionKernel& kernel, const BoxGeometry& geometry,
                            std::int64_t center) {
  if (is_1d_nearest_neighbor(kernel))
    return transfer_matrix_magnetizations(fields, nn_bond_coefficient(kernel, kappa))[center];
  if (geometry.volume() > kMaxEnumSpins)
    throw SizeError("estimate_gamma: non-NN kernels need an enumerable buffer box");
  // enumeration fallback: fields already include h and gamma J
  std::vector<double> zeros(fields.size(), 0.0);
  EnergyModel model = rfim_model(kappa, 0.0, 0.0, zeros, kernel, geometry);
  for (std::size_t i = 0; i < fields.size(); ++i) model.field[i] = fields[i];
  return gibbs_summary(model).magnetizations[center];
}

}  // namespace

GammaEstimate estimate_gamma(double kappa, double beta, double h, double qbar,
                             const InteractionKernel& kernel, const GammaConfig& config) {
  const auto dob = uniqueness_check(kernel, kappa);
  if (!dob.inside)
    throw std::domain_error("estimate_gamma: kappa outside the Dobrushin uniqueness region");
  const double corr_len = correlation_length_bound(dob);
  if (config.buffer < 3.0 * corr_len)
    throw std::domain_error("estimate_gamma: buffer " + std::to_string(config.buffer) +
                            " is below 3 correlation lengths (" +
                            std::to_string(3.0 * corr_len) + ")");

  GammaEstimate out;
  out.qbar_used = qbar;
  out.buffer = config.buffer;
  out.n_outer = config.n_outer;
  out.n_inner = config.n_inner;

  const double gamma_field = beta * std::sqrt(qbar);
  if (gamma_field == 0.0) return out;  // tilt vanishes identically

  const BoxGeometry geometry = BoxGeometry::chain(2 * config.buffer + 1);
  const std::int64_t n = geometry.volume();
  const std::int64_t center = config.buffer;  // lex index of the origin
  const GaussHermite gh(config.quad_order);

  const auto squares = parallel_map(config.n_outer, config.workers, [&](std::int64_t o) {
    // fields on sites >= 0 (lex at or after the origin) fixed by the outer draw
    std::vector<double> gaussians(n, 0.0);
    for (std::int64_t i = center; i < n; ++i)
      gaussians[i] = seed::standard_normal(seed::derive(
          config.master_seed, kGammaOuter, static_cast<std::uint64_t>(o),
          static_cast<std::uint64_t>(i)));
    const double j0 = gaussians[center];

    double inner_sum = 0.0;
    for (int k = 0; k < config.n_inner; ++k) {
      for (std::int64_t i = 0; i < center; ++i)
        gaussians[i] = seed::standard_normal(seed::derive(
            config.master_seed, kGammaInner,
            static_cast<std::uint64_t>(o) * config.n_inner + k,
            static_cast<std::uint64_t>(i)));
      std::vector<double> fields(n);
      for (std::int64_t i = 0; i < n; ++i) fields[i] = h + gamma_field * gaussians[i];
      const double m0 = center_magnetization(fields, kappa, kernel, geometry, center);
      inner_sum += gh.average(
          [&](double z) { return tilt_log_moment(gamma_field * (z - j0), m0); });
    }
    const double x = inner_sum / config.n_inner;
    return x * x;
  });

  const auto s = summarize(squares);
  out.gamma = s.mean;
  out.stderr_of_gamma = s.stderr_of_mean;
  return out;
}

VariancePrediction variance_prediction(const GammaEstimate& gamma, double beta,
                                       double qbar) {
  VariancePrediction p;
  p.value = gamma.gamma - 0.5 * beta * beta * qbar * qbar;
  p.positive = p.value > 0.0;
  return p;
}

double mean_log_2cosh(double h, double gamma, int quad_order) {
  const GaussHermite gh(quad_order);
  return gh.average([&](double z) { return log_2cosh(h + gamma * z); });
}

std::vector<double> martingale_increments(std::span<const double> site_gaussians,
                                          double kappa, double h, double gamma,
                                          const BoxGeometry& geometry,
                                          const InteractionKernel& kernel,
                                          const MartingaleConfig& config) {
  const std::int64_t n = geometry.volume();
  if (static_cast<std::int64_t>(site_gaussians.size()) != n)
    throw std::domain_error("martingale_increments: field count != volume");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> xi(static_cast<std::size_t>(n));

  if (kappa == 0.0) {
    // factorized RFIM: xi_k = n^{-1/2} (log 2cosh(h_k) - E' log 2cosh(h'_k))
    const double expected = mean_log_2cosh(h, gamma, config.quad_order);
    for (std::int64_t k = 0; k < n; ++k)
      xi[k] = inv_sqrt_n * (log_2cosh(h + gamma * site_gaussians[k]) - expected);
    return xi;
  }

  if (n > config.kappa_cap)
    throw SizeError("martingale_increments: kappa > 0 capped at " +
                    std::to_string(config.kappa_cap) + " sites");

  const GaussHermite resample(config.quad_order);
  const GaussHermite tail(config.field_nodes);
  std::vector<double> gaussians(site_gaussians.begin(), site_gaussians.end());

  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t n_tail = n - 1 - k;
    const double hk = h + gamma * site_gaussians[k];
    // tensor-product quadrature over the resampled fields at sites after k
    std::vector<int> idx(static_cast<std::size_t>(n_tail), 0);
    double acc = 0.0;
    while (true) {
      double weight = 1.0;
      for (std::int64_t t = 0; t < n_tail; ++t) {
        gaussians[k + 1 + t] = tail.nodes[idx[t]];
        weight *= tail.weights[idx[t]];
      }
      std::vector<double> fields(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) fields[i] = h + gamma * gaussians[i];
      const double mk = center_magnetization(fields, kappa, kernel, geometry, k);
      acc += weight * resample.average([&](double z) {
        return tilt_log_moment(h + gamma * z - hk, mk);
      });
      // odometer over tail node indices
      std::int64_t t = 0;
      for (; t < n_tail; ++t) {
        if (++idx[t] < static_cast<int>(tail.nodes.size())) break;
        idx[t] = 0;
      }
      if (t == n_tail) break;
    }
    // restore actual fields beyond k for the next increment
    for (std::int64_t i = k + 1; i < n; ++i) gaussians[i] = site_gaussians[i];
    xi[k] = -inv_sqrt_n * acc;
  }
  return xi;
}

VarianceScalingReport variance_scaling(std::span<const std::int64_t> chain_lengths,
                                       const ModelParams& params, int n_samples_per_size,
                                       EnsembleEngine engine, const InteractionKernel& kernel,
                                       std::uint64_t master_seed, int workers) {
  if (chain_lengths.size() < 3)
    throw std::domain_error("variance_scaling: need at least 3 sizes");
  VarianceScalingReport report;
  std::vector<double> log_vol, log_var;
  for (std::int64_t len : chain_lengths) {
    const auto ensemble =
        ensemble_pressures(BoxGeometry::chain(len), params, n_samples_per_size, engine,
                           kernel, master_seed, workers);
    report.volumes.push_back(len);
    report.variances.push_back(ensemble.variance);
  }
  report.degenerate =
      std::all_of(report.variances.begin(), report.variances.end(),
                  [](double v) { return v < 1e-24; });
  if (report.degenerate) return report;
  for (std::size_t i = 0; i < report.volumes.size(); ++i) {
    log_vol.push_back(std::log(static_cast<double>(report.volumes[i])));
    log_var.push_back(std::log(report.variances[i]));
  }
  report.slope = ls_slope(log_vol, log_var);
  return report;
}

Histogram histogram(std::span<const double> xs, int n_bins) {
  if (n_bins < 1) throw std::domain_error("histogram: need at least one bin");
  if (xs.empty()) throw std::domain_error("histogram: empty data");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  double lo = *mn, hi = *mx;
  if (hi <= lo) hi = lo + 1.0;  // degenerate data: one wide bin
  const double width = (hi - lo) / n_bins;
  Histogram out;
  out.edges.resize(n_bins + 1);
  for (int b = 0; b <= n_bins; ++b) out.edges[b] = lo + b * width;
  out.counts.assign(n_bins, 0);
  for (double x : xs) {
    int b = static_cast<int>((x - lo) / width);
    b = std::clamp(b, 0, n_bins - 1);
    ++out.counts[b];
  }
  return out;
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> standardized) {
  std::vector<double> xs(standardized.begin(), standardized.end());
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> out(xs.size());
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = {normal_quantile((static_cast<double>(i) + 0.5) / n), xs[i]};
  return out;
}

}  // namespace isk
