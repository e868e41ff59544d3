#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isk/hamiltonian.hpp"
#include "isk/kernel.hpp"
#include "isk/mc.hpp"
#include "isk/stats.hpp"

namespace isk {

/// Per-sample pressures of one (kappa, beta, h, gamma, geometry) point, with
/// the rescaled variance |Lambda| Var(p_N) tested by the central limit
/// theorem machinery.
struct PressureEnsemble {
  ModelParams params;
  std::int64_t volume = 0;
  std::vector<double> pressures;  // indexed by sample
  std::string engine;             // "exact" | "mc"
  double mean = 0.0;
  double variance = 0.0;
  double rescaled_variance = 0.0;  // |Lambda| * variance
};

enum class EnsembleEngine { Exact, Mc };

// Hamiltonian of the ensemble: kappa H^I + beta H^SK - sum_i s_i (h + gamma J_i).
// gamma = 0 gives the full ISK model, beta = 0 the RFIM.
EnergyModel ensemble_model(const ModelParams& params, const DisorderSample& sample,
                           const InteractionKernel& kernel, const BoxGeometry& geometry);

PressureEnsemble ensemble_pressures(const BoxGeometry& geometry, const ModelParams& params,
                                    int n_samples, EnsembleEngine engine,
                                    const InteractionKernel& kernel,
                                    std::uint64_t master_seed, int workers = 1,
                                    const McConfig& mc = {});

// KS normality report for sqrt(|Lambda|) (p - mean), standardized by its
// sample standard deviation. Requires >= 100 samples; zero variance sets the
// degenerate flag instead of testing.
KsReport clt_test(const PressureEnsemble& ensemble);

// log < e^{c sigma} > for a single +-1 spin with magnetization m0:
// log(cosh c + m0 sinh c).
double tilt_log_moment(double c, double m0);

/// Nested estimator of the CLT variance ingredient
/// Gamma = E_{J_i, i >= 0} ( E_{J'_0, J_i, i < 0} log < e^{beta sqrt(qbar)
/// (J'_0 - J_0) sigma_0} > )^2, with the infinite-volume bracket replaced by a
/// finite box with a bulk buffer around the origin.
struct GammaConfig {
  int buffer = 8;           // half-width of the 1D box around the origin
  int n_outer = 20000;      // samples of the fields on sites >= 0
  int n_inner = 8;          // samples of the fields on sites < 0 per outer draw
  int quad_order = 40;      // Gauss-Hermite order for J'_0
  std::uint64_t master_seed = 1;
  int workers = 1;
};

struct GammaEstimate {
  double gamma = 0.0;
  double stderr_of_gamma = 0.0;
  double qbar_used = 0.0;
  int buffer = 0;
  int n_outer = 0;
  int n_inner = 0;
};

GammaEstimate estimate_gamma(double kappa, double beta, double h, double qbar,
                             const InteractionKernel& kernel, const GammaConfig& config);

struct VariancePrediction {
  double value = 0.0;   // Gamma - beta^2/2 qbar^2
  bool positive = false;
};

// Positivity is expected for h != 0 at small kappa, beta; a non-positive
// value is flagged as an estimator failure, not clamped.
VariancePrediction variance_prediction(const GammaEstimate& gamma, double beta, double qbar);

/// Martingale increments xi_{n,k} of the RFIM pressure along the
/// lexicographic site order. kappa = 0 is exact (fields factorize); kappa > 0
/// uses tensor-product quadrature over the resampled tail fields and is
/// capped at 10 sites.
struct MartingaleConfig {
  int quad_order = 40;   // Gauss-Hermite order for J'_k
  int field_nodes = 5;   // per-field nodes for the kappa > 0 tail quadrature
  int kappa_cap = 10;
};

std::vector<double> martingale_increments(std::span<const double> site_gaussians,
                                          double kappa, double h, double gamma,
                                          const BoxGeometry& geometry,
                                          const InteractionKernel& kernel,
                                          const MartingaleConfig& config = {});

// E_{J'} log 2cosh(h + gamma J') under the same rule the increments use.
double mean_log_2cosh(double h, double gamma, int quad_order);

/// Least-squares slope of log Var(p_N) against log |Lambda_N|; the CLT
/// predicts -1.
struct VarianceScalingReport {
  std::vector<std::int64_t> volumes;
  std::vector<double> variances;
  double slope = 0.0;
  bool degenerate = false;  // all variances ~ 0 (no disorder)
};

VarianceScalingReport variance_scaling(std::span<const std::int64_t> chain_lengths,
                                       const ModelParams& params, int n_samples_per_size,
                                       EnsembleEngine engine, const InteractionKernel& kernel,
                                       std::uint64_t master_seed, int workers = 1);

// plot-ready data
struct Histogram {
  std::vector<double> edges;        // n_bins + 1
  std::vector<std::int64_t> counts; // n_bins
};
Histogram histogram(std::span<const double> xs, int n_bins);

// (theoretical, empirical) normal QQ pairs of standardized data.
std::vector<std::pair<double, double>> qq_points(std::span<const double> standardized);

}  // namespace isk
