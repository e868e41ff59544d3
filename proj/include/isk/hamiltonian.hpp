#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isk/disorder.hpp"
#include "isk/geometry.hpp"
#include "isk/kernel.hpp"

namespace isk {

/// Spin configuration over Lambda_N in lexicographic site order, entries +-1.
struct SpinConfiguration {
  std::vector<std::int8_t> spins;

  static SpinConfiguration all_up(std::int64_t n) {
    return SpinConfiguration{std::vector<std::int8_t>(static_cast<std::size_t>(n), 1)};
  }
  static SpinConfiguration all_down(std::int64_t n) {
    return SpinConfiguration{std::vector<std::int8_t>(static_cast<std::size_t>(n), -1)};
  }
  std::int64_t size() const { return static_cast<std::int64_t>(spins.size()); }
};

/// Model parameters. kappa and beta are the Ising and SK inverse temperatures,
/// h the external field, gamma the RFIM field strength; t, q, lambda, mu drive
/// the interpolation, the trial overlap, the replica coupling and the overlap
/// tilt.
struct ModelParams {
  double kappa = 0.0;
  double beta = 0.0;
  double h = 0.0;
  double gamma = 0.0;
  double t = 1.0;
  double q = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  void validate() const;
};

// H^I(sigma) = -1/2 sum_{i,j} K(i-j) sigma_i sigma_j   (free boundary, K(0)=0)
double ising_energy(const SpinConfiguration& sigma, const InteractionKernel& kernel,
                    const BoxGeometry& geometry);

// H^SK(sigma;J) = -(2|Lambda|)^{-1/2} sum_{i,j} J_ij sigma_i sigma_j
// (all ordered pairs, diagonal included)
double sk_energy(const SpinConfiguration& sigma, const DisorderSample& sample,
                 const BoxGeometry& geometry);

// -sum_i sigma_i (h + gamma J_i); the Boltzmann exponent is its negative.
double field_energy(const SpinConfiguration& sigma, double h, double gamma,
                    const DisorderSample& sample);

// H^(t) = kappa H^I + beta sqrt(t) H^SK - sum_i sigma_i (h + beta sqrt(q(1-t)) J_i)
double interpolating_energy(const SpinConfiguration& sigma, const ModelParams& params,
                            const DisorderSample& sample, const InteractionKernel& kernel,
                            const BoxGeometry& geometry);

// q12 = |Lambda|^{-1} sum_i sigma1_i sigma2_i
double overlap(const SpinConfiguration& sigma1, const SpinConfiguration& sigma2);

// H^(t)(s1) + H^(t)(s2) - (beta^2/2)|Lambda| lambda (q12 - q)^2
double coupled_replica_energy(const SpinConfiguration& sigma1,
                              const SpinConfiguration& sigma2, const ModelParams& params,
                              const DisorderSample& sample, const InteractionKernel& kernel,
                              const BoxGeometry& geometry);

/// Dense quadratic form H(sigma) = -1/2 sigma^T W sigma - b . sigma + offset
/// with symmetric W, zero diagonal. This is the working representation shared
/// by the exact and Monte Carlo engines; it reproduces the reference energies
/// above exactly (pinned by tests).
struct EnergyModel {
  Eigen::MatrixXd coupling;  // W, symmetric, zero diagonal
  Eigen::VectorXd field;     // b
  double offset = 0.0;

  std::int64_t size() const { return field.size(); }
};

// H^(t) as an EnergyModel (the t=1 / t=0 endpoints give the full ISK and RFIM
// energies).
EnergyModel interpolating_model(const ModelParams& params, const DisorderSample& sample,
                                const InteractionKernel& kernel, const BoxGeometry& geometry);

// RFIM energy kappa H^I - sum_i sigma_i (h + gamma J_i) as an EnergyModel.
EnergyModel rfim_model(double kappa, double h, double gamma,
                       const std::vector<double>& site_fields,
                       const InteractionKernel& kernel, const BoxGeometry& geometry);

double model_energy(const EnergyModel& model, const SpinConfiguration& sigma);

// psi_i = sum_{j != i} W_ij sigma_j
Eigen::VectorXd local_fields(const EnergyModel& model, const SpinConfiguration& sigma);

// Energy change of flipping spin k, given current local fields.
inline double flip_delta(const EnergyModel& model, const Eigen::VectorXd& psi,
                         const SpinConfiguration& sigma, std::int64_t k) {
  return 2.0 * sigma.spins[k] * (psi[k] + model.field[k]);
}

// Flip spin k and update the cached local fields.
void apply_flip(const EnergyModel& model, SpinConfiguration& sigma, Eigen::VectorXd& psi,
                std::int64_t k);

}  // namespace isk
