#include "isk/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace isk {

void ModelParams::validate() const {
  if (kappa < 0 || beta < 0 || lambda < 0 || gamma < 0)
    throw std::domain_error("ModelParams: kappa, beta, lambda, gamma must be >= 0");
  if (t < 0 || t > 1) throw std::domain_error("ModelParams: t must lie in [0,1]");
  if (q < 0 || q > 1) throw std::domain_error("ModelParams: q must lie in [0,1]");
}

double ising_energy(const SpinConfiguration& sigma, const InteractionKernel& kernel,
                    const BoxGeometry& geometry) {
  const std::int64_t n = geometry.volume();
  const int d = geometry.dimension();
  double sum = 0.0;
  std::vector<int> target(d);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto si = geometry.site(i);
    for (const auto& e : kernel.entries()) {
      for (int ax = 0; ax < d; ++ax) target[ax] = si[ax] + e.displacement[ax];
      const std::int64_t j = geometry.index_of(target);
      if (j < 0) continue;  // free boundary
      sum += e.value * sigma.spins[i] * sigma.spins[j];
    }
  }
  return -0.5 * sum;
}

double sk_energy(const SpinConfiguration& sigma, const DisorderSample& sample,
                 const BoxGeometry& geometry) {
  const std::int64_t n = geometry.volume();
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      sum += sample.coupling(i, j) * sigma.spins[i] * sigma.spins[j];
  return -sum / std::sqrt(2.0 * static_cast<double>(n));
}

double field_energy(const SpinConfiguration& sigma, double h, double gamma,
                    const DisorderSample& sample) {
  double sum = 0.0;
  for (std::int64_t i = 0; i < sigma.size(); ++i)
    sum += sigma.spins[i] * (h + gamma * sample.field(i));
  return -sum;
}

double interpolating_energy(const SpinConfiguration& sigma, const ModelParams& params,
                            const DisorderSample& sample, const InteractionKernel& kernel,
                            const BoxGeometry& geometry) {
  params.validate();
  const double gamma_t = params.beta * std::sqrt(params.q * (1.0 - params.t));
  return params.kappa * ising_energy(sigma, kernel, geometry) +
         params.beta * std::sqrt(params.t) * sk_energy(sigma, sample, geometry) +
         field_energy(sigma, params.h, gamma_t, sample);
}

double overlap(const SpinConfiguration& sigma1, const SpinConfiguration& sigma2) {
  if (sigma1.size() != sigma2.size())
    throw std::domain_error("overlap: configurations of different length");
  std::int64_t dot = 0;
  for (std::int64_t i = 0; i < sigma1.size(); ++i)
    dot += sigma1.spins[i] * sigma2.spins[i];
  return static_cast<double>(dot) / static_cast<double>(sigma1.size());
}

double coupled_replica_energy(const SpinConfiguration& sigma1,
                              const SpinConfiguration& sigma2, const ModelParams& params,
                              const DisorderSample& sample, const InteractionKernel& kernel,
                              const BoxGeometry& geometry) {
  const double q12 = overlap(sigma1, sigma2);
  const double n = static_cast<double>(geometry.volume());
  const double coupling = 0.5 * params.beta * params.beta * n * params.lambda *
                          (q12 - params.q) * (q12 - params.q);
  return interpolating_energy(sigma1, params, sample, kernel, geometry) +
         interpolating_energy(sigma2, params, sample, kernel, geometry) - coupling;
}

namespace {

// kappa K(i-j) into W (free boundary).
void add_kernel_coupling(Eigen::MatrixXd& w, double kappa, const InteractionKernel& kernel,
                         const BoxGeometry& geometry) {
  if (kappa == 0.0) return;
  const std::int64_t n = geometry.volume();
  const int d = geometry.dimension();
  std::vector<int> target(d);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto si = geometry.site(i);
    for (const auto& e : kernel.entries()) {
      for (int ax = 0; ax < d; ++ax) target[ax] = si[ax] + e.displacement[ax];
      const std::int64_t j = geometry.index_of(target);
      if (j < 0 || j == i) continue;
      w(i, j) += kappa * e.value;
    }
  }
}

}  // namespace

EnergyModel interpolating_model(const ModelParams& params, const DisorderSample& sample,
                                const InteractionKernel& kernel, const BoxGeometry& geometry) {
  params.validate();
  const std::int64_t n = geometry.volume();
  EnergyModel m;
  m.coupling = Eigen::MatrixXd::Zero(n, n);
  m.field = Eigen::VectorXd::Zero(n);
  add_kernel_coupling(m.coupling, params.kappa, kernel, geometry);

  const double sk_scale = params.beta * std::sqrt(params.t) / std::sqrt(2.0 * n);
  if (sk_scale != 0.0) {
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) {
        if (i == j) continue;
        m.coupling(i, j) += sk_scale * (sample.coupling(i, j) + sample.coupling(j, i));
      }
      m.offset -= sk_scale * sample.coupling(i, i);  // diagonal term, sigma_i^2 = 1
    }
  }

  const double gamma_t = params.beta * std::sqrt(params.q * (1.0 - params.t));
  for (std::int64_t i = 0; i < n; ++i)
    m.field[i] = params.h + gamma_t * sample.field(i);
  return m;
}

EnergyModel rfim_model(double kappa, double h, double gamma,
                       const std::vector<double>& site_fields,
                       const InteractionKernel& kernel, const BoxGeometry& geometry) {
  if (kappa < 0 || gamma < 0)
    throw std::domain_error("rfim_model: kappa and gamma must be >= 0");
  const std::int64_t n = geometry.volume();
  if (static_cast<std::int64_t>(site_fields.size()) != n)
    throw std::domain_error("rfim_model: site field count != volume");
  EnergyModel m;
  m.coupling = Eigen::MatrixXd::Zero(n, n);
  m.field = Eigen::VectorXd::Zero(n);
  add_kernel_coupling(m.coupling, kappa, kernel, geometry);
  for (std::int64_t i = 0; i < n; ++i) m.field[i] = h + gamma * site_fields[i];
  return m;
}

double model_energy(const EnergyModel& model, const SpinConfiguration& sigma) {
  const std::int64_t n = model.size();
  double quad = 0.0, lin = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < n; ++j) row += model.coupling(i, j) * sigma.spins[j];
    quad += row * sigma.spins[i];
    lin += model.field[i] * sigma.spins[i];
  }
  return -0.5 * quad - lin + model.offset;
}

Eigen::VectorXd local_fields(const EnergyModel& model, const SpinConfiguration& sigma) {
  const std::int64_t n = model.size();
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
  for (std::int64_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < n; ++j) row += model.coupling(i, j) * sigma.spins[j];
    psi[i] = row;
  }
  return psi;
}

void apply_flip(const EnergyModel& model, SpinConfiguration& sigma, Eigen::VectorXd& psi,
                std::int64_t k) {
  sigma.spins[k] = static_cast<std::int8_t>(-sigma.spins[k]);
  const double delta = 2.0 * sigma.spins[k];  // new - old
  const std::int64_t n = model.size();
  const double* col = model.coupling.col(k).data();
  double* p = psi.data();
  for (std::int64_t j = 0; j < n; ++j) p[j] += delta * col[j];
}

}  // namespace isk
