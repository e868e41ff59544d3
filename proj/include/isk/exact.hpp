#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "isk/hamiltonian.hpp"

namespace isk {

inline constexpr int kMaxEnumSpins = 24;      // single-replica enumeration cap
inline constexpr int kMaxPairSpins = 12;      // two-replica (pair-state) cap

/// Exact Gibbs data from full enumeration.
struct GibbsSummary {
  double log_partition = 0.0;
  double pressure = 0.0;
  Eigen::VectorXd magnetizations;  // <sigma_i>
};

// log Z by Gray-code enumeration of all 2^n configurations with max-shifted
// accumulation. Boxes above the cap raise SizeError (use mc-engine instead).
double enum_log_partition(const EnergyModel& model);
GibbsSummary gibbs_summary(const EnergyModel& model);

// <obs> under the single-replica Gibbs measure of `model`.
double enum_expectation(const EnergyModel& model,
                        const std::function<double(const SpinConfiguration&)>& obs);

// Convenience wrappers over the full interpolating model (t=1, q arbitrary
// gives the ISK partition function).
double log_partition_function(const BoxGeometry& geometry, const ModelParams& params,
                              const DisorderSample& sample, const InteractionKernel& kernel);
double pressure(const BoxGeometry& geometry, const ModelParams& params,
                const DisorderSample& sample, const InteractionKernel& kernel);

// log Z^RFIM(kappa, h, gamma; J) by enumeration.
double rfim_log_partition(const BoxGeometry& geometry, double kappa, double h, double gamma,
                          const DisorderSample& sample, const InteractionKernel& kernel);

// ---- 1D nearest-neighbor transfer matrix (exact at any length) ----

// `site_fields` are the per-site Boltzmann fields f_i (= h + gamma J_i);
// `bond` is the bond coefficient in the exponent (= kappa * K(1)).
double transfer_matrix_log_z(std::span<const double> site_fields, double bond);
std::vector<double> transfer_matrix_magnetizations(std::span<const double> site_fields,
                                                   double bond);

// |Lambda|^{-1} log Z^RFIM for a 1D chain. Non-nearest-neighbor kernels are
// rejected.
double transfer_matrix_rfim_pressure(std::int64_t length, double kappa, double h,
                                     double gamma, std::span<const double> site_gaussians,
                                     const InteractionKernel& kernel);

// Bond coefficient kappa*K(1) for a 1D NN kernel; throws if not applicable.
double nn_bond_coefficient(const InteractionKernel& kernel, double kappa);
bool is_1d_nearest_neighbor(const InteractionKernel& kernel);

// ---- two-replica measures ----

/// Which Gibbs measure a two-replica expectation runs under:
///   ReplicaPair   <.>_t^{(x)2}        (independent replicas, shared disorder)
///   Coupled       <.>_{t,lambda}      (quadratic overlap coupling)
///   Tilted        <.>^{(mu)}          (RFIM pair tilted by exp(mu n (q12-q)))
struct MeasureSpec {
  enum class Kind { Single, ReplicaPair, Coupled, Tilted };
  Kind kind = Kind::Single;
  double t = 1.0;
  double q = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  static MeasureSpec single(double t, double q) { return {Kind::Single, t, q, 0, 0}; }
  static MeasureSpec replica_pair(double t, double q) {
    return {Kind::ReplicaPair, t, q, 0, 0};
  }
  static MeasureSpec coupled(double t, double lambda, double q) {
    return {Kind::Coupled, t, q, lambda, 0};
  }
  static MeasureSpec tilted(double mu, double q) { return {Kind::Tilted, 0.0, q, 0, mu}; }
};

// Exact expectation under the selected measure. Single-replica observables use
// the first overload; pair observables the second (Single measure rejected).
double gibbs_expectation(const std::function<double(const SpinConfiguration&)>& obs,
                         const MeasureSpec& spec, const BoxGeometry& geometry,
                         const ModelParams& params, const DisorderSample& sample,
                         const InteractionKernel& kernel);
double gibbs_expectation(
    const std::function<double(const SpinConfiguration&, const SpinConfiguration&)>& obs,
    const MeasureSpec& spec, const BoxGeometry& geometry, const ModelParams& params,
    const DisorderSample& sample, const InteractionKernel& kernel);

// <(q12 - center)^order> under a two-replica measure; order in {1, 2}.
double overlap_moment(int order, double center, const MeasureSpec& spec,
                      const BoxGeometry& geometry, const ModelParams& params,
                      const DisorderSample& sample, const InteractionKernel& kernel);

// log Z^(2)(t, lambda) of the coupled two-replica system.
double coupled_log_partition(double t, double lambda, double q, const BoxGeometry& geometry,
                             const ModelParams& params, const DisorderSample& sample,
                             const InteractionKernel& kernel);

// alpha_N(mu; J) = (2|Lambda|)^{-1} log < exp(mu |Lambda| (q12 - q)) > under the
// two-replica RFIM measure at (kappa, h, gamma).
double replica_generating_function(double mu, double q, const BoxGeometry& geometry,
                                   double kappa, double h, double gamma,
                                   const DisorderSample& sample,
                                   const InteractionKernel& kernel);

// ---- interpolation derivative checks (ingredients of the pressure identity) ----

struct DerivativeCheckPoint {
  double t = 0.0;
  double max_rel_fd_error = 0.0;  // analytic d/dt log Z vs central differences
  double lhs_mean = 0.0;          // mean over samples of d/dt p_N(t)
  double rhs_mean = 0.0;          // beta^2/4 (1-q)^2 - beta^2/4 mean <(q12-q)^2>
  double residual_mean = 0.0;     // per-sample lhs - rhs, averaged
  double residual_stderr = 0.0;
};

struct DerivativeCheckConfig {
  std::vector<double> t_grid;  // strictly inside (0,1)
  double q = 0.0;
  int n_samples = 100;
  double fd_step = 1e-4;
  std::uint64_t master_seed = 1;
};

// Per-sample analytic t-derivative of log Z(t):  < -dH^(t)/dt >_t.
double interpolation_derivative_analytic(const BoxGeometry& geometry,
                                         const ModelParams& params,
                                         const DisorderSample& sample,
                                         const InteractionKernel& kernel);

std::vector<DerivativeCheckPoint> interpolation_derivative_check(
    const DerivativeCheckConfig& config, const BoxGeometry& geometry, ModelParams params,
    const InteractionKernel& kernel);

}  // namespace isk
