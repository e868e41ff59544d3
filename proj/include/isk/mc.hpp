#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "isk/hamiltonian.hpp"
#include "isk/stats.hpp"

namespace isk {

/// Single-spin-flip Metropolis chain over an EnergyModel, sampling
/// exp(-s * H(sigma)). The RNG is a private splitmix64 stream derived from a
/// label, so trajectories are pure functions of (seed, model, s).
struct ChainState {
  SpinConfiguration config;
  Eigen::VectorXd local_fields;  // cached psi_i = sum_j W_ij sigma_j
  double energy = 0.0;           // running H(config)
  std::int64_t sweep_count = 0;
  std::uint64_t rng_state = 0;
};

ChainState make_chain(const EnergyModel& model, std::uint64_t seed_label);

// One pass of Metropolis updates in lexicographic site order against the
// weight exp(-s H).
void sweep(ChainState& state, const EnergyModel& model, double s);

// Recompute-from-scratch check of the cached local fields; largest deviation.
double local_field_drift(const ChainState& state, const EnergyModel& model);

struct EstimateWithError {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::int64_t n_samples = 0;
  double autocorr_time = 0.0;
};

struct McConfig {
  std::int64_t burn_in = 1000;
  std::int64_t n_sweeps = 10000;
};

// Time average of obs(config) over n_sweeps sweeps after burn-in, with a
// blocked standard error.
EstimateWithError estimate_expectation(
    const std::function<double(const SpinConfiguration&)>& obs, ChainState& state,
    const EnergyModel& model, double s, const McConfig& mc);

// One row of the thermodynamic-integration trace: (s, <-H>_s/|Lambda|, stderr).
struct ThermoNode {
  double s = 0.0;
  double integrand = 0.0;
  double stderr_of_integrand = 0.0;
};

// Thermodynamic-integration pressure: p = log 2 + int_0^1 <-H>_s / |Lambda| ds
// with composite Simpson over the given nodes (uniform, odd count, spanning
// [0,1]) and one independent chain per node. The returned error combines the
// statistical error with a node-doubling quadrature estimate. Per-node traces
// are appended to *trace when given.
EstimateWithError thermo_integration_pressure(const EnergyModel& model,
                                              std::span<const double> nodes,
                                              std::uint64_t seed_label, const McConfig& mc,
                                              std::vector<ThermoNode>* trace = nullptr);

std::vector<double> uniform_nodes(int count);  // count odd, on [0,1]

/// |Lambda| * E<(q12 - qbar)^2> across system sizes, with a log-log growth
/// slope; bounded == slope <= 0.2 (no systematic growth).
struct ConcentrationRow {
  std::int64_t volume = 0;
  double scaled_second_moment = 0.0;  // |Lambda| E<(q12-qbar)^2>
  double stderr_of_moment = 0.0;
};
struct ConcentrationReport {
  std::vector<ConcentrationRow> rows;
  double slope = 0.0;
  bool bounded = false;
};

ConcentrationReport overlap_concentration_probe(
    double t, double qbar, std::span<const std::int64_t> chain_lengths,
    const ModelParams& params, const InteractionKernel& kernel, int n_samples,
    std::uint64_t master_seed, const McConfig& mc);

}  // namespace isk
