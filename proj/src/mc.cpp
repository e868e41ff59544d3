#include "isk/mc.hpp"

#include <cmath>
#include <stdexcept>

#include "isk/disorder.hpp"
#include "isk/quadrature.hpp"

namespace isk {

ChainState make_chain(const EnergyModel& model, std::uint64_t seed_label) {
  ChainState st;
  st.rng_state = seed_label;
  const std::int64_t n = model.size();
  st.config.spins.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    st.config.spins[i] = (seed::splitmix64(st.rng_state) & 1u) ? 1 : -1;
  st.local_fields = local_fields(model, st.config);
  st.energy = model_energy(model, st.config);
  return st;
}

void sweep(ChainState& state, const EnergyModel& model, double s) {
  const std::int64_t n = model.size();
  for (std::int64_t k = 0; k < n; ++k) {
    const double delta = flip_delta(model, state.local_fields, state.config, k);
    const double u = seed::to_unit(seed::splitmix64(state.rng_state));
    if (s * delta <= 0.0 || u < std::exp(-s * delta)) {
      apply_flip(model, state.config, state.local_fields, k);
      state.energy += delta;
    }
  }
  ++state.sweep_count;
}

double local_field_drift(const ChainState& state, const EnergyModel& model) {
  const Eigen::VectorXd fresh = local_fields(model, state.config);
  return (fresh - state.local_fields).cwiseAbs().maxCoeff();
}

EstimateWithError estimate_expectation(
    const std::function<double(const SpinConfiguration&)>& obs, ChainState& state,
    const EnergyModel& model, double s, const McConfig& mc) {
  if (mc.burn_in < 0 || mc.n_sweeps <= 0)
    throw std::domain_error("estimate_expectation: burn_in >= 0, n_sweeps > 0 required");
  for (std::int64_t i = 0; i < mc.burn_in; ++i) sweep(state, model, s);
  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(mc.n_sweeps));
  for (std::int64_t i = 0; i < mc.n_sweeps; ++i) {
    sweep(state, model, s);
    series.push_back(obs(state.config));
  }
  const BlockedEstimate b = blocked_mean(series);
  return {b.mean, b.stderr_of_mean, b.n, b.autocorr_time};
}

std::vector<double> uniform_nodes(int count) {
  if (count < 3 || count % 2 == 0)
    throw std::domain_error("uniform_nodes: need an odd count >= 3");
  std::vector<double> nodes(count);
  for (int i = 0; i < count; ++i) nodes[i] = static_cast<double>(i) / (count - 1);
  return nodes;
}

EstimateWithError thermo_integration_pressure(const EnergyModel& model,
                                              std::span<const double> nodes,
                                              std::uint64_t seed_label, const McConfig& mc,
                                              std::vector<ThermoNode>* trace) {
  const int m = static_cast<int>(nodes.size());
  if (m < 3 || m % 2 == 0)
    throw std::domain_error("thermo_integration: need an odd node count >= 3");
  for (int i = 1; i < m; ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::domain_error("thermo_integration: nodes must be strictly increasing");
  if (nodes.front() != 0.0 || nodes.back() != 1.0)
    throw std::domain_error("thermo_integration: nodes must span [0,1]");

  const double inv_n = 1.0 / static_cast<double>(model.size());
  std::vector<double> means(m), errs(m);
  for (int j = 0; j < m; ++j) {
    ChainState chain = make_chain(model, seed::mix(seed_label, static_cast<std::uint64_t>(j)));
    ChainState* c = &chain;
    const auto est = estimate_expectation(
        [&](const SpinConfiguration&) { return -c->energy * inv_n; }, chain, model, nodes[j],
        mc);
    means[j] = est.mean;
    errs[j] = est.stderr_of_mean;
    if (trace) trace->push_back({nodes[j], est.mean, est.stderr_of_mean});
  }

  const auto w = simpson_weights(m, 0.0, 1.0);
  double integral = 0.0, stat_var = 0.0;
  for (int j = 0; j < m; ++j) {
    integral += w[j] * means[j];
    stat_var += w[j] * w[j] * errs[j] * errs[j];
  }

  // node-doubling quadrature error: Simpson on every other node
  double quad_err = 0.0;
  if ((m - 1) % 4 == 0) {
    const int mc2 = (m + 1) / 2;
    const auto w2 = simpson_weights(mc2, 0.0, 1.0);
    double coarse = 0.0;
    for (int j = 0; j < mc2; ++j) coarse += w2[j] * means[2 * j];
    quad_err = std::abs(integral - coarse);
  }

  EstimateWithError out;
  out.mean = std::log(2.0) + integral;
  out.stderr_of_mean = std::sqrt(stat_var + quad_err * quad_err);
  out.n_samples = mc.n_sweeps * m;
  return out;
}

ConcentrationReport overlap_concentration_probe(
    double t, double qbar, std::span<const std::int64_t> chain_lengths,
    const ModelParams& params, const InteractionKernel& kernel, int n_samples,
    std::uint64_t master_seed, const McConfig& mc) {
  ConcentrationReport report;
  std::vector<double> log_vol, log_val;
  for (std::int64_t len : chain_lengths) {
    const BoxGeometry geometry = BoxGeometry::chain(len);
    std::vector<double> per_sample;
    for (int s = 0; s < n_samples; ++s) {
      const DisorderSample sample(geometry, master_seed, static_cast<std::uint64_t>(s));
      ModelParams p = params;
      p.t = t;
      const EnergyModel model = interpolating_model(p, sample, kernel, geometry);
      ChainState a = make_chain(model, seed::derive(master_seed, seed::kChainRng,
                                                    static_cast<std::uint64_t>(s), 2 * len));
      ChainState b = make_chain(model, seed::derive(master_seed, seed::kChainRng,
                                                    static_cast<std::uint64_t>(s), 2 * len + 1));
      for (std::int64_t i = 0; i < mc.burn_in; ++i) {
        sweep(a, model, 1.0);
        sweep(b, model, 1.0);
      }
      std::vector<double> series;
      series.reserve(static_cast<std::size_t>(mc.n_sweeps));
      for (std::int64_t i = 0; i < mc.n_sweeps; ++i) {
        sweep(a, model, 1.0);
        sweep(b, model, 1.0);
        const double q12 = overlap(a.config, b.config);
        series.push_back((q12 - qbar) * (q12 - qbar));
      }
      per_sample.push_back(blocked_mean(series).mean);
    }
    const auto s = summarize(per_sample);
    ConcentrationRow row;
    row.volume = len;
    row.scaled_second_moment = static_cast<double>(len) * s.mean;
    row.stderr_of_moment = static_cast<double>(len) * s.stderr_of_mean;
    report.rows.push_back(row);
    log_vol.push_back(std::log(static_cast<double>(len)));
    log_val.push_back(std::log(std::max(row.scaled_second_moment, 1e-300)));
  }
  if (log_vol.size() >= 2) {
    report.slope = ls_slope(log_vol, log_val);
    report.bounded = report.slope <= 0.2;
  } else {
    report.bounded = true;  // a single size cannot show growth
  }
  return report;
}

}  // namespace isk
