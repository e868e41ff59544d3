#include "isk/rs.hpp"

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

BoxGeometry estimator_geometry(const RSEstimatorConfig& config) {
  if (config.box_radius >= 0) return BoxGeometry::box(config.dimension, config.box_radius);
  if (config.dimension != 1)
    throw ValidationError("rs estimator: chains are 1D; set box_radius for d > 1");
  return BoxGeometry::chain(config.chain_length);
}

RSEstimatorConfig::Engine select_engine(const RSEstimatorConfig& config,
                                        const BoxGeometry& geometry,
                                        const InteractionKernel& kernel) {
  using E = RSEstimatorConfig::Engine;
  if (config.engine != E::Auto) return config.engine;
  if (geometry.volume() <= 20) return E::Enumeration;
  if (geometry.dimension() == 1 && is_1d_nearest_neighbor(kernel)) return E::TransferMatrix;
  return E::Mc;
}

const char* engine_name(RSEstimatorConfig::Engine e) {
  switch (e) {
    case RSEstimatorConfig::Engine::Enumeration: return "enumeration";
    case RSEstimatorConfig::Engine::TransferMatrix: return "transfer-matrix";
    case RSEstimatorConfig::Engine::Mc: return "mc";
    default: return "auto";
  }
}

double one_rfim_pressure(RSEstimatorConfig::Engine engine, const BoxGeometry& geometry,
                         double kappa, double h, double gamma,
                         const std::vector<double>& gaussians,
                         const InteractionKernel& kernel, const RSEstimatorConfig& config,
                         std::uint64_t sample_index) {
  using E = RSEstimatorConfig::Engine;
  switch (engine) {
    case E::Enumeration: {
      const EnergyModel model = rfim_model(kappa, h, gamma, gaussians, kernel, geometry);
      return enum_log_partition(model) / static_cast<double>(geometry.volume());
    }
    case E::TransferMatrix:
      return transfer_matrix_rfim_pressure(geometry.volume(), kappa, h, gamma, gaussians,
                                           kernel);
    case E::Mc: {
      const EnergyModel model = rfim_model(kappa, h, gamma, gaussians, kernel, geometry);
      const auto nodes = uniform_nodes(21);
      return thermo_integration_pressure(
                 model, nodes,
                 seed::derive(config.master_seed, seed::kChainRng, sample_index, 0),
                 config.mc)
          .mean;
    }
    default:
      throw std::logic_error("unresolved engine");
  }
}

}  // namespace

PressureEstimate estimate_rfim_pressure(double kappa, double h, double gamma,
                                        const InteractionKernel& kernel,
                                        const RSEstimatorConfig& config) {
  const BoxGeometry geometry = estimator_geometry(config);
  const auto engine = select_engine(config, geometry, kernel);
  const auto values = parallel_map(
      config.n_disorder_samples, config.workers, [&](std::int64_t s) {
        auto gaussians = sample_site_fields(geometry, config.master_seed,
                                            static_cast<std::uint64_t>(s));
        double v = one_rfim_pressure(engine, geometry, kappa, h, gamma, gaussians, kernel,
                                     config, static_cast<std::uint64_t>(s));
        if (config.antithetic) {
          for (double& g : gaussians) g = -g;
          v = 0.5 * (v + one_rfim_pressure(engine, geometry, kappa, h, gamma, gaussians,
                                           kernel, config, static_cast<std::uint64_t>(s)));
        }
        return v;
      });
  const auto s = summarize(values);
  PressureEstimate out;
  out.mean = s.mean;
  out.stderr_of_mean = s.stderr_of_mean;
  out.engine = engine_name(engine);
  out.volume = geometry.volume();
  out.n_samples = config.n_disorder_samples;
  return out;
}

RSFunctionalPoint evaluate_F(double q, double kappa, double beta, double h,
                             const InteractionKernel& kernel,
                             const RSEstimatorConfig& config) {
  if (q < 0.0 || q > 1.0) throw std::domain_error("evaluate_F: q must lie in [0,1]");
  const auto est = estimate_rfim_pressure(kappa, h, beta * std::sqrt(q), kernel, config);
  RSFunctionalPoint pt;
  pt.q = q;
  pt.rfim_pressure = est.mean;
  pt.rfim_stderr = est.stderr_of_mean;
  pt.F_value = est.mean + 0.25 * beta * beta * (1.0 - q) * (1.0 - q);
  pt.engine = est.engine;
  pt.n_disorder_samples = est.n_samples;
  pt.volume = est.volume;
  return pt;
}

RSSolution minimize_F(double kappa, double beta, double h, const InteractionKernel& kernel,
                      const RSEstimatorConfig& config, const RSGridConfig& grid) {
  if (beta == 0.0)
    throw std::domain_error(
        "minimize_F: beta = 0 makes F flat in q; the minimizer is undefined");

  // Coarse scan, optionally at a reduced sample count: with common random
  // numbers the scan sees a smooth surrogate of the same functional, so it is
  // only trusted to bracket the minimizer, never for the reported value.
  RSEstimatorConfig scan_config = config;
  if (grid.scan_samples > 0)
    scan_config.n_disorder_samples = std::min(grid.scan_samples, config.n_disorder_samples);
  const int n_grid = static_cast<int>(std::llround(1.0 / grid.grid_step));
  std::vector<RSFunctionalPoint> pts;
  pts.reserve(n_grid + 1);
  for (int k = 0; k <= n_grid; ++k)
    pts.push_back(evaluate_F(std::min(1.0, k * grid.grid_step), kappa, beta, h, kernel,
                             scan_config));

  std::size_t best = 0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].F_value < pts[best].F_value) best = k;

  RSSolution sol;
  // local grid minima competitive with the best point flag near-degeneracy
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const bool left_ok = k == 0 || pts[k].F_value <= pts[k - 1].F_value;
    const bool right_ok = k + 1 == pts.size() || pts[k].F_value <= pts[k + 1].F_value;
    if (k != best && left_ok && right_ok &&
        pts[k].F_value <= pts[best].F_value + 2.0 * pts[best].rfim_stderr)
      sol.near_degenerate_q.push_back(pts[k].q);
  }

  // golden-section refinement at full precision; the bracket spans two grid
  // steps each way so a scan off by one step still contains the minimizer
  double lo = std::max(0.0, pts[best].q - 2.0 * grid.grid_step);
  double hi = std::min(1.0, pts[best].q + 2.0 * grid.grid_step);
  const auto center = evaluate_F(pts[best].q, kappa, beta, h, kernel, config);
  double best_q = center.q;
  double best_f = center.F_value;
  double best_err = center.rfim_stderr;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  auto f1 = evaluate_F(x1, kappa, beta, h, kernel, config);
  auto f2 = evaluate_F(x2, kappa, beta, h, kernel, config);
  auto track = [&](const RSFunctionalPoint& p) {
    if (p.F_value < best_f) {
      best_f = p.F_value;
      best_q = p.q;
      best_err = p.rfim_stderr;
    }
  };
  track(f1);
  track(f2);
  while (b - a > grid.tolerance) {
    if (f1.F_value <= f2.F_value) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = evaluate_F(x1, kappa, beta, h, kernel, config);
      track(f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = evaluate_F(x2, kappa, beta, h, kernel, config);
      track(f2);
    }
  }
  sol.qbar = best_q;
  sol.F_min = best_f;
  sol.F_min_stderr = best_err;
  sol.grid_points = std::move(pts);
  return sol;
}

double fixed_point_qbar(const BoxGeometry& geometry, double kappa, double beta, double h,
                        const InteractionKernel& kernel, const RSEstimatorConfig& config,
                        const FixedPointConfig& iteration,
                        std::vector<double>* trajectory) {
  if (beta < 0 || kappa < 0)
    throw std::domain_error("fixed_point_qbar: kappa, beta must be >= 0");
  const auto engine = select_engine(config, geometry, kernel);
  const std::int64_t n = geometry.volume();

  // Phi(q) = |Lambda|^{-1} sum_i E <sigma_i>^2 at gamma = beta sqrt(q),
  // with the same field draws on every call (common random numbers).
  auto phi = [&](double q) {
    const double gamma = beta * std::sqrt(q);
    const auto values = parallel_map(
        config.n_disorder_samples, config.workers, [&](std::int64_t s) {
          const auto gaussians = sample_site_fields(geometry, config.master_seed,
                                                    static_cast<std::uint64_t>(s));
          std::vector<double> mags;
          if (engine == RSEstimatorConfig::Engine::TransferMatrix) {
            std::vector<double> fields(gaussians.size());
            for (std::size_t i = 0; i < fields.size(); ++i)
              fields[i] = h + gamma * gaussians[i];
            mags = transfer_matrix_magnetizations(fields, nn_bond_coefficient(kernel, kappa));
          } else {
            const EnergyModel model =
                rfim_model(kappa, h, gamma, gaussians, kernel, geometry);
            const auto summary = gibbs_summary(model);
            mags.assign(summary.magnetizations.data(),
                        summary.magnetizations.data() + summary.magnetizations.size());
          }
          double acc = 0.0;
          for (double m : mags) acc += m * m;
          return acc / static_cast<double>(n);
        });
    return summarize(values).mean;
  };

  double q = std::clamp(iteration.q_start, 0.0, 1.0);
  std::vector<double> iterates{q};
  auto finish = [&](double result) {
    if (trajectory) trajectory->insert(trajectory->end(), iterates.begin(), iterates.end());
    return result;
  };
  for (int it = 0; it < iteration.max_iterations; ++it) {
    const double target = phi(q);
    if (std::abs(target - q) <= iteration.tolerance) return finish(q);
    q = std::clamp((1.0 - iteration.omega) * q + iteration.omega * target, 0.0, 1.0);
    iterates.push_back(q);
  }
  if (trajectory) trajectory->insert(trajectory->end(), iterates.begin(), iterates.end());
  throw ConvergenceError("fixed_point_qbar: no convergence after " +
                             std::to_string(iteration.max_iterations) + " iterations",
                         iterates);
}

SkRsReference sk_rs_reference(double beta, double h, int quadrature_order) {
  if (quadrature_order < 40)
    throw std::domain_error("sk_rs_reference: quadrature order must be >= 40");
  const GaussHermite gh(quadrature_order);
  double q = 0.5;
  std::vector<double> trajectory{q};
  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    const double gamma = beta * std::sqrt(q);
    const double target = gh.average([&](double z) {
      const double th = std::tanh(h + gamma * z);
      return th * th;
    });
    if (std::abs(target - q) <= 1e-12) {
      converged = true;
      break;
    }
    q = 0.5 * q + 0.5 * target;
    trajectory.push_back(q);
  }
  if (!converged)
    throw ConvergenceError("sk_rs_reference: fixed point did not converge", trajectory);

  SkRsReference out;
  out.q_root = q;
  const double gamma = beta * std::sqrt(q);
  out.p_rs = std::log(2.0) +
             gh.average([&](double z) { return std::log(std::cosh(h + gamma * z)); }) +
             0.25 * beta * beta * (1.0 - q) * (1.0 - q);
  return out;
}

EstimateWithError rs_pressure_prediction(double kappa, double beta, double h,
                                         const InteractionKernel& kernel,
                                         const RSEstimatorConfig& config,
                                         const RSGridConfig& grid) {
  if (beta == 0.0) {
    // F collapses to the Ising pressure, flat in q
    const auto est = estimate_rfim_pressure(kappa, h, 0.0, kernel, config);
    return {est.mean, est.stderr_of_mean, est.n_samples, 0.0};
  }
  const RSSolution sol = minimize_F(kappa, beta, h, kernel, config, grid);
  return {sol.F_min, sol.F_min_stderr, config.n_disorder_samples, 0.0};
}

CurvatureResult curvature_check(double kappa, double beta, double h, double qbar,
                                const InteractionKernel& kernel,
                                const RSEstimatorConfig& config, double step) {
  CurvatureResult r;
  if (qbar - step < 0.0 || qbar + step > 1.0) {
    r.at_boundary = true;
    return r;
  }
  const double f0 = evaluate_F(qbar, kappa, beta, h, kernel, config).F_value;
  const double fp = evaluate_F(qbar + step, kappa, beta, h, kernel, config).F_value;
  const double fm = evaluate_F(qbar - step, kappa, beta, h, kernel, config).F_value;
  r.value = (fp - 2.0 * f0 + fm) / (step * step);
  return r;
}

}  // namespace isk
