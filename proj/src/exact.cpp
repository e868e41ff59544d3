#include "isk/exact.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isk/errors.hpp"
#include "isk/stats.hpp"

namespace isk {

namespace {

void check_enum_cap(std::int64_t n, int cap, const char* what) {
  if (n > cap)
    throw SizeError(std::string(what) + ": " + std::to_string(n) + " spins exceeds the " +
                    std::to_string(cap) + "-spin enumeration cap; use the MC engine");
  if (n < 1) throw std::domain_error("enumeration: empty system");
}

// Visits all 2^n configurations in Gray-code order. The visitor receives the
// current energy and configuration; the configuration stays valid only during
// the call.
template <class V>
void for_each_configuration(const EnergyModel& model, V&& visit) {
  const std::int64_t n = model.size();
  SpinConfiguration sigma = SpinConfiguration::all_down(n);
  Eigen::VectorXd psi = local_fields(model, sigma);
  double energy = model_energy(model, sigma);
  visit(energy, sigma);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t c = 1; c < total; ++c) {
    const int k = std::countr_zero(c);  // Gray-code step: flip bit k
    energy += flip_delta(model, psi, sigma, k);
    apply_flip(model, sigma, psi, k);
    visit(energy, sigma);
  }
}

// Pair-state enumeration: outer Gray code over sigma1, full inner sweep over
// sigma2 per outer state. The visitor gets both energies and the spin dot
// product sum_i s1_i s2_i.
template <class V>
void for_each_pair_configuration(const EnergyModel& model, V&& visit) {
  const std::int64_t n = model.size();
  SpinConfiguration sigma1 = SpinConfiguration::all_down(n);
  Eigen::VectorXd psi1 = local_fields(model, sigma1);
  double e1 = model_energy(model, sigma1);

  const SpinConfiguration inner_start = SpinConfiguration::all_down(n);
  const Eigen::VectorXd inner_psi0 = local_fields(model, inner_start);
  const double inner_e0 = model_energy(model, inner_start);

  SpinConfiguration sigma2 = inner_start;
  Eigen::VectorXd psi2 = inner_psi0;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t c1 = 0;; ++c1) {
    // inner sweep at fixed sigma1
    sigma2 = inner_start;
    psi2 = inner_psi0;
    double e2 = inner_e0;
    std::int64_t dot = 0;
    for (std::int64_t i = 0; i < n; ++i) dot += sigma1.spins[i] * sigma2.spins[i];
    visit(e1, e2, dot, sigma1, sigma2);
    for (std::uint64_t c2 = 1; c2 < total; ++c2) {
      const int k = std::countr_zero(c2);
      e2 += flip_delta(model, psi2, sigma2, k);
      dot -= 2 * sigma1.spins[k] * sigma2.spins[k];
      apply_flip(model, sigma2, psi2, k);
      visit(e1, e2, dot, sigma1, sigma2);
    }
    if (c1 + 1 >= total) break;
    const int k = std::countr_zero(c1 + 1);
    e1 += flip_delta(model, psi1, sigma1, k);
    apply_flip(model, sigma1, psi1, k);
  }
}

struct LogSumExp {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double x) {
    if (x <= max) {
      sum += std::exp(x - max);
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  double value() const { return max + std::log(sum); }
};

}  // namespace

double enum_log_partition(const EnergyModel& model) {
  check_enum_cap(model.size(), kMaxEnumSpins, "log_partition");
  LogSumExp lse;
  for_each_configuration(model, [&](double e, const SpinConfiguration&) { lse.add(-e); });
  return lse.value();
}

GibbsSummary gibbs_summary(const EnergyModel& model) {
  check_enum_cap(model.size(), kMaxEnumSpins, "gibbs_summary");
  const std::int64_t n = model.size();
  // pass 1: max exponent
  double emax = -std::numeric_limits<double>::infinity();
  for_each_configuration(model,
                         [&](double e, const SpinConfiguration&) { emax = std::max(emax, -e); });
  // pass 2: normalized accumulation
  double z = 0.0;
  Eigen::VectorXd mag = Eigen::VectorXd::Zero(n);
  for_each_configuration(model, [&](double e, const SpinConfiguration& sigma) {
    const double w = std::exp(-e - emax);
    z += w;
    for (std::int64_t i = 0; i < n; ++i) mag[i] += w * sigma.spins[i];
  });
  GibbsSummary s;
  s.log_partition = emax + std::log(z);
  s.pressure = s.log_partition / static_cast<double>(n);
  s.magnetizations = mag / z;
  return s;
}

double enum_expectation(const EnergyModel& model,
                        const std::function<double(const SpinConfiguration&)>& obs) {
  check_enum_cap(model.size(), kMaxEnumSpins, "expectation");
  double emax = -std::numeric_limits<double>::infinity();
  for_each_configuration(model,
                         [&](double e, const SpinConfiguration&) { emax = std::max(emax, -e); });
  double z = 0.0, acc = 0.0;
  for_each_configuration(model, [&](double e, const SpinConfiguration& sigma) {
    const double w = std::exp(-e - emax);
    z += w;
    acc += w * obs(sigma);
  });
  return acc / z;
}

double log_partition_function(const BoxGeometry& geometry, const ModelParams& params,
                              const DisorderSample& sample, const InteractionKernel& kernel) {
  check_enum_cap(geometry.volume(), kMaxEnumSpins, "partition_function");
  return enum_log_partition(interpolating_model(params, sample, kernel, geometry));
}

double pressure(const BoxGeometry& geometry, const ModelParams& params,
                const DisorderSample& sample, const InteractionKernel& kernel) {
  return log_partition_function(geometry, params, sample, kernel) /
         static_cast<double>(geometry.volume());
}

double rfim_log_partition(const BoxGeometry& geometry, double kappa, double h, double gamma,
                          const DisorderSample& sample, const InteractionKernel& kernel) {
  check_enum_cap(geometry.volume(), kMaxEnumSpins, "rfim_partition");
  return enum_log_partition(rfim_model(kappa, h, gamma, sample.fields(), kernel, geometry));
}

// ---- transfer matrix ----

double transfer_matrix_log_z(std::span<const double> site_fields, double bond) {
  const std::size_t n = site_fields.size();
  if (n == 0) throw std::domain_error("transfer matrix: empty chain");
  // message over sigma in {-1,+1}: index 0 -> -1, 1 -> +1
  double up = std::exp(site_fields[0]);
  double dn = std::exp(-site_fields[0]);
  double log_scale = 0.0;
  const double ep = std::exp(bond), em = std::exp(-bond);
  for (std::size_t i = 1; i < n; ++i) {
    const double fu = std::exp(site_fields[i]), fd = std::exp(-site_fields[i]);
    const double nup = (up * ep + dn * em) * fu;
    const double ndn = (up * em + dn * ep) * fd;
    const double scale = std::max(nup, ndn);
    up = nup / scale;
    dn = ndn / scale;
    log_scale += std::log(scale);
  }
  return log_scale + std::log(up + dn);
}

std::vector<double> transfer_matrix_magnetizations(std::span<const double> site_fields,
                                                   double bond) {
  const std::size_t n = site_fields.size();
  if (n == 0) throw std::domain_error("transfer matrix: empty chain");
  const double ep = std::exp(bond), em = std::exp(-bond);
  // forward messages f_i(sigma_i), normalized per step
  std::vector<double> fu(n), fd(n);
  fu[0] = std::exp(site_fields[0]);
  fd[0] = std::exp(-site_fields[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double gu = std::exp(site_fields[i]), gd = std::exp(-site_fields[i]);
    fu[i] = (fu[i - 1] * ep + fd[i - 1] * em) * gu;
    fd[i] = (fu[i - 1] * em + fd[i - 1] * ep) * gd;
    const double s = fu[i] + fd[i];
    fu[i] /= s;
    fd[i] /= s;
  }
  // backward messages b_i(sigma_i), normalized per step
  std::vector<double> bu(n), bd(n);
  bu[n - 1] = bd[n - 1] = 1.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const double gu = std::exp(site_fields[i + 1]), gd = std::exp(-site_fields[i + 1]);
    bu[i] = ep * gu * bu[i + 1] + em * gd * bd[i + 1];
    bd[i] = em * gu * bu[i + 1] + ep * gd * bd[i + 1];
    const double s = bu[i] + bd[i];
    bu[i] /= s;
    bd[i] /= s;
  }
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double zu = fu[i] * bu[i], zd = fd[i] * bd[i];
    mag[i] = (zu - zd) / (zu + zd);
  }
  return mag;
}

bool is_1d_nearest_neighbor(const InteractionKernel& kernel) {
  if (kernel.dimension() != 1) return false;
  for (const auto& e : kernel.entries())
    if (std::abs(e.displacement[0]) != 1) return false;
  return !kernel.entries().empty();
}

double nn_bond_coefficient(const InteractionKernel& kernel, double kappa) {
  if (!is_1d_nearest_neighbor(kernel))
    throw std::invalid_argument(
        "transfer matrix: only 1D nearest-neighbor kernels are supported");
  std::vector<int> plus{1};
  return kappa * kernel.value(plus);
}

double transfer_matrix_rfim_pressure(std::int64_t length, double kappa, double h,
                                     double gamma, std::span<const double> site_gaussians,
                                     const InteractionKernel& kernel) {
  if (length < 1) throw std::domain_error("transfer matrix: length must be >= 1");
  if (static_cast<std::int64_t>(site_gaussians.size()) != length)
    throw std::domain_error("transfer matrix: field count != length");
  const double bond = nn_bond_coefficient(kernel, kappa);
  std::vector<double> fields(site_gaussians.size());
  for (std::size_t i = 0; i < fields.size(); ++i) fields[i] = h + gamma * site_gaussians[i];
  return transfer_matrix_log_z(fields, bond) / static_cast<double>(length);
}

// ---- two-replica measures ----

namespace {

struct PairExponent {
  double quad = 0.0;  // coefficient of (q12 - q)^2
  double lin = 0.0;   // coefficient of (q12 - q)
  double q = 0.0;

  double operator()(double q12) const {
    const double dq = q12 - q;
    return quad * dq * dq + lin * dq;
  }
  bool trivial() const { return quad == 0.0 && lin == 0.0; }
};

EnergyModel measure_model(const MeasureSpec& spec, const BoxGeometry& geometry,
                          const ModelParams& params, const DisorderSample& sample,
                          const InteractionKernel& kernel) {
  ModelParams p = params;
  p.t = spec.kind == MeasureSpec::Kind::Tilted ? 0.0 : spec.t;
  p.q = spec.q;
  return interpolating_model(p, sample, kernel, geometry);
}

PairExponent measure_exponent(const MeasureSpec& spec, double beta, std::int64_t n) {
  PairExponent ex;
  ex.q = spec.q;
  switch (spec.kind) {
    case MeasureSpec::Kind::Coupled:
      ex.quad = 0.5 * beta * beta * static_cast<double>(n) * spec.lambda;
      break;
    case MeasureSpec::Kind::Tilted:
      ex.lin = spec.mu * static_cast<double>(n);
      break;
    default:
      break;
  }
  return ex;
}

double pair_log_partition(const EnergyModel& model, const PairExponent& extra) {
  check_enum_cap(model.size(), kMaxPairSpins, "two-replica partition");
  const double inv_n = 1.0 / static_cast<double>(model.size());
  LogSumExp lse;
  for_each_pair_configuration(model, [&](double e1, double e2, std::int64_t dot,
                                         const SpinConfiguration&, const SpinConfiguration&) {
    lse.add(-e1 - e2 + extra(dot * inv_n));
  });
  return lse.value();
}

double pair_expectation(
    const EnergyModel& model, const PairExponent& extra,
    const std::function<double(const SpinConfiguration&, const SpinConfiguration&)>& obs) {
  check_enum_cap(model.size(), kMaxPairSpins, "two-replica expectation");
  const double inv_n = 1.0 / static_cast<double>(model.size());
  double emax = -std::numeric_limits<double>::infinity();
  for_each_pair_configuration(model, [&](double e1, double e2, std::int64_t dot,
                                         const SpinConfiguration&, const SpinConfiguration&) {
    emax = std::max(emax, -e1 - e2 + extra(dot * inv_n));
  });
  double z = 0.0, acc = 0.0;
  for_each_pair_configuration(
      model, [&](double e1, double e2, std::int64_t dot, const SpinConfiguration& s1,
                 const SpinConfiguration& s2) {
        const double w = std::exp(-e1 - e2 + extra(dot * inv_n) - emax);
        z += w;
        acc += w * obs(s1, s2);
      });
  return acc / z;
}

// fast path for observables that depend on the overlap only
double pair_overlap_fn_expectation(const EnergyModel& model, const PairExponent& extra,
                                   const std::function<double(double)>& f) {
  check_enum_cap(model.size(), kMaxPairSpins, "two-replica expectation");
  const double inv_n = 1.0 / static_cast<double>(model.size());
  double emax = -std::numeric_limits<double>::infinity();
  for_each_pair_configuration(model, [&](double e1, double e2, std::int64_t dot,
                                         const SpinConfiguration&, const SpinConfiguration&) {
    emax = std::max(emax, -e1 - e2 + extra(dot * inv_n));
  });
  double z = 0.0, acc = 0.0;
  for_each_pair_configuration(model, [&](double e1, double e2, std::int64_t dot,
                                         const SpinConfiguration&, const SpinConfiguration&) {
    const double q12 = dot * inv_n;
    const double w = std::exp(-e1 - e2 + extra(q12) - emax);
    z += w;
    acc += w * f(q12);
  });
  return acc / z;
}

}  // namespace

double gibbs_expectation(const std::function<double(const SpinConfiguration&)>& obs,
                         const MeasureSpec& spec, const BoxGeometry& geometry,
                         const ModelParams& params, const DisorderSample& sample,
                         const InteractionKernel& kernel) {
  if (spec.kind != MeasureSpec::Kind::Single)
    throw std::invalid_argument("gibbs_expectation: single-replica observable under a "
                                "two-replica measure; use the pair overload");
  check_enum_cap(geometry.volume(), kMaxEnumSpins, "gibbs_expectation");
  return enum_expectation(measure_model(spec, geometry, params, sample, kernel), obs);
}

double gibbs_expectation(
    const std::function<double(const SpinConfiguration&, const SpinConfiguration&)>& obs,
    const MeasureSpec& spec, const BoxGeometry& geometry, const ModelParams& params,
    const DisorderSample& sample, const InteractionKernel& kernel) {
  if (spec.kind == MeasureSpec::Kind::Single)
    throw std::invalid_argument("gibbs_expectation: pair observable needs a two-replica measure");
  const EnergyModel model = measure_model(spec, geometry, params, sample, kernel);
  return pair_expectation(model, measure_exponent(spec, params.beta, geometry.volume()), obs);
}

double overlap_moment(int order, double center, const MeasureSpec& spec,
                      const BoxGeometry& geometry, const ModelParams& params,
                      const DisorderSample& sample, const InteractionKernel& kernel) {
  if (order != 1 && order != 2)
    throw std::domain_error("overlap_moment: order must be 1 or 2");
  if (spec.kind == MeasureSpec::Kind::Single)
    throw std::invalid_argument("overlap_moment: needs a two-replica measure");
  const EnergyModel model = measure_model(spec, geometry, params, sample, kernel);
  const auto extra = measure_exponent(spec, params.beta, geometry.volume());
  return pair_overlap_fn_expectation(model, extra, [&](double q12) {
    const double d = q12 - center;
    return order == 1 ? d : d * d;
  });
}

double coupled_log_partition(double t, double lambda, double q, const BoxGeometry& geometry,
                             const ModelParams& params, const DisorderSample& sample,
                             const InteractionKernel& kernel) {
  if (lambda < 0) throw std::domain_error("coupled_log_partition: lambda must be >= 0");
  const auto spec = MeasureSpec::coupled(t, lambda, q);
  const EnergyModel model = measure_model(spec, geometry, params, sample, kernel);
  return pair_log_partition(model, measure_exponent(spec, params.beta, geometry.volume()));
}

double replica_generating_function(double mu, double q, const BoxGeometry& geometry,
                                   double kappa, double h, double gamma,
                                   const DisorderSample& sample,
                                   const InteractionKernel& kernel) {
  const std::int64_t n = geometry.volume();
  check_enum_cap(n, kMaxPairSpins, "replica_generating_function");
  const EnergyModel model = rfim_model(kappa, h, gamma, sample.fields(), kernel, geometry);
  PairExponent tilt{0.0, mu * static_cast<double>(n), q};
  const double log_z_tilted = pair_log_partition(model, tilt);
  const double log_z = enum_log_partition(model);
  return (log_z_tilted - 2.0 * log_z) / (2.0 * static_cast<double>(n));
}

// ---- interpolation derivative ----

double interpolation_derivative_analytic(const BoxGeometry& geometry,
                                         const ModelParams& params,
                                         const DisorderSample& sample,
                                         const InteractionKernel& kernel) {
  params.validate();
  if (params.t <= 0.0 || params.t >= 1.0)
    throw std::domain_error("interpolation derivative: t must lie strictly inside (0,1)");
  if (params.beta == 0.0) return 0.0;
  const double sk_coef = params.beta / (2.0 * std::sqrt(params.t));
  const double field_coef =
      params.beta * std::sqrt(params.q) / (2.0 * std::sqrt(1.0 - params.t));
  const EnergyModel model = interpolating_model(params, sample, kernel, geometry);
  return enum_expectation(model, [&](const SpinConfiguration& sigma) {
    double j_dot = 0.0;
    for (std::int64_t i = 0; i < sigma.size(); ++i) j_dot += sigma.spins[i] * sample.field(i);
    return -(sk_coef * sk_energy(sigma, sample, geometry) + field_coef * j_dot);
  });
}

std::vector<DerivativeCheckPoint> interpolation_derivative_check(
    const DerivativeCheckConfig& config, const BoxGeometry& geometry, ModelParams params,
    const InteractionKernel& kernel) {
  for (double t : config.t_grid)
    if (t - 2.0 * config.fd_step <= 0.0 || t + 2.0 * config.fd_step >= 1.0)
      throw std::domain_error("interpolation_derivative_check: t grid must avoid endpoints");
  params.q = config.q;
  const double n = static_cast<double>(geometry.volume());
  const double rhs_const =
      0.25 * params.beta * params.beta * (1.0 - config.q) * (1.0 - config.q);

  std::vector<DerivativeCheckPoint> out;
  for (double t : config.t_grid) {
    DerivativeCheckPoint pt;
    pt.t = t;
    std::vector<double> lhs, rhs, residual;
    for (int s = 0; s < config.n_samples; ++s) {
      const DisorderSample sample(geometry, config.master_seed, static_cast<std::uint64_t>(s));
      ModelParams p = params;
      p.t = t;
      const double analytic =
          interpolation_derivative_analytic(geometry, p, sample, kernel);
      // fourth-order central stencil at step fd_step: the sqrt(t) factors make
      // the third derivative large near t = 0.1, which a plain two-point
      // stencil cannot resolve to 1e-6 relative
      auto log_z_at = [&](double tt) {
        ModelParams pp = p;
        pp.t = tt;
        return log_partition_function(geometry, pp, sample, kernel);
      };
      const double d = config.fd_step;
      const double fd = (log_z_at(t - 2 * d) - 8.0 * log_z_at(t - d) +
                         8.0 * log_z_at(t + d) - log_z_at(t + 2 * d)) /
                        (12.0 * d);
      const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-12});
      pt.max_rel_fd_error = std::max(pt.max_rel_fd_error, std::abs(analytic - fd) / scale);

      const double second = overlap_moment(2, config.q, MeasureSpec::replica_pair(t, config.q),
                                           geometry, p, sample, kernel);
      lhs.push_back(analytic / n);
      rhs.push_back(rhs_const - 0.25 * params.beta * params.beta * second);
      residual.push_back(lhs.back() - rhs.back());
    }
    pt.lhs_mean = summarize(lhs).mean;
    pt.rhs_mean = summarize(rhs).mean;
    const auto res = summarize(residual);
    pt.residual_mean = res.mean;
    pt.residual_stderr = res.stderr_of_mean;
    out.push_back(pt);
  }
  return out;
}

}  // namespace isk
