#include "isk/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "isk/disorder.hpp"
#include "isk/errors.hpp"
#include "isk/exact.hpp"
#include "isk/fluct.hpp"
#include "isk/mc.hpp"
#include "isk/parallel.hpp"
#include "isk/rs.hpp"

namespace isk::cli {

namespace {

const char* kSubcommands[] = {"pressure",     "rs-solve", "interpolate-check", "dobrushin",
                              "fluctuations", "gamma",    "mc-validate"};

bool known_subcommand(const std::string& s) {
  for (const char* k : kSubcommands)
    if (s == k) return true;
  return false;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// fixed %.17g formatting: deterministic, round-trip exact
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("config field '" + key + "': not a number: '" + it->second + "'");
  }
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("config field '" + key + "': not an integer: '" + it->second + "'");
  }
}

std::vector<std::int64_t> ExperimentConfig::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  const auto it = values.find(key);
  if (it == values.end()) return out;
  std::istringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoll(trim(tok)));
    } catch (const std::logic_error&) {
      throw ValidationError("config field '" + key + "': bad list entry '" + tok + "'");
    }
  }
  return out;
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = values.find(key);
  if (it == values.end()) return out;
  std::istringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(trim(tok)));
    } catch (const std::logic_error&) {
      throw ValidationError("config field '" + key + "': bad list entry '" + tok + "'");
    }
  }
  return out;
}

ExperimentConfig parse_config_file(std::istream& in, const std::string& subcommand) {
  if (!known_subcommand(subcommand))
    throw ValidationError("unknown subcommand '" + subcommand + "'");
  ExperimentConfig cfg;
  cfg.subcommand = subcommand;

  std::map<std::string, std::string> global, scoped;
  std::string line, section = "global";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(lineno) +
                              ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "global" && !known_subcommand(section))
        section = "";  // foreign section: ignored
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (section == "global")
      global[key] = value;
    else if (section == subcommand)
      scoped[key] = value;
  }
  cfg.values = std::move(global);
  for (auto& [k, v] : scoped) cfg.values[k] = v;
  return cfg;
}

std::string canonicalize(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "subcommand = " << config.subcommand << "\n";
  for (const auto& [k, v] : config.values) out << k << " = " << v << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string canon = canonicalize(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---- emitters ----

namespace {

// empty inputs are a warned no-op so plot files never appear half-written
bool warn_if_empty(std::size_t n, const char* kind) {
  if (n > 0) return false;
  std::cerr << "isk: no data for " << kind << " plot, skipping\n";
  return true;
}

}  // namespace

void emit_fq_curve(std::ostream& out, std::uint64_t hash,
                   const std::vector<std::vector<double>>& rows) {
  if (warn_if_empty(rows.size(), "F(q)")) return;
  out << "# q F stderr  config_hash=" << std::hex << hash << std::dec << "\n";
  for (const auto& r : rows) out << fmt(r[0]) << ' ' << fmt(r[1]) << ' ' << fmt(r[2]) << '\n';
}

void emit_t_derivative(std::ostream& out, std::uint64_t hash,
                       const std::vector<std::vector<double>>& rows) {
  if (warn_if_empty(rows.size(), "t-derivative")) return;
  out << "# t lhs rhs residual stderr  config_hash=" << std::hex << hash << std::dec << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << fmt(r[i]);
    out << '\n';
  }
}

void emit_histogram(std::ostream& out, std::uint64_t hash, const std::vector<double>& edges,
                    const std::vector<std::int64_t>& counts) {
  if (warn_if_empty(counts.size(), "histogram")) return;
  out << "# bin_lo bin_hi count  config_hash=" << std::hex << hash << std::dec << "\n";
  for (std::size_t b = 0; b < counts.size(); ++b)
    out << fmt(edges[b]) << ' ' << fmt(edges[b + 1]) << ' ' << counts[b] << '\n';
}

void emit_qq(std::ostream& out, std::uint64_t hash,
             const std::vector<std::pair<double, double>>& points) {
  if (warn_if_empty(points.size(), "qq")) return;
  out << "# theoretical empirical  config_hash=" << std::hex << hash << std::dec << "\n";
  for (const auto& [t, e] : points) out << fmt(t) << ' ' << fmt(e) << '\n';
}

void emit_variance_table(std::ostream& out, std::uint64_t hash,
                         const std::vector<std::int64_t>& volumes,
                         const std::vector<double>& variances) {
  if (warn_if_empty(volumes.size(), "variance-scaling")) return;
  out << "# volume variance  config_hash=" << std::hex << hash << std::dec << "\n";
  for (std::size_t i = 0; i < volumes.size(); ++i)
    out << volumes[i] << ' ' << fmt(variances[i]) << '\n';
}

// ---- run ----

namespace {

using nlohmann::json;

struct RunContext {
  const ExperimentConfig& cfg;
  std::uint64_t hash;
  std::filesystem::path out_dir;
  int workers;
  std::uint64_t seed;
  json results = json::object();
  std::vector<ResultRecord> records;
  std::vector<std::string> detail_lines;  // "sample_index,quantity,value"

  void add_result(const std::string& name, double value, double error = 0.0) {
    results[name] = {{"value", value}, {"error", error}};
    records.push_back({cfg.subcommand, hash, name, value, error, "nats", ""});
  }
  void add_detail(std::int64_t sample, const std::string& quantity, double value) {
    detail_lines.push_back(std::to_string(sample) + "," + quantity + "," + fmt(value));
  }
};

BoxGeometry geometry_from(const ExperimentConfig& cfg) {
  if (cfg.has("L")) {
    if (cfg.get_int("d", 1) != 1)
      throw ValidationError("config field 'L': chains are 1D; use d/N for boxes");
    return BoxGeometry::chain(cfg.get_int("L", 0));
  }
  const int d = static_cast<int>(cfg.get_int("d", 1));
  if (!cfg.has("N")) throw ValidationError("config: geometry needs N (box radius) or L");
  return BoxGeometry::box(d, static_cast<int>(cfg.get_int("N", 0)));
}

InteractionKernel kernel_from(const ExperimentConfig& cfg) {
  const int d = static_cast<int>(cfg.get_int("d", 1));
  return InteractionKernel::parse(cfg.get_string("kernel", "nn"), d);
}

ModelParams params_from(const ExperimentConfig& cfg) {
  ModelParams p;
  p.kappa = cfg.get_double("kappa", 0.0);
  p.beta = cfg.get_double("beta", 0.0);
  p.h = cfg.get_double("h", 0.0);
  p.gamma = cfg.get_double("gamma", 0.0);
  p.t = cfg.get_double("t", 1.0);
  p.q = cfg.get_double("q", 0.0);
  p.lambda = cfg.get_double("lambda", 0.0);
  p.mu = cfg.get_double("mu", 0.0);
  try {
    p.validate();
  } catch (const std::domain_error& e) {
    throw ValidationError(std::string("config params: ") + e.what());
  }
  return p;
}

McConfig mc_from(const ExperimentConfig& cfg) {
  McConfig mc;
  mc.burn_in = cfg.get_int("burn_in", 1000);
  mc.n_sweeps = cfg.get_int("sweeps", 10000);
  if (mc.burn_in < 0 || mc.n_sweeps <= 0)
    throw ValidationError("config: burn_in >= 0 and sweeps > 0 required");
  return mc;
}

RSEstimatorConfig rs_config_from(const ExperimentConfig& cfg, std::uint64_t seed,
                                 int workers) {
  RSEstimatorConfig rc;
  const std::string engine = cfg.get_string("engine", "auto");
  if (engine == "auto")
    rc.engine = RSEstimatorConfig::Engine::Auto;
  else if (engine == "exact")
    rc.engine = RSEstimatorConfig::Engine::Enumeration;
  else if (engine == "tm")
    rc.engine = RSEstimatorConfig::Engine::TransferMatrix;
  else if (engine == "mc")
    rc.engine = RSEstimatorConfig::Engine::Mc;
  else
    throw ValidationError("config field 'engine': expected auto|exact|tm|mc");
  rc.chain_length = cfg.get_int("chain_length", 256);
  rc.dimension = static_cast<int>(cfg.get_int("d", 1));
  if (cfg.has("N")) rc.box_radius = static_cast<int>(cfg.get_int("N", -1));
  rc.n_disorder_samples = static_cast<int>(cfg.get_int("samples", 200));
  rc.master_seed = seed;
  rc.antithetic = cfg.get_int("antithetic", 1) != 0;
  rc.mc = mc_from(cfg);
  rc.workers = workers;
  return rc;
}

void run_pressure(RunContext& ctx) {
  const auto geometry = geometry_from(ctx.cfg);
  const auto kernel = kernel_from(ctx.cfg);
  const auto params = params_from(ctx.cfg);
  const int n_samples = static_cast<int>(ctx.cfg.get_int("samples", 100));
  const std::string engine = ctx.cfg.get_string("engine", "auto");
  EnsembleEngine ee;
  if (engine == "mc")
    ee = EnsembleEngine::Mc;
  else if (engine == "exact" || engine == "auto")
    ee = EnsembleEngine::Exact;
  else
    throw ValidationError("pressure: engine must be exact|mc|auto");

  const auto ensemble = ensemble_pressures(geometry, params, n_samples, ee, kernel,
                                           ctx.seed, ctx.workers, mc_from(ctx.cfg));
  ctx.add_result("pressure_mean", ensemble.mean,
                 std::sqrt(ensemble.variance / n_samples));
  ctx.add_result("pressure_variance", ensemble.variance);
  ctx.add_result("rescaled_variance", ensemble.rescaled_variance);
  for (std::size_t s = 0; s < ensemble.pressures.size(); ++s)
    ctx.add_detail(static_cast<std::int64_t>(s), "pressure", ensemble.pressures[s]);
}

void run_rs_solve(RunContext& ctx) {
  const auto kernel = kernel_from(ctx.cfg);
  const double kappa = ctx.cfg.get_double("kappa", 0.0);
  const double beta = ctx.cfg.get_double("beta", 0.0);
  const double h = ctx.cfg.get_double("h", 0.0);
  auto rc = rs_config_from(ctx.cfg, ctx.seed, ctx.workers);
  RSGridConfig grid;
  grid.grid_step = ctx.cfg.get_double("grid_step", 0.01);

  RSSolution sol = minimize_F(kappa, beta, h, kernel, rc, grid);
  const BoxGeometry fp_geometry =
      rc.box_radius >= 0 ? BoxGeometry::box(rc.dimension, rc.box_radius)
                         : BoxGeometry::chain(rc.chain_length);
  std::vector<double> fp_trajectory;
  sol.fixed_point_q =
      fixed_point_qbar(fp_geometry, kappa, beta, h, kernel, rc, {}, &fp_trajectory);
  sol.agreement_gap = std::abs(sol.qbar - sol.fixed_point_q);
  for (std::size_t it = 0; it < fp_trajectory.size(); ++it)
    ctx.add_detail(static_cast<std::int64_t>(it), "fixed_point_iterate", fp_trajectory[it]);
  const auto curv = curvature_check(kappa, beta, h, sol.qbar, kernel, rc);
  if (!curv.at_boundary) sol.second_derivative_estimate = curv.value;

  ctx.add_result("qbar", sol.qbar);
  ctx.add_result("F_min", sol.F_min, sol.F_min_stderr);
  ctx.add_result("fixed_point_q", sol.fixed_point_q);
  ctx.add_result("agreement_gap", sol.agreement_gap);
  ctx.add_result("curvature", sol.second_derivative_estimate);
  ctx.add_result("near_degenerate_count", static_cast<double>(sol.near_degenerate_q.size()));
  if (kappa == 0.0 && beta > 0.0) {
    const auto ref = sk_rs_reference(beta, h);
    ctx.add_result("sk_reference_q", ref.q_root);
    ctx.add_result("sk_reference_pressure", ref.p_rs);
  }

  std::vector<std::vector<double>> rows;
  for (const auto& pt : sol.grid_points) {
    rows.push_back({pt.q, pt.F_value, pt.rfim_stderr});
    ctx.add_detail(static_cast<std::int64_t>(rows.size() - 1), "F_of_q", pt.F_value);
  }
  std::ofstream out(ctx.out_dir / "fq_curve.dat");
  emit_fq_curve(out, ctx.hash, rows);
}

void run_interpolate_check(RunContext& ctx) {
  const auto geometry = geometry_from(ctx.cfg);
  const auto kernel = kernel_from(ctx.cfg);
  const auto params = params_from(ctx.cfg);
  DerivativeCheckConfig dc;
  dc.t_grid = ctx.cfg.get_double_list("t_grid");
  if (dc.t_grid.empty()) dc.t_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  dc.q = params.q;
  dc.n_samples = static_cast<int>(ctx.cfg.get_int("samples", 100));
  dc.master_seed = ctx.seed;

  const auto points = interpolation_derivative_check(dc, geometry, params, kernel);
  double max_fd = 0.0, max_z = 0.0;
  std::vector<std::vector<double>> rows;
  for (const auto& pt : points) {
    max_fd = std::max(max_fd, pt.max_rel_fd_error);
    const double z =
        pt.residual_stderr > 0 ? std::abs(pt.residual_mean) / pt.residual_stderr : 0.0;
    max_z = std::max(max_z, z);
    rows.push_back({pt.t, pt.lhs_mean, pt.rhs_mean, pt.residual_mean, pt.residual_stderr});
    ctx.add_detail(static_cast<std::int64_t>(rows.size() - 1), "residual",
                   pt.residual_mean);
  }
  ctx.add_result("max_rel_fd_error", max_fd);
  ctx.add_result("max_residual_zscore", max_z);
  std::ofstream out(ctx.out_dir / "t_derivative.dat");
  emit_t_derivative(out, ctx.hash, rows);
}

void run_dobrushin(RunContext& ctx) {
  const auto kernel = kernel_from(ctx.cfg);
  const double kappa = ctx.cfg.get_double("kappa", 0.0);
  const auto report = uniqueness_check(kernel, kappa);
  ctx.add_result("kernel_sum", report.kernel_sum);
  ctx.add_result("kappa1", report.kappa1);
  ctx.add_result("inside", report.inside ? 1.0 : 0.0);
  ctx.add_result("max_row_sum", report.max_row_sum);
  ctx.add_result("correlation_length_bound", correlation_length_bound(report));
}

void run_fluctuations(RunContext& ctx) {
  const auto geometry = geometry_from(ctx.cfg);
  const auto kernel = kernel_from(ctx.cfg);
  const auto params = params_from(ctx.cfg);
  const int n_samples = static_cast<int>(ctx.cfg.get_int("samples", 500));
  const auto ensemble = ensemble_pressures(geometry, params, n_samples,
                                           EnsembleEngine::Exact, kernel, ctx.seed,
                                           ctx.workers);
  ctx.add_result("pressure_mean", ensemble.mean);
  ctx.add_result("pressure_variance", ensemble.variance);
  ctx.add_result("rescaled_variance", ensemble.rescaled_variance);

  const auto ks = clt_test(ensemble);
  ctx.add_result("ks_distance", ks.distance);
  ctx.add_result("ks_pvalue", ks.p_value);
  ctx.add_result("skewness", ks.skewness);
  ctx.add_result("excess_kurtosis", ks.excess_kurtosis);
  ctx.add_result("degenerate", ks.degenerate ? 1.0 : 0.0);

  for (std::size_t s = 0; s < ensemble.pressures.size(); ++s)
    ctx.add_detail(static_cast<std::int64_t>(s), "pressure", ensemble.pressures[s]);

  if (!ks.degenerate) {
    const double sd = std::sqrt(ensemble.variance);
    std::vector<double> standardized(ensemble.pressures.size());
    for (std::size_t i = 0; i < standardized.size(); ++i)
      standardized[i] = (ensemble.pressures[i] - ensemble.mean) / sd;
    const auto hist = histogram(standardized, static_cast<int>(ctx.cfg.get_int("bins", 40)));
    std::ofstream hout(ctx.out_dir / "histogram.dat");
    emit_histogram(hout, ctx.hash, hist.edges, hist.counts);
    std::ofstream qout(ctx.out_dir / "qq.dat");
    emit_qq(qout, ctx.hash, qq_points(standardized));
  }

  const auto sizes = ctx.cfg.get_int_list("sizes");
  if (!sizes.empty()) {
    const auto scaling = variance_scaling(sizes, params, n_samples, EnsembleEngine::Exact,
                                          kernel, ctx.seed, ctx.workers);
    ctx.add_result("variance_scaling_slope", scaling.slope);
    ctx.add_result("variance_scaling_degenerate", scaling.degenerate ? 1.0 : 0.0);
    std::ofstream vout(ctx.out_dir / "variance_scaling.dat");
    emit_variance_table(vout, ctx.hash, scaling.volumes, scaling.variances);
  }
}

void run_gamma(RunContext& ctx) {
  const auto kernel = kernel_from(ctx.cfg);
  const double kappa = ctx.cfg.get_double("kappa", 0.0);
  const double beta = ctx.cfg.get_double("beta", 0.0);
  const double h = ctx.cfg.get_double("h", 0.0);

  double qbar;
  if (ctx.cfg.has("qbar")) {
    qbar = ctx.cfg.get_double("qbar", 0.0);
  } else {
    auto rc = rs_config_from(ctx.cfg, ctx.seed, ctx.workers);
    const BoxGeometry geometry =
        rc.box_radius >= 0 ? BoxGeometry::box(rc.dimension, rc.box_radius)
                           : BoxGeometry::chain(rc.chain_length);
    qbar = fixed_point_qbar(geometry, kappa, beta, h, kernel, rc);
  }

  GammaConfig gc;
  gc.buffer = static_cast<int>(ctx.cfg.get_int("buffer", 8));
  gc.n_outer = static_cast<int>(ctx.cfg.get_int("n_outer", 20000));
  gc.n_inner = static_cast<int>(ctx.cfg.get_int("n_inner", 8));
  gc.quad_order = static_cast<int>(ctx.cfg.get_int("quad_order", 40));
  gc.master_seed = ctx.seed;
  gc.workers = ctx.workers;

  const auto est = estimate_gamma(kappa, beta, h, qbar, kernel, gc);
  const auto pred = variance_prediction(est, beta, qbar);
  ctx.add_result("qbar_used", qbar);
  ctx.add_result("gamma", est.gamma, est.stderr_of_gamma);
  ctx.add_result("variance_prediction", pred.value, est.stderr_of_gamma);
  ctx.add_result("prediction_positive", pred.positive ? 1.0 : 0.0);
}

void run_mc_validate(RunContext& ctx) {
  const auto geometry = geometry_from(ctx.cfg);
  const auto kernel = kernel_from(ctx.cfg);
  const auto params = params_from(ctx.cfg);
  const auto mc = mc_from(ctx.cfg);
  const int n_samples = static_cast<int>(ctx.cfg.get_int("samples", 5));

  // stationarity of the deterministic-order sweep on a 2-spin system:
  // ||pi P - pi||_1 against the exact Gibbs weights
  {
    const BoxGeometry two = BoxGeometry::chain(2);
    const DisorderSample sample(two, ctx.seed, 0);
    const EnergyModel model = ensemble_model(params, sample, kernel, two);
    double energies[4];
    double z = 0.0;
    SpinConfiguration sc = SpinConfiguration::all_down(2);
    for (int s = 0; s < 4; ++s) {
      sc.spins[0] = (s & 1) ? 1 : -1;
      sc.spins[1] = (s & 2) ? 1 : -1;
      energies[s] = model_energy(model, sc);
      z += std::exp(-energies[s]);
    }
    double pi[4];
    for (int s = 0; s < 4; ++s) pi[s] = std::exp(-energies[s]) / z;
    // one sweep = site 0 then site 1, each Metropolis
    double P[4][4] = {};
    for (int s = 0; s < 4; ++s) {
      double row[4] = {};
      row[s] = 1.0;
      for (int site = 0; site < 2; ++site) {
        double next[4] = {};
        for (int x = 0; x < 4; ++x) {
          if (row[x] == 0.0) continue;
          const int y = x ^ (1 << site);
          const double a = std::min(1.0, std::exp(-(energies[y] - energies[x])));
          next[y] += row[x] * a;
          next[x] += row[x] * (1.0 - a);
        }
        for (int x = 0; x < 4; ++x) row[x] = next[x];
      }
      for (int y = 0; y < 4; ++y) P[s][y] = row[y];
    }
    double l1 = 0.0;
    for (int y = 0; y < 4; ++y) {
      double acc = 0.0;
      for (int x = 0; x < 4; ++x) acc += pi[x] * P[x][y];
      l1 += std::abs(acc - pi[y]);
    }
    ctx.add_result("two_spin_stationarity_l1", l1);
  }

  // MC magnetization and thermo-integration pressure vs enumeration
  double max_mag_z = 0.0, max_pressure_z = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const DisorderSample sample(geometry, ctx.seed, static_cast<std::uint64_t>(s));
    const EnergyModel model = ensemble_model(params, sample, kernel, geometry);
    const auto summary = gibbs_summary(model);
    const double exact_mag = summary.magnetizations.mean();

    ChainState chain = make_chain(
        model, seed::derive(ctx.seed, seed::kChainRng, static_cast<std::uint64_t>(s), 7));
    const auto est = estimate_expectation(
        [](const SpinConfiguration& c) {
          double m = 0.0;
          for (auto v : c.spins) m += v;
          return m / static_cast<double>(c.spins.size());
        },
        chain, model, 1.0, mc);
    const double mag_z = est.stderr_of_mean > 0
                             ? std::abs(est.mean - exact_mag) / est.stderr_of_mean
                             : 0.0;
    max_mag_z = std::max(max_mag_z, mag_z);
    ctx.add_detail(s, "magnetization_zscore", mag_z);

    std::vector<ThermoNode> trace;
    const auto thermo = thermo_integration_pressure(
        model, uniform_nodes(static_cast<int>(ctx.cfg.get_int("nodes", 21))),
        seed::derive(ctx.seed, seed::kChainRng, static_cast<std::uint64_t>(s), 8), mc,
        s == 0 ? &trace : nullptr);
    if (s == 0) {
      std::ofstream tout(ctx.out_dir / "thermo_trace.dat");
      tout << "# s integrand stderr  config_hash=" << std::hex << ctx.hash << std::dec
           << "\n";
      for (const auto& node : trace)
        tout << fmt(node.s) << ' ' << fmt(node.integrand) << ' '
             << fmt(node.stderr_of_integrand) << '\n';
    }
    const double pressure_z =
        thermo.stderr_of_mean > 0
            ? std::abs(thermo.mean - summary.pressure) / thermo.stderr_of_mean
            : 0.0;
    max_pressure_z = std::max(max_pressure_z, pressure_z);
    ctx.add_detail(s, "pressure_zscore", pressure_z);
  }
  ctx.add_result("max_magnetization_zscore", max_mag_z);
  ctx.add_result("max_pressure_zscore", max_pressure_z);
}

}  // namespace

RunOutput run(const ExperimentConfig& config) {
  RunOutput out;
  if (!known_subcommand(config.subcommand))
    throw ValidationError("unknown subcommand '" + config.subcommand + "'");

  std::filesystem::path out_dir = config.get_string("out", "isk-out");
  if (const char* env = std::getenv("ISK_OUT_DIR")) out_dir = env;
  std::filesystem::create_directories(out_dir);

  RunContext ctx{config,
                 config_hash(config),
                 out_dir,
                 static_cast<int>(config.get_int("workers", 1)),
                 static_cast<std::uint64_t>(config.get_int("seed", 1)),
                 {},
                 {},
                 {}};
  if (ctx.workers < 1) throw ValidationError("config field 'workers': must be >= 1");

  const auto started = std::chrono::system_clock::now();

  if (config.subcommand == "pressure")
    run_pressure(ctx);
  else if (config.subcommand == "rs-solve")
    run_rs_solve(ctx);
  else if (config.subcommand == "interpolate-check")
    run_interpolate_check(ctx);
  else if (config.subcommand == "dobrushin")
    run_dobrushin(ctx);
  else if (config.subcommand == "fluctuations")
    run_fluctuations(ctx);
  else if (config.subcommand == "gamma")
    run_gamma(ctx);
  else if (config.subcommand == "mc-validate")
    run_mc_validate(ctx);

  json summary;
  summary["subcommand"] = config.subcommand;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(ctx.hash));
  summary["config_hash"] = hash_hex;
  summary["units"] = "nats";
  summary["config"] = json::object();
  for (const auto& [k, v] : config.values) summary["config"][k] = v;
  summary["results"] = ctx.results;

  const auto summary_path = out_dir / "summary.json";
  {
    std::ofstream f(summary_path);
    f << summary.dump(2) << "\n";
  }
  {
    std::ofstream f(out_dir / "detail.csv");
    f << "sample_index,quantity,value\n";
    for (const auto& line : ctx.detail_lines) f << line << "\n";
  }

  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::system_clock::now() - started)
                           .count();
  // wall-clock time stays on stderr: emitted files are byte-deterministic in
  // (config, seed)
  const std::time_t now = std::chrono::system_clock::to_time_t(started);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  for (auto& r : ctx.records) r.timestamp = stamp;
  std::cerr << "isk " << config.subcommand << " @ " << stamp << ": wrote "
            << summary_path.string() << " (" << elapsed << " ms)\n";

  out.records = std::move(ctx.records);
  out.summary_path = summary_path.string();
  return out;
}

}  // namespace isk::cli
