#include <doctest.h>

#include <cmath>

#include "isk/disorder.hpp"
#include "isk/errors.hpp"
#include "isk/exact.hpp"
#include "isk/fluct.hpp"
#include "isk/quadrature.hpp"
#include "isk/rs.hpp"

using namespace isk;

namespace {

const InteractionKernel& nn1() {
  static const auto k = InteractionKernel::nearest_neighbor(1);
  return k;
}

PressureEnsemble synthetic_ensemble(const std::vector<double>& values) {
  PressureEnsemble e;
  e.volume = 16;
  e.pressures = values;
  const auto s = summarize(values);
  e.mean = s.mean;
  e.variance = s.variance;
  e.rescaled_variance = 16.0 * s.variance;
  return e;
}

}  // namespace

TEST_CASE("ensemble without disorder has zero variance") {
  ModelParams p;
  p.kappa = 0.2;
  p.h = 0.4;  // beta = gamma = 0: deterministic pressure
  const auto e = ensemble_pressures(BoxGeometry::chain(10), p, 50, EnsembleEngine::Exact,
                                    nn1(), 1);
  CHECK(e.variance == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(e.rescaled_variance ==
        doctest::Approx(static_cast<double>(e.volume) * e.variance).epsilon(1e-12));
}

TEST_CASE("transfer-matrix ensemble path agrees with enumeration") {
  ModelParams p;
  p.kappa = 0.15;
  p.h = 0.2;
  p.gamma = 0.5;
  const auto g = BoxGeometry::chain(10);
  const auto fast =
      ensemble_pressures(g, p, 25, EnsembleEngine::Exact, nn1(), 3);  // beta=0: TM path
  for (int s = 0; s < 25; ++s) {
    const DisorderSample d(g, 3, static_cast<std::uint64_t>(s));
    const double direct = rfim_log_partition(g, p.kappa, p.h, p.gamma, d, nn1()) / 10.0;
    CHECK(fast.pressures[s] == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("site-factorized RFIM variance matches the quadrature oracle") {
  ModelParams p;
  p.h = 0.3;
  p.gamma = 0.7;
  const std::int64_t n = 16;
  const auto e = ensemble_pressures(BoxGeometry::chain(n), p, 4000, EnsembleEngine::Exact,
                                    nn1(), 5);
  const GaussHermite gh(80);
  auto f = [&](double z) { return std::log(2.0 * std::cosh(0.3 + 0.7 * z)); };
  const double m1 = gh.average(f);
  const double m2 = gh.average([&](double z) { return f(z) * f(z); });
  const double site_var = m2 - m1 * m1;
  const double expected = site_var / static_cast<double>(n);
  const double tol = 3.0 * expected * std::sqrt(2.0 / (4000 - 1));
  CHECK(std::abs(e.variance - expected) <= tol);
}

TEST_CASE("clt_test calibration on synthetic normal input") {
  int rejections = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(2000);
    for (int i = 0; i < 2000; ++i)
      xs[i] = seed::standard_normal(
          seed::derive(777, 1, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i)));
    const auto report = clt_test(synthetic_ensemble(xs));
    if (report.p_value < 0.01) ++rejections;
  }
  CHECK(rejections <= 2);  // nominal size: >= 98% of runs keep p >= 0.01
}

TEST_CASE("clt_test power on synthetic exponential input") {
  int rejections = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(2000);
    for (int i = 0; i < 2000; ++i) {
      std::uint64_t state =
          seed::derive(778, 2, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i));
      xs[i] = -std::log(seed::to_unit(seed::splitmix64(state)));
    }
    const auto report = clt_test(synthetic_ensemble(xs));
    if (report.p_value < 0.01) ++rejections;
  }
  CHECK(rejections >= 98);
}

TEST_CASE("RFIM pressure ensemble passes normality at desk scale") {
  // site terms must be near-symmetric for 16-site sums to look normal at
  // n = 5000; at (h, gamma) = (1.5, 0.5) the site skewness is ~0.37
  ModelParams p;
  p.h = 1.5;
  p.gamma = 0.5;
  const auto e = ensemble_pressures(BoxGeometry::chain(16), p, 5000, EnsembleEngine::Exact,
                                    nn1(), 6);
  const auto report = clt_test(e);
  CHECK(!report.degenerate);
  CHECK(report.p_value >= 0.01);
}

TEST_CASE("clt_test degenerate and precondition paths") {
  std::vector<double> flat(200, 1.25);
  const auto report = clt_test(synthetic_ensemble(flat));
  CHECK(report.degenerate);
  std::vector<double> tiny(20, 0.0);
  CHECK_THROWS_AS(clt_test(synthetic_ensemble(tiny)), std::domain_error);
}

TEST_CASE("tilt_log_moment") {
  CHECK(tilt_log_moment(0.0, 0.3) == doctest::Approx(0.0));
  CHECK(tilt_log_moment(1.7, 1.0) == doctest::Approx(1.7));
  CHECK(tilt_log_moment(-2.4, 1.0) == doctest::Approx(-2.4));
  // kappa = 0 reduction: with m0 = tanh(h), equals log cosh(h+c) - log cosh(h)
  for (double h : {-0.8, 0.2, 1.5}) {
    for (double c : {-1.2, -0.3, 0.4, 2.0}) {
      CHECK(tilt_log_moment(c, std::tanh(h)) ==
            doctest::Approx(std::log(std::cosh(h + c)) - std::log(std::cosh(h)))
                .epsilon(1e-12));
    }
  }
  // monotone in m0 for c > 0
  double prev = -1e9;
  for (double m0 = -1.0; m0 <= 1.0; m0 += 0.25) {
    const double v = tilt_log_moment(0.8, m0);
    CHECK(v >= prev);
    prev = v;
  }
  // symmetry
  CHECK(tilt_log_moment(-0.9, -0.4) == doctest::Approx(tilt_log_moment(0.9, 0.4)));
  CHECK_THROWS_AS(tilt_log_moment(0.5, 1.2), std::domain_error);
}

TEST_CASE("gamma vanishes without a tilt") {
  GammaConfig gc;
  gc.n_outer = 10;
  gc.n_inner = 2;
  // beta = 0
  CHECK(estimate_gamma(0.05, 0.0, 0.4, 0.2, nn1(), gc).gamma == 0.0);
  // qbar = 0 (h = 0 case)
  CHECK(estimate_gamma(0.05, 0.3, 0.0, 0.0, nn1(), gc).gamma == 0.0);
}

TEST_CASE("gamma preconditions") {
  GammaConfig gc;
  gc.n_outer = 10;
  gc.n_inner = 2;
  // outside the uniqueness region (kappa1 = 0.25 for 1D NN)
  CHECK_THROWS_AS(estimate_gamma(0.3, 0.3, 0.4, 0.2, nn1(), gc), std::domain_error);
  // buffer below 3 correlation lengths
  gc.buffer = 2;
  CHECK_THROWS_AS(estimate_gamma(0.2, 0.3, 0.4, 0.2, nn1(), gc), std::domain_error);
}

TEST_CASE("gamma at kappa = 0 matches the closed-form quadrature oracle") {
  const double beta = 0.3, h = 0.4;
  const double qbar = sk_rs_reference(beta, h).q_root;
  GammaConfig gc;
  gc.n_outer = 30000;
  gc.n_inner = 2;
  gc.master_seed = 9;
  const auto est = estimate_gamma(0.0, beta, h, qbar, nn1(), gc);

  // Gamma = Var(log 2cosh(h + beta sqrt(qbar) J)) by Gauss-Hermite
  const GaussHermite gh(80);
  const double gamma_field = beta * std::sqrt(qbar);
  auto f = [&](double z) { return std::log(2.0 * std::cosh(h + gamma_field * z)); };
  const double m1 = gh.average(f);
  const double m2 = gh.average([&](double z) { return f(z) * f(z); });
  const double oracle = m2 - m1 * m1;
  CHECK(std::abs(est.gamma - oracle) <= 0.02 * oracle);
}

TEST_CASE("variance prediction sign handling") {
  GammaEstimate ge;
  ge.gamma = 0.0;
  CHECK(variance_prediction(ge, 0.0, 0.0).value == 0.0);
  CHECK(!variance_prediction(ge, 0.0, 0.0).positive);
  ge.gamma = 0.01;
  const auto pred = variance_prediction(ge, 0.3, 0.1);
  CHECK(pred.value == doctest::Approx(0.01 - 0.5 * 0.09 * 0.01));
  CHECK(pred.positive);
}

TEST_CASE("martingale increments at kappa = 0: closed form and telescoping") {
  const auto g = BoxGeometry::chain(16);
  const double h = 0.3, gamma = 0.5;
  const auto fields = sample_site_fields(g, 11, 0);
  const auto xi = martingale_increments(fields, 0.0, h, gamma, g, nn1());
  REQUIRE(xi.size() == 16);

  // sum telescopes to sqrt(n)(p_n - E p_n); expectation at doubled order
  double p_n = 0.0;
  for (double j : fields) p_n += std::log(2.0 * std::cosh(h + gamma * j)) / 16.0;
  const double e_p = mean_log_2cosh(h, gamma, 80);
  double sum = 0.0;
  for (double x : xi) sum += x;
  CHECK(std::abs(sum - std::sqrt(16.0) * (p_n - e_p)) <= 1e-6);

  // gamma = 0: no disorder, all increments vanish
  const auto zero = martingale_increments(fields, 0.0, h, 0.0, g, nn1());
  for (double x : zero) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("martingale property: conditional mean vanishes by quadrature") {
  // E^{n,k-1} xi_{n,k} = 0: integrate xi_k over J_k with the same rule the
  // increment uses for J'_k; the double sum is antisymmetric and cancels
  const auto g = BoxGeometry::chain(9);
  const double h = 0.25, gamma = 0.45;
  auto fields = sample_site_fields(g, 12, 0);
  const MartingaleConfig cfg;
  const GaussHermite outer(cfg.quad_order);
  for (std::int64_t k : {std::int64_t{0}, std::int64_t{4}, std::int64_t{8}}) {
    double acc = 0.0;
    for (std::size_t a = 0; a < outer.nodes.size(); ++a) {
      auto perturbed = fields;
      perturbed[k] = outer.nodes[a];
      const auto xi = martingale_increments(perturbed, 0.0, h, gamma, g, nn1(), cfg);
      acc += outer.weights[a] * xi[k];
    }
    CHECK(std::abs(acc) <= 1e-8);
  }
}

TEST_CASE("martingale increments at kappa > 0 telescope against tensor quadrature") {
  const auto g = BoxGeometry::chain(4);
  const double kappa = 0.15, h = 0.3, gamma = 0.4;
  const auto fields = sample_site_fields(g, 13, 0);
  MartingaleConfig cfg;
  cfg.field_nodes = 7;
  cfg.quad_order = 7;  // one shared rule makes the telescoping exact
  const auto xi = martingale_increments(fields, kappa, h, gamma, g, nn1(), cfg);

  // E p over all four fields with the same tensor rule
  const GaussHermite tail(cfg.field_nodes);
  double e_p = 0.0;
  std::vector<double> gaussians(4);
  for (std::size_t a = 0; a < tail.nodes.size(); ++a)
    for (std::size_t b = 0; b < tail.nodes.size(); ++b)
      for (std::size_t c = 0; c < tail.nodes.size(); ++c)
        for (std::size_t d = 0; d < tail.nodes.size(); ++d) {
          gaussians = {tail.nodes[a], tail.nodes[b], tail.nodes[c], tail.nodes[d]};
          e_p += tail.weights[a] * tail.weights[b] * tail.weights[c] * tail.weights[d] *
                 transfer_matrix_rfim_pressure(4, kappa, h, gamma, gaussians, nn1());
        }
  const double p = transfer_matrix_rfim_pressure(4, kappa, h, gamma, fields, nn1());
  double sum = 0.0;
  for (double x : xi) sum += x;
  CHECK(std::abs(sum - 2.0 * (p - e_p)) <= 1e-6);

  // conditional mean still vanishes with the shared rule
  const GaussHermite outer(cfg.quad_order);
  double acc = 0.0;
  for (std::size_t a = 0; a < outer.nodes.size(); ++a) {
    auto perturbed = fields;
    perturbed[1] = outer.nodes[a];
    const auto xk = martingale_increments(perturbed, kappa, h, gamma, g, nn1(), cfg);
    acc += outer.weights[a] * xk[1];
  }
  CHECK(std::abs(acc) <= 1e-8);

  // cap on the kappa > 0 mode
  const auto big = BoxGeometry::chain(12);
  CHECK_THROWS_AS(
      martingale_increments(sample_site_fields(big, 13, 1), kappa, h, gamma, big, nn1(), cfg),
      SizeError);
}

TEST_CASE("asymptotic negligibility proxy: max increment decays like n^{-1/2}") {
  const double h = 0.3, gamma = 0.5;
  std::vector<double> log_n, log_max;
  for (std::int64_t n : {16, 64, 256}) {
    const auto g = BoxGeometry::chain(n);
    double acc = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      const auto fields = sample_site_fields(g, 14, static_cast<std::uint64_t>(r));
      const auto xi = martingale_increments(fields, 0.0, h, gamma, g, nn1());
      double mx = 0.0;
      for (double x : xi) mx = std::max(mx, std::abs(x));
      acc += mx;
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_max.push_back(std::log(acc / reps));
  }
  const double slope = ls_slope(log_n, log_max);
  CHECK(slope <= -0.25);
  CHECK(slope >= -0.75);
}

TEST_CASE("variance scaling of the factorized RFIM is 1/|Lambda|") {
  ModelParams p;
  p.h = 0.3;
  p.gamma = 0.6;
  const std::vector<std::int64_t> sizes{8, 16, 32, 64};
  const auto report = variance_scaling(sizes, p, 600, EnsembleEngine::Exact, nn1(), 15);
  CHECK(!report.degenerate);
  CHECK(report.slope >= -1.2);
  CHECK(report.slope <= -0.8);
}

TEST_CASE("variance scaling degenerate and validation paths") {
  ModelParams p;
  p.h = 0.3;  // no disorder at all
  const std::vector<std::int64_t> sizes{4, 8, 12};
  const auto report = variance_scaling(sizes, p, 20, EnsembleEngine::Exact, nn1(), 16);
  CHECK(report.degenerate);

  const std::vector<std::int64_t> two{4, 8};
  CHECK_THROWS_AS(variance_scaling(two, p, 20, EnsembleEngine::Exact, nn1(), 16),
                  std::domain_error);
}

TEST_CASE("histogram conserves counts and qq pairs are monotone") {
  std::vector<double> xs(500);
  for (int i = 0; i < 500; ++i)
    xs[i] = seed::standard_normal(seed::derive(20, 3, 0, static_cast<std::uint64_t>(i)));
  const auto hist = histogram(xs, 20);
  std::int64_t total = 0;
  for (auto c : hist.counts) total += c;
  CHECK(total == 500);
  REQUIRE(hist.edges.size() == 21);

  const auto qq = qq_points(xs);
  REQUIRE(qq.size() == 500);
  for (std::size_t i = 1; i < qq.size(); ++i) {
    CHECK(qq[i].first >= qq[i - 1].first);
    CHECK(qq[i].second >= qq[i - 1].second);
  }
}
