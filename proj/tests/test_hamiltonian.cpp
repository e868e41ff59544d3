#include <doctest.h>

#include <cmath>

#include "isk/disorder.hpp"
#include "isk/hamiltonian.hpp"
#include "isk/stats.hpp"

using namespace isk;

namespace {

SpinConfiguration make_config(std::initializer_list<int> spins) {
  SpinConfiguration s;
  for (int v : spins) s.spins.push_back(static_cast<std::int8_t>(v));
  return s;
}

SpinConfiguration random_config(std::int64_t n, std::uint64_t key) {
  SpinConfiguration s;
  std::uint64_t state = key;
  for (std::int64_t i = 0; i < n; ++i)
    s.spins.push_back((seed::splitmix64(state) & 1u) ? 1 : -1);
  return s;
}

}  // namespace

TEST_CASE("ising energy: hand-summed nearest-neighbor chain") {
  const auto g = BoxGeometry::box(1, 1);
  const auto nn = InteractionKernel::nearest_neighbor(1);
  // sigma = (+,+,+): 4 ordered neighbor pairs, each contributing 1/2 -> -2
  CHECK(ising_energy(make_config({1, 1, 1}), nn, g) == doctest::Approx(-2.0));
  CHECK(ising_energy(make_config({1, -1, 1}), nn, g) == doctest::Approx(2.0));

  // empty kernel -> 0 for any configuration
  const auto zero = InteractionKernel::from_entries(1, {});
  CHECK(ising_energy(random_config(3, 1), zero, g) == 0.0);

  // global flip parity
  for (int k = 0; k < 10; ++k) {
    auto s = random_config(3, 100 + k);
    auto f = s;
    for (auto& v : f.spins) v = -v;
    CHECK(ising_energy(s, nn, g) == doctest::Approx(ising_energy(f, nn, g)));
  }
}

TEST_CASE("sk energy: single site and parity") {
  const auto g1 = BoxGeometry::box(1, 0);
  const auto d1 = sample_disorder(g1, 3, 0);
  // single site: H = -J_00 / sqrt(2)
  CHECK(sk_energy(make_config({1}), d1, g1) ==
        doctest::Approx(-d1.coupling(0, 0) / std::sqrt(2.0)));
  CHECK(sk_energy(make_config({-1}), d1, g1) ==
        doctest::Approx(-d1.coupling(0, 0) / std::sqrt(2.0)));

  const auto g = BoxGeometry::box(1, 2);
  const auto d = sample_disorder(g, 3, 1);
  for (int k = 0; k < 10; ++k) {
    auto s = random_config(g.volume(), 200 + k);
    auto f = s;
    for (auto& v : f.spins) v = -v;
    CHECK(sk_energy(s, d, g) == doctest::Approx(sk_energy(f, d, g)));
  }
}

TEST_CASE("sk energy variance over disorder is |Lambda|/2 for fixed sigma") {
  const auto g = BoxGeometry::box(1, 2);  // 5 sites
  const auto sigma = random_config(g.volume(), 9);
  const int n = 10000;
  std::vector<double> values(n);
  for (int s = 0; s < n; ++s)
    values[s] = sk_energy(sigma, sample_disorder(g, 77, static_cast<std::uint64_t>(s)), g);
  const auto sum = summarize(values);
  const double expected = g.volume() / 2.0;
  // Var of the sample variance of a Gaussian: 2 sigma^4 / (n-1)
  const double tol = 3.0 * std::sqrt(2.0 / (n - 1)) * expected;
  CHECK(std::abs(sum.variance - expected) <= tol);
}

TEST_CASE("field energy") {
  const auto g = BoxGeometry::box(1, 1);
  const auto d = sample_disorder(g, 11, 0);
  // gamma=0, all +1 -> -h |Lambda|
  CHECK(field_energy(make_config({1, 1, 1}), 0.7, 0.0, d) == doctest::Approx(-2.1));
  // h=0, gamma=0 -> 0
  CHECK(field_energy(random_config(3, 5), 0.0, 0.0, d) == 0.0);
  // single site, h=0, gamma=1, sigma=+1 -> -J_0
  const auto g1 = BoxGeometry::box(1, 0);
  const auto d1 = sample_disorder(g1, 11, 1);
  CHECK(field_energy(make_config({1}), 0.0, 1.0, d1) == doctest::Approx(-d1.field(0)));
  // odd under global flip
  auto s = random_config(3, 6);
  auto f = s;
  for (auto& v : f.spins) v = -v;
  CHECK(field_energy(s, 0.3, 0.5, d) == doctest::Approx(-field_energy(f, 0.3, 0.5, d)));
}

TEST_CASE("interpolating energy endpoints") {
  const auto g = BoxGeometry::box(1, 1);
  const auto nn = InteractionKernel::nearest_neighbor(1);
  const auto d = sample_disorder(g, 21, 0);
  ModelParams p;
  p.kappa = 0.2;
  p.beta = 0.4;
  p.h = 0.3;
  p.q = 0.6;

  for (int k = 0; k < 8; ++k) {
    const auto s = random_config(3, 300 + k);
    // t=1: kappa H^I + beta H^SK - h sum sigma
    p.t = 1.0;
    CHECK(interpolating_energy(s, p, d, nn, g) ==
          doctest::Approx(p.kappa * ising_energy(s, nn, g) + p.beta * sk_energy(s, d, g) +
                          field_energy(s, p.h, 0.0, d)));
    // t=0: the RFIM energy with gamma = beta sqrt(q)
    p.t = 0.0;
    CHECK(interpolating_energy(s, p, d, nn, g) ==
          doctest::Approx(p.kappa * ising_energy(s, nn, g) +
                          field_energy(s, p.h, p.beta * std::sqrt(p.q), d)));
  }

  // beta = 0: t- and q-independent
  ModelParams b0 = p;
  b0.beta = 0.0;
  const auto s = random_config(3, 42);
  b0.t = 0.3;
  b0.q = 0.2;
  const double e1 = interpolating_energy(s, b0, d, nn, g);
  b0.t = 0.9;
  b0.q = 0.8;
  CHECK(interpolating_energy(s, b0, d, nn, g) == doctest::Approx(e1));
}

TEST_CASE("overlap") {
  CHECK(overlap(make_config({1, 1, -1}), make_config({1, 1, -1})) == doctest::Approx(1.0));
  CHECK(overlap(make_config({1, 1, -1}), make_config({-1, -1, 1})) == doctest::Approx(-1.0));
  // hand count: (1 - 1 + 1)/3
  CHECK(overlap(make_config({1, 1, -1}), make_config({1, -1, -1})) ==
        doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(overlap(make_config({1}), make_config({1, 1})), std::domain_error);
}

TEST_CASE("coupled replica energy") {
  const auto g = BoxGeometry::box(1, 1);
  const auto nn = InteractionKernel::nearest_neighbor(1);
  const auto d = sample_disorder(g, 33, 0);
  ModelParams p;
  p.kappa = 0.1;
  p.beta = 0.5;
  p.h = 0.2;
  p.t = 0.4;
  p.q = 0.3;

  const auto s1 = random_config(3, 1), s2 = random_config(3, 2);

  // lambda = 0: sum of two interpolating energies
  p.lambda = 0.0;
  CHECK(coupled_replica_energy(s1, s2, p, d, nn, g) ==
        doctest::Approx(interpolating_energy(s1, p, d, nn, g) +
                        interpolating_energy(s2, p, d, nn, g)));

  // sigma1 = sigma2 with q = 1: coupling term vanishes
  p.lambda = 2.0;
  p.q = 1.0;
  CHECK(coupled_replica_energy(s1, s1, p, d, nn, g) ==
        doctest::Approx(2.0 * interpolating_energy(s1, p, d, nn, g)));

  // lambda=1, q=0, sigma1=sigma2: coupling term -(beta^2/2)|Lambda|
  p.lambda = 1.0;
  p.q = 0.0;
  CHECK(coupled_replica_energy(s1, s1, p, d, nn, g) ==
        doctest::Approx(2.0 * interpolating_energy(s1, p, d, nn, g) -
                        0.5 * p.beta * p.beta * 3.0));

  // replica exchange symmetry
  CHECK(coupled_replica_energy(s1, s2, p, d, nn, g) ==
        doctest::Approx(coupled_replica_energy(s2, s1, p, d, nn, g)));
}

TEST_CASE("energy model reproduces the reference energies") {
  const auto g = BoxGeometry::box(1, 2);
  const auto nn = InteractionKernel::nearest_neighbor(1);
  const auto d = sample_disorder(g, 55, 0);
  ModelParams p;
  p.kappa = 0.15;
  p.beta = 0.35;
  p.h = 0.25;
  p.t = 0.7;
  p.q = 0.4;
  const auto model = interpolating_model(p, d, nn, g);
  for (int k = 0; k < 20; ++k) {
    const auto s = random_config(g.volume(), 400 + k);
    CHECK(model_energy(model, s) ==
          doctest::Approx(interpolating_energy(s, p, d, nn, g)).epsilon(1e-12));
  }

  const auto rfim = rfim_model(0.15, 0.25, 0.6, d.fields(), nn, g);
  for (int k = 0; k < 20; ++k) {
    const auto s = random_config(g.volume(), 500 + k);
    CHECK(model_energy(rfim, s) ==
          doctest::Approx(0.15 * ising_energy(s, nn, g) + field_energy(s, 0.25, 0.6, d))
              .epsilon(1e-12));
  }
}

TEST_CASE("single-flip deltas agree with full recomputation to 1e-10") {
  const auto g = BoxGeometry::box(1, 2);
  const auto nn = InteractionKernel::nearest_neighbor(1);
  const auto d = sample_disorder(g, 66, 0);
  ModelParams p;
  p.kappa = 0.2;
  p.beta = 0.45;
  p.h = 0.15;
  p.t = 0.55;
  p.q = 0.3;
  const auto model = interpolating_model(p, d, nn, g);

  auto s = random_config(g.volume(), 700);
  auto psi = local_fields(model, s);
  for (std::int64_t site = 0; site < g.volume(); ++site) {
    const double before = model_energy(model, s);
    const double delta = flip_delta(model, psi, s, site);
    auto flipped = s;
    flipped.spins[site] = static_cast<std::int8_t>(-flipped.spins[site]);
    CHECK(delta == doctest::Approx(model_energy(model, flipped) - before).epsilon(1e-10));
    // walk the chain: apply and keep the cache in sync
    apply_flip(model, s, psi, site);
    const auto fresh = local_fields(model, s);
    CHECK((fresh - psi).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
