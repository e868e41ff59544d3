#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isk/disorder.hpp"
#include "isk/stats.hpp"

using namespace isk;

TEST_CASE("regeneration is bit-exact") {
  const auto g = BoxGeometry::box(1, 2);
  const auto a = sample_disorder(g, 42, 7);
  const auto b = sample_disorder(g, 42, 7);
  CHECK(a.couplings() == b.couplings());
  CHECK(a.fields() == b.fields());
  CHECK(a.couplings().size() == 25);
  CHECK(a.fields().size() == 5);
}

TEST_CASE("distinct sample indices give distinct samples") {
  const auto g = BoxGeometry::box(1, 2);
  const auto a = sample_disorder(g, 42, 0);
  const auto b = sample_disorder(g, 42, 1);
  CHECK(a.couplings() != b.couplings());
  CHECK(a.fields() != b.fields());
}

TEST_CASE("pooled draws look standard normal") {
  // 1e5 draws: |mean| <= 3/sqrt(1e5), |variance - 1| <= 3 sqrt(2/(n-1))
  const auto g = BoxGeometry::chain(100);
  std::vector<double> pool;
  pool.reserve(100000);
  for (int s = 0; s < 10; ++s) {
    const auto d = sample_disorder(g, 123, static_cast<std::uint64_t>(s));
    pool.insert(pool.end(), d.couplings().begin(), d.couplings().end());
  }
  REQUIRE(pool.size() == 100000);
  const auto sum = summarize(pool);
  CHECK(std::abs(sum.mean) <= 3.0 / std::sqrt(1e5));
  CHECK(std::abs(sum.variance - 1.0) <= 3.0 * std::sqrt(2.0 / (pool.size() - 1)));
}

TEST_CASE("resampled site field is deterministic and fresh") {
  const auto g = BoxGeometry::box(1, 3);
  const auto d = sample_disorder(g, 99, 4);
  CHECK(resample_site_field(d, 2, 11) == resample_site_field(d, 2, 11));
  CHECK(resample_site_field(d, 2, 11) != resample_site_field(d, 2, 12));
  CHECK_THROWS_AS(resample_site_field(d, 7, 0), std::domain_error);
  CHECK_THROWS_AS(resample_site_field(d, -1, 0), std::domain_error);
}

TEST_CASE("resampled copy is uncorrelated with the original field") {
  // over 1e4 samples, |corr| <= 3/sqrt(1e4)
  const auto g = BoxGeometry::box(1, 1);
  const int n = 10000;
  std::vector<double> orig(n), fresh(n);
  for (int s = 0; s < n; ++s) {
    const auto d = sample_disorder(g, 7, static_cast<std::uint64_t>(s));
    orig[s] = d.field(0);
    fresh[s] = resample_site_field(d, 0, 0);
  }
  const auto so = summarize(orig), sf = summarize(fresh);
  double cov = 0.0;
  for (int s = 0; s < n; ++s) cov += (orig[s] - so.mean) * (fresh[s] - sf.mean);
  cov /= (n - 1);
  const double corr = cov / std::sqrt(so.variance * sf.variance);
  CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("cross-stream correlations vanish within statistical error") {
  // couplings vs fields from the same (seed, sample) labels
  const auto g = BoxGeometry::chain(2);
  const int n = 10000;
  std::vector<double> a(n), b(n);
  for (int s = 0; s < n; ++s) {
    const auto d = sample_disorder(g, 31, static_cast<std::uint64_t>(s));
    a[s] = d.coupling(0, 0);
    b[s] = d.field(0);
  }
  const auto sa = summarize(a), sb = summarize(b);
  double cov = 0.0;
  for (int s = 0; s < n; ++s) cov += (a[s] - sa.mean) * (b[s] - sb.mean);
  cov /= (n - 1);
  CHECK(std::abs(cov / std::sqrt(sa.variance * sb.variance)) <=
        3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("field-only sampling matches the full sample") {
  const auto g = BoxGeometry::chain(6);
  const auto d = sample_disorder(g, 5, 3);
  CHECK(sample_site_fields(g, 5, 3) == d.fields());
}

TEST_CASE("seed derivation is pure and collision-free over the used label space") {
  CHECK(seed::derive(1, 2, 3, 4) == seed::derive(1, 2, 3, 4));
  std::vector<std::uint64_t> keys;
  for (std::uint64_t purpose : {seed::kPairCoupling, seed::kSiteField, seed::kAuxField})
    for (std::uint64_t sample = 0; sample < 8; ++sample)
      for (std::uint64_t idx = 0; idx < 64; ++idx)
        keys.push_back(seed::derive(99, purpose, sample, idx));
  std::sort(keys.begin(), keys.end());
  CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
}

TEST_CASE("dump and reload round-trips exactly") {
  const auto g = BoxGeometry::box(1, 1);
  const auto d = sample_disorder(g, 17, 2);
  std::stringstream io;
  dump_disorder(io, d, g);
  const auto r = load_disorder(io, g);
  CHECK(r.couplings() == d.couplings());
  CHECK(r.fields() == d.fields());
  CHECK(r.master_seed() == d.master_seed());
  CHECK(r.sample_index() == d.sample_index());
}
