#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "isk/geometry.hpp"

namespace isk {

// Label-addressed Gaussian streams. Every random quantity in the artifact is
// a pure function of (master_seed, purpose, sample_index, entry_index):
// the label tuple is folded into a 64-bit key by chained splitmix64 steps and
// the standard normal is produced by Box-Muller from two splitmix64 outputs.
// The scheme is fixed; bit-exact reproducibility holds within one build.
namespace seed {

inline constexpr std::uint64_t kPairCoupling = 0x4a49u;  // "JI" pair couplings J_ij
inline constexpr std::uint64_t kSiteField = 0x4a46u;     // site fields J_i
inline constexpr std::uint64_t kAuxField = 0x4a58u;      // resampled copies J'_i
inline constexpr std::uint64_t kChainRng = 0x4d43u;      // Markov-chain streams

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix(std::uint64_t h, std::uint64_t v);

inline std::uint64_t derive(std::uint64_t master, std::uint64_t purpose, std::uint64_t a,
                            std::uint64_t b) {
  return mix(mix(mix(master, purpose), a), b);
}

// Uniform in (0,1), never exactly 0 or 1.
double to_unit(std::uint64_t bits);

// One standard normal from a 64-bit key (Box-Muller, cosine branch).
double standard_normal(std::uint64_t key);

}  // namespace seed

/// One quenched realization of the disorder: pair couplings J_ij over all
/// ordered site pairs (diagonal included) and site fields J_i, all standard
/// normal, addressed by (master_seed, sample_index).
class DisorderSample {
 public:
  DisorderSample(const BoxGeometry& geometry, std::uint64_t master_seed,
                 std::uint64_t sample_index);

  double coupling(std::int64_t i, std::int64_t j) const {
    return couplings_[i * volume_ + j];
  }
  double field(std::int64_t i) const { return fields_[i]; }

  const std::vector<double>& couplings() const { return couplings_; }
  const std::vector<double>& fields() const { return fields_; }

  std::int64_t volume() const { return volume_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t sample_index() const { return sample_index_; }

 private:
  friend DisorderSample load_disorder(std::istream&, const BoxGeometry&);
  DisorderSample() = default;

  std::int64_t volume_ = 0;
  std::uint64_t master_seed_ = 0;
  std::uint64_t sample_index_ = 0;
  std::vector<double> couplings_;  // row-major |Lambda|^2
  std::vector<double> fields_;     // |Lambda|
};

DisorderSample sample_disorder(const BoxGeometry& geometry, std::uint64_t master_seed,
                               std::uint64_t sample_index);

// Site fields only, identical to sample_disorder(...).fields(). Used by RFIM
// paths that never touch the pair couplings.
std::vector<double> sample_site_fields(const BoxGeometry& geometry,
                                       std::uint64_t master_seed,
                                       std::uint64_t sample_index);

// An independent standard normal copy J' for one site, from a stream disjoint
// from every stream used inside `sample`. Site outside the box is a domain
// error.
double resample_site_field(const DisorderSample& sample, std::int64_t site_index,
                           std::uint64_t aux_seed);

// Text dump with a header carrying (master_seed, sample_index, geometry);
// loadable for exact replay.
void dump_disorder(std::ostream& out, const DisorderSample& sample,
                   const BoxGeometry& geometry);
DisorderSample load_disorder(std::istream& in, const BoxGeometry& geometry);

}  // namespace isk
