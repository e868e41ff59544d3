#include "isk/disorder.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "isk/errors.hpp"

namespace isk {
namespace seed {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t state = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return splitmix64(state);
}

double to_unit(std::uint64_t bits) {
  // 53-bit mantissa, shifted into the open interval
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t key) {
  std::uint64_t state = key;
  const double u1 = to_unit(splitmix64(state));
  const double u2 = to_unit(splitmix64(state));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace seed

DisorderSample::DisorderSample(const BoxGeometry& geometry, std::uint64_t master_seed,
                               std::uint64_t sample_index)
    : volume_(geometry.volume()), master_seed_(master_seed), sample_index_(sample_index) {
  const std::int64_t n = volume_;
  couplings_.resize(static_cast<std::size_t>(n) * n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      couplings_[i * n + j] = seed::standard_normal(seed::derive(
          master_seed_, seed::kPairCoupling, sample_index_,
          static_cast<std::uint64_t>(i * n + j)));
  fields_.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    fields_[i] = seed::standard_normal(
        seed::derive(master_seed_, seed::kSiteField, sample_index_, static_cast<std::uint64_t>(i)));
}

DisorderSample sample_disorder(const BoxGeometry& geometry, std::uint64_t master_seed,
                               std::uint64_t sample_index) {
  return DisorderSample(geometry, master_seed, sample_index);
}

std::vector<double> sample_site_fields(const BoxGeometry& geometry,
                                       std::uint64_t master_seed,
                                       std::uint64_t sample_index) {
  std::vector<double> fields(static_cast<std::size_t>(geometry.volume()));
  for (std::int64_t i = 0; i < geometry.volume(); ++i)
    fields[i] = seed::standard_normal(
        seed::derive(master_seed, seed::kSiteField, sample_index, static_cast<std::uint64_t>(i)));
  return fields;
}

double resample_site_field(const DisorderSample& sample, std::int64_t site_index,
                           std::uint64_t aux_seed) {
  if (site_index < 0 || site_index >= sample.volume())
    throw std::domain_error("resample_site_field: site outside the box");
  const std::uint64_t key =
      seed::mix(seed::derive(sample.master_seed(), seed::kAuxField, sample.sample_index(),
                             static_cast<std::uint64_t>(site_index)),
                aux_seed);
  return seed::standard_normal(key);
}

void dump_disorder(std::ostream& out, const DisorderSample& sample,
                   const BoxGeometry& geometry) {
  out << "# isk-disorder v1\n";
  out << "# master_seed " << sample.master_seed() << " sample_index "
      << sample.sample_index() << " d " << geometry.dimension() << " volume "
      << geometry.volume() << "\n";
  out.precision(17);
  const std::int64_t n = sample.volume();
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      out << i << ' ' << j << ' ' << sample.coupling(i, j) << '\n';
  for (std::int64_t i = 0; i < n; ++i) out << i << ' ' << sample.field(i) << '\n';
}

DisorderSample load_disorder(std::istream& in, const BoxGeometry& geometry) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# isk-disorder", 0) != 0)
    throw ValidationError("disorder file: missing header");
  if (!std::getline(in, line)) throw ValidationError("disorder file: missing metadata");
  std::istringstream meta(line);
  std::string hash, key;
  std::uint64_t master = 0, index = 0;
  std::int64_t d = 0, volume = 0;
  meta >> hash >> key >> master >> key >> index >> key >> d >> key >> volume;
  if (volume != geometry.volume() || d != geometry.dimension())
    throw ValidationError("disorder file: geometry mismatch");

  DisorderSample s;
  s.volume_ = volume;
  s.master_seed_ = master;
  s.sample_index_ = index;
  s.couplings_.resize(static_cast<std::size_t>(volume) * volume);
  s.fields_.resize(static_cast<std::size_t>(volume));
  for (std::int64_t k = 0; k < volume * volume; ++k) {
    std::int64_t i, j;
    double v;
    if (!(in >> i >> j >> v)) throw ValidationError("disorder file: truncated couplings");
    s.couplings_[i * volume + j] = v;
  }
  for (std::int64_t k = 0; k < volume; ++k) {
    std::int64_t i;
    double v;
    if (!(in >> i >> v)) throw ValidationError("disorder file: truncated fields");
    s.fields_[i] = v;
  }
  return s;
}

}  // namespace isk
