#include "isk/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "isk/errors.hpp"

namespace isk {

BoxGeometry BoxGeometry::box(int dimension, int radius) {
  if (dimension < 1) throw std::domain_error("BoxGeometry: dimension must be >= 1");
  if (radius < 0) throw std::domain_error("BoxGeometry: radius must be >= 0");

  const std::int64_t side = 2 * static_cast<std::int64_t>(radius) + 1;
  std::int64_t vol = 1;
  for (int k = 0; k < dimension; ++k) {
    if (vol > (std::int64_t{1} << 62) / side)
      throw SizeError("BoxGeometry: volume (2N+1)^d overflows 64-bit range");
    vol *= side;
  }

  BoxGeometry g;
  g.d_ = dimension;
  g.radius_ = radius;
  g.volume_ = vol;
  g.lo_.assign(dimension, -radius);
  g.hi_.assign(dimension, radius);
  g.enumerate();
  return g;
}

BoxGeometry BoxGeometry::chain(std::int64_t length) {
  if (length < 1) throw std::domain_error("BoxGeometry: chain length must be >= 1");
  BoxGeometry g;
  g.d_ = 1;
  g.volume_ = length;
  const int lo = static_cast<int>(-((length - 1) / 2));
  g.lo_ = {lo};
  g.hi_ = {static_cast<int>(lo + length - 1)};
  g.radius_ = (length % 2 == 1) ? static_cast<int>((length - 1) / 2) : -1;
  g.enumerate();
  return g;
}

void BoxGeometry::enumerate() {
  coords_.reserve(static_cast<std::size_t>(volume_) * d_);
  std::vector<int> cur(lo_);
  for (std::int64_t s = 0; s < volume_; ++s) {
    coords_.insert(coords_.end(), cur.begin(), cur.end());
    // odometer increment, last axis fastest: lexicographic order
    for (int ax = d_ - 1; ax >= 0; --ax) {
      if (cur[ax] < hi_[ax]) {
        ++cur[ax];
        break;
      }
      cur[ax] = lo_[ax];
    }
  }
}

std::int64_t BoxGeometry::index_of(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != d_) return -1;
  std::int64_t idx = 0;
  for (int ax = 0; ax < d_; ++ax) {
    if (coords[ax] < lo_[ax] || coords[ax] > hi_[ax]) return -1;
    idx = idx * (hi_[ax] - lo_[ax] + 1) + (coords[ax] - lo_[ax]);
  }
  return idx;
}

std::vector<std::vector<int>> enumerate_sites(const BoxGeometry& geometry) {
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(geometry.volume()));
  for (std::int64_t s = 0; s < geometry.volume(); ++s) {
    auto v = geometry.site(s);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

}  // namespace isk
