#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace isk {

/// The finite box Lambda_N = {-N,...,N}^d with sites kept in strict
/// lexicographic order. A degenerate "chain" form supports 1D systems with an
/// arbitrary (possibly even) number of sites; the box form always has volume
/// (2N+1)^d.
class BoxGeometry {
 public:
  static BoxGeometry box(int dimension, int radius);

  // 1D chain of `length` consecutive sites, centered on the origin
  // (length 2N+1 coincides with box(1, N)).
  static BoxGeometry chain(std::int64_t length);

  int dimension() const { return d_; }
  int radius() const { return radius_; }
  std::int64_t volume() const { return volume_; }

  // Coordinates of the idx-th site in lexicographic order.
  std::span<const int> site(std::int64_t idx) const {
    return {coords_.data() + idx * d_, static_cast<std::size_t>(d_)};
  }

  // Lexicographic index of a site, or -1 if outside the box.
  std::int64_t index_of(std::span<const int> coords) const;
  bool contains(std::span<const int> coords) const { return index_of(coords) >= 0; }

  int axis_min(int axis) const { return lo_[axis]; }
  int axis_max(int axis) const { return hi_[axis]; }

  // Full site list, flattened row-major (volume x d).
  const std::vector<int>& flat_sites() const { return coords_; }

 private:
  BoxGeometry() = default;
  void enumerate();

  int d_ = 1;
  int radius_ = 0;  // -1 for chains of even length (no box form)
  std::int64_t volume_ = 0;
  std::vector<int> lo_, hi_;
  std::vector<int> coords_;
};

// All sites of the geometry in strict lexicographic order, one vector of d
// coordinates per site.
std::vector<std::vector<int>> enumerate_sites(const BoxGeometry& geometry);

}  // namespace isk
