#pragma once

#include <vector>

namespace isk {

/// Gauss-Hermite rule recast for standard-normal averages:
/// E f(Z) ~ sum_k weight[k] * f(node[k]) with Z ~ N(0,1).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1

  explicit GaussHermite(int order);

  template <class F>
  double average(F&& f) const {
    double s = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
  }
};

// Composite Simpson weights for an odd number of equally spaced nodes on
// [a, b]; returns one weight per node.
std::vector<double> simpson_weights(int n_nodes, double a, double b);

}  // namespace isk
