#include "isk/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace isk {

// Golub-Welsch on the Hermite Jacobi matrix, then rescaled so the rule
// averages against the standard normal density: x = sqrt(2) t, w_k sum to 1.
GaussHermite::GaussHermite(int order) {
  if (order < 1) throw std::domain_error("GaussHermite: order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes.resize(order);
  weights.resize(order);
  for (int k = 0; k < order; ++k) {
    nodes[k] = std::sqrt(2.0) * solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    weights[k] = v0 * v0;  // physicists' weight / sqrt(pi), already normalized
  }
}

std::vector<double> simpson_weights(int n_nodes, double a, double b) {
  if (n_nodes < 3 || n_nodes % 2 == 0)
    throw std::domain_error("simpson_weights: need an odd node count >= 3");
  if (!(b > a)) throw std::domain_error("simpson_weights: need b > a");
  const double h = (b - a) / (n_nodes - 1);
  std::vector<double> w(n_nodes, 0.0);
  for (int k = 0; k + 2 < n_nodes; k += 2) {
    w[k] += h / 3.0;
    w[k + 1] += 4.0 * h / 3.0;
    w[k + 2] += h / 3.0;
  }
  return w;
}

}  // namespace isk
