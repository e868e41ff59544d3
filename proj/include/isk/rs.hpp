#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isk/geometry.hpp"
#include "isk/kernel.hpp"
#include "isk/mc.hpp"

namespace isk {

/// How the RS module estimates disorder-averaged RFIM pressures. The same
/// field draws (master_seed, sample_index) are reused for every q — common
/// random numbers — so the q-dependence of F is not drowned by sampling noise.
struct RSEstimatorConfig {
  enum class Engine { Auto, Enumeration, TransferMatrix, Mc };
  Engine engine = Engine::Auto;

  // geometry: a 1D chain unless box_radius >= 0
  std::int64_t chain_length = 256;
  int dimension = 1;
  int box_radius = -1;

  int n_disorder_samples = 200;
  std::uint64_t master_seed = 1;
  bool antithetic = true;  // average each sample with its field-negated mirror
  McConfig mc;
  int workers = 1;
};

struct PressureEstimate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::string engine;
  std::int64_t volume = 0;
  int n_samples = 0;
};

// Disorder-averaged RFIM pressure at (kappa, h, gamma). Engine selection in
// Auto mode: enumeration when |Lambda| <= 20, 1D NN transfer matrix when
// applicable, MC otherwise.
PressureEstimate estimate_rfim_pressure(double kappa, double h, double gamma,
                                        const InteractionKernel& kernel,
                                        const RSEstimatorConfig& config);

/// One evaluation of the replica-symmetric functional
/// F(q) = p^RFIM(kappa, h, beta sqrt(q)) + beta^2/4 (1-q)^2.
struct RSFunctionalPoint {
  double q = 0.0;
  double rfim_pressure = 0.0;
  double rfim_stderr = 0.0;
  double F_value = 0.0;
  std::string engine;
  int n_disorder_samples = 0;
  std::int64_t volume = 0;
};

RSFunctionalPoint evaluate_F(double q, double kappa, double beta, double h,
                             const InteractionKernel& kernel, const RSEstimatorConfig& config);

struct RSGridConfig {
  double grid_step = 0.01;
  double tolerance = 1e-4;  // golden-section bracket width
  int scan_samples = 0;     // disorder samples for the coarse scan; 0 = full count.
                            // The scan only locates the bracket; the reported
                            // F_min always comes from full-precision evaluations.
};

struct RSSolution {
  double qbar = 0.0;
  double F_min = 0.0;
  double F_min_stderr = 0.0;
  double fixed_point_q = 0.0;
  double second_derivative_estimate = 0.0;
  double agreement_gap = 0.0;
  std::vector<double> near_degenerate_q;       // grid minima within 2 stderr of best
  std::vector<RSFunctionalPoint> grid_points;  // the coarse scan, for plotting
};

// Coarse grid scan plus golden-section refinement of F. beta = 0 leaves F flat
// in q and is rejected as degenerate.
RSSolution minimize_F(double kappa, double beta, double h, const InteractionKernel& kernel,
                      const RSEstimatorConfig& config, const RSGridConfig& grid = {});

struct FixedPointConfig {
  double omega = 0.5;  // damping
  double tolerance = 1e-4;
  int max_iterations = 200;
  double q_start = 0.5;
};

// Damped iteration of the self-consistent equation
// q = |Lambda|^{-1} sum_i E<sigma_i>^2 at gamma = beta sqrt(q).
// The iterate trajectory is appended to *trajectory when given.
double fixed_point_qbar(const BoxGeometry& geometry, double kappa, double beta, double h,
                        const InteractionKernel& kernel, const RSEstimatorConfig& config,
                        const FixedPointConfig& iteration = {},
                        std::vector<double>* trajectory = nullptr);

struct SkRsReference {
  double q_root = 0.0;
  double p_rs = 0.0;
};

// kappa = 0 closed form: solves q = E tanh^2(h + beta sqrt(q) Z) by damped
// iteration over a Gauss-Hermite rule and assembles
// p_rs = log 2 + E log cosh(h + beta sqrt(q) Z) + beta^2/4 (1-q)^2.
SkRsReference sk_rs_reference(double beta, double h, int quadrature_order = 40);

// inf_q F: the predicted infinite-volume pressure.
EstimateWithError rs_pressure_prediction(double kappa, double beta, double h,
                                         const InteractionKernel& kernel,
                                         const RSEstimatorConfig& config,
                                         const RSGridConfig& grid = {});

struct CurvatureResult {
  bool at_boundary = false;
  double value = 0.0;
};

// Central second difference of F at qbar (step 0.02, common random numbers).
CurvatureResult curvature_check(double kappa, double beta, double h, double qbar,
                                const InteractionKernel& kernel,
                                const RSEstimatorConfig& config, double step = 0.02);

}  // namespace isk
