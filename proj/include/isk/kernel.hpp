#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace isk {

/// Translation-invariant Ising coupling K(.) on a finite set of lattice
/// displacements, with K(i) = K(-i), K(0) = 0, and an exponential decay
/// certificate |K(i)| <= C1 exp(-C2 |i|) validated on every stored entry.
class InteractionKernel {
 public:
  struct Entry {
    std::vector<int> displacement;
    double value;
  };

  // K(+-e_k) = 1 for every axis, range 1.
  static InteractionKernel nearest_neighbor(int dimension);

  // K(i) = c1 exp(-c2 |i|) for all displacements with 0 < |i| <= range
  // (Euclidean norm).
  static InteractionKernel exponential(int dimension, double c1, double c2, int range);

  // Arbitrary entries; missing mirror images are filled in, conflicting ones
  // rejected. The certificate constant C1 is derived from the entries at the
  // given C2.
  static InteractionKernel from_entries(int dimension, std::vector<Entry> entries,
                                        double decay_c2 = 1.0);

  // "nn", "exp:C1:C2:R", or a path to a kernel file ("dx .. dz value" lines).
  static InteractionKernel parse(const std::string& spec, int dimension);
  static InteractionKernel load(std::istream& in, int dimension);

  int dimension() const { return d_; }
  int range() const { return range_; }
  double decay_c1() const { return c1_; }
  double decay_c2() const { return c2_; }

  double value(std::span<const int> displacement) const;
  const std::vector<Entry>& entries() const { return entries_; }

  // Sum_{i != 0} |K(i)| over stored displacements.
  double abs_sum() const;

 private:
  InteractionKernel() = default;
  void finalize(double decay_c2);

  int d_ = 1;
  int range_ = 0;
  double c1_ = 0.0, c2_ = 1.0;
  std::vector<Entry> entries_;  // sorted by displacement, no zero displacement
};

double kernel_sum(const InteractionKernel& kernel);

/// Diagnostic output of the Dobrushin uniqueness check at a given kappa.
struct DobrushinReport {
  double kernel_sum = 0.0;   // Sum_{i!=0} |K(i)|
  double kappa1 = 0.0;       // uniqueness threshold (2 kernel_sum)^-1; +inf if sum 0
  double kappa = 0.0;
  bool inside = false;       // kappa < kappa1 (strict)
  double max_row_sum = 0.0;  // Sum_i |tanh(2 kappa K(i))| <= 2 kappa kernel_sum
};

// Upper bound |tanh(2 kappa K(displacement))| on the influence coefficient
// C_ki for k - i = displacement. Zero displacement is a domain error.
double dobrushin_coefficient_bound(const InteractionKernel& kernel, double kappa,
                                   std::span<const int> displacement);

DobrushinReport uniqueness_check(const InteractionKernel& kernel, double kappa);

// Decay length implied by the report's row-sum contraction: correlations fall
// off at least like exp(-r / length). Zero when the row sum vanishes.
double correlation_length_bound(const DobrushinReport& report);

}  // namespace isk
