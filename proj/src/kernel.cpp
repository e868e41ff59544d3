#include "isk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "isk/errors.hpp"

namespace isk {

namespace {

double euclid_norm(std::span<const int> v) {
  double s = 0;
  for (int c : v) s += static_cast<double>(c) * c;
  return std::sqrt(s);
}

bool is_zero(std::span<const int> v) {
  return std::all_of(v.begin(), v.end(), [](int c) { return c == 0; });
}

std::vector<int> negate(std::span<const int> v) {
  std::vector<int> out(v.begin(), v.end());
  for (int& c : out) c = -c;
  return out;
}

}  // namespace

InteractionKernel InteractionKernel::nearest_neighbor(int dimension) {
  std::vector<Entry> entries;
  for (int ax = 0; ax < dimension; ++ax) {
    std::vector<int> e(dimension, 0);
    e[ax] = 1;
    entries.push_back({e, 1.0});
  }
  return from_entries(dimension, std::move(entries));
}

InteractionKernel InteractionKernel::exponential(int dimension, double c1, double c2,
                                                 int range) {
  if (c1 <= 0 || c2 <= 0) throw ValidationError("exp kernel: C1, C2 must be positive");
  if (range < 1) throw ValidationError("exp kernel: range must be >= 1");

  std::vector<Entry> entries;
  std::vector<int> cur(dimension, -range);
  while (true) {
    const double r = euclid_norm(cur);
    if (r > 0 && r <= range) entries.push_back({cur, c1 * std::exp(-c2 * r)});
    int ax = dimension - 1;
    for (; ax >= 0; --ax) {
      if (cur[ax] < range) {
        ++cur[ax];
        break;
      }
      cur[ax] = -range;
    }
    if (ax < 0) break;
  }

  InteractionKernel k;
  k.d_ = dimension;
  k.entries_ = std::move(entries);
  k.finalize(c2);
  k.c1_ = c1;  // exact certificate by construction
  return k;
}

InteractionKernel InteractionKernel::from_entries(int dimension, std::vector<Entry> entries,
                                                  double decay_c2) {
  std::map<std::vector<int>, double> table;
  for (auto& e : entries) {
    if (static_cast<int>(e.displacement.size()) != dimension)
      throw ValidationError("kernel entry has wrong dimension");
    if (is_zero(e.displacement)) {
      if (e.value != 0.0)
        throw ValidationError("kernel: K(0) must be zero (zero-displacement entry given)");
      continue;
    }
    auto [it, inserted] = table.emplace(e.displacement, e.value);
    if (!inserted && it->second != e.value)
      throw ValidationError("kernel: conflicting values for one displacement");
  }
  // enforce K(i) = K(-i): mirror image must match when present, added otherwise
  for (auto it = table.begin(); it != table.end(); ++it) {
    auto neg = negate(it->first);
    auto mirror = table.find(neg);
    if (mirror == table.end())
      table.emplace(std::move(neg), it->second);
    else if (mirror->second != it->second)
      throw ValidationError("kernel: K(i) != K(-i)");
  }

  InteractionKernel k;
  k.d_ = dimension;
  for (auto& [disp, val] : table)
    if (val != 0.0) k.entries_.push_back({disp, val});
  k.finalize(decay_c2);
  return k;
}

void InteractionKernel::finalize(double decay_c2) {
  if (decay_c2 <= 0) throw ValidationError("kernel: decay constant C2 must be positive");
  c2_ = decay_c2;
  c1_ = 0.0;
  double rmax = 0.0;
  for (const auto& e : entries_) {
    const double r = euclid_norm(e.displacement);
    rmax = std::max(rmax, r);
    c1_ = std::max(c1_, std::abs(e.value) * std::exp(c2_ * r));
  }
  range_ = static_cast<int>(std::ceil(rmax));
  if (entries_.empty()) c1_ = 1.0;  // empty kernel: any positive certificate works
}

InteractionKernel InteractionKernel::parse(const std::string& spec, int dimension) {
  if (spec == "nn") return nearest_neighbor(dimension);
  if (spec.rfind("exp:", 0) == 0) {
    std::istringstream ss(spec.substr(4));
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':'))
      throw ValidationError("kernel spec: expected exp:C1:C2:R");
    try {
      return exponential(dimension, std::stod(a), std::stod(b), std::stoi(c));
    } catch (const std::logic_error&) {
      throw ValidationError("kernel spec: bad numeric field in '" + spec + "'");
    }
  }
  std::ifstream in(spec);
  if (!in) throw ValidationError("kernel spec: not a named kernel and cannot open file '" +
                                 spec + "'");
  return load(in, dimension);
}

InteractionKernel InteractionKernel::load(std::istream& in, int dimension) {
  std::vector<Entry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<int> disp(dimension);
    double value;
    if (!(ss >> disp[0])) continue;  // blank line
    for (int ax = 1; ax < dimension; ++ax)
      if (!(ss >> disp[ax]))
        throw ValidationError("kernel file line " + std::to_string(lineno) +
                              ": expected " + std::to_string(dimension) + " coordinates");
    if (!(ss >> value))
      throw ValidationError("kernel file line " + std::to_string(lineno) +
                            ": missing value");
    entries.push_back({std::move(disp), value});
  }
  return from_entries(dimension, std::move(entries));
}

double InteractionKernel::value(std::span<const int> displacement) const {
  for (const auto& e : entries_) {
    if (std::equal(e.displacement.begin(), e.displacement.end(), displacement.begin(),
                   displacement.end()))
      return e.value;
  }
  return 0.0;
}

double InteractionKernel::abs_sum() const {
  double s = 0;
  for (const auto& e : entries_) s += std::abs(e.value);
  return s;
}

double kernel_sum(const InteractionKernel& kernel) { return kernel.abs_sum(); }

double dobrushin_coefficient_bound(const InteractionKernel& kernel, double kappa,
                                   std::span<const int> displacement) {
  if (is_zero(displacement))
    throw std::domain_error("dobrushin_coefficient_bound: self-influence undefined");
  return std::abs(std::tanh(2.0 * kappa * kernel.value(displacement)));
}

DobrushinReport uniqueness_check(const InteractionKernel& kernel, double kappa) {
  if (kappa < 0) throw std::domain_error("uniqueness_check: kappa must be >= 0");
  DobrushinReport r;
  r.kappa = kappa;
  r.kernel_sum = kernel.abs_sum();
  r.kappa1 = r.kernel_sum > 0 ? 1.0 / (2.0 * r.kernel_sum)
                              : std::numeric_limits<double>::infinity();
  r.inside = kappa < r.kappa1;
  r.max_row_sum = 0.0;
  for (const auto& e : kernel.entries())
    r.max_row_sum += std::abs(std::tanh(2.0 * kappa * e.value));
  return r;
}

double correlation_length_bound(const DobrushinReport& report) {
  if (report.max_row_sum <= 0) return 0.0;
  if (report.max_row_sum >= 1) return std::numeric_limits<double>::infinity();
  return -1.0 / std::log(report.max_row_sum);
}

}  // namespace isk
