#pragma once

// Statistical comparison of exact and simulated crossing distributions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "crossing/crossing_distribution.hpp"
#include "crossing/error.hpp"
#include "crossing/simulation.hpp"

namespace crossing {

inline std::vector<std::pair<MultiIndex, double>> reference_cells(const CrossingDistribution& d) {
  return d.probs.entries();
}

inline std::vector<std::pair<MultiIndex, double>> reference_cells(const EmpiricalDistribution& d) {
  std::vector<std::pair<MultiIndex, double>> out;
  for (const auto& [k, c] : d.tallies) out.emplace_back(k, d.probability(k));
  return out;
}

struct ComparisonCell {
  MultiIndex index;
  double exact = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonCell> cells;
  double max_abs_z = 0.0;
  std::uint64_t n_extinct = 0;
  double threshold = 1e-3;
  double gate = 4.0;
  bool passed = true;

  std::size_t cells_compared() const noexcept { return cells.size(); }
};

inline constexpr double kCellThreshold = 1e-3;
inline constexpr double kZGate = 4.0;

/// z-scores of the empirical frequencies against `reference` for every cell
/// whose reference mass is at least `threshold`. Passes iff max |z| <= gate.
template <class Reference>
ComparisonReport compare(const Reference& reference, const EmpiricalDistribution& empirical,
                         double threshold = kCellThreshold, double gate = kZGate) {
  if (!(reference.set == empirical.set) || reference.initial_state != empirical.initial_state) {
    fail(ErrorKind::kValidation, "mismatched configuration: crossing set or initial state differ");
  }
  if (empirical.n_extinct == 0) fail(ErrorKind::kNumeric, "no extinct paths to compare");
  ComparisonReport rep;
  rep.n_extinct = empirical.n_extinct;
  rep.threshold = threshold;
  rep.gate = gate;
  const double n = static_cast<double>(empirical.n_extinct);
  for (auto& [index, p] : reference_cells(reference)) {
    if (p < threshold) continue;
    ComparisonCell cell;
    cell.exact = p;
    cell.empirical = empirical.probability(index);
    cell.standard_error = std::sqrt(p * (1.0 - p) / n);
    const double diff = cell.empirical - p;
    if (cell.standard_error > 0.0) {
      cell.z = diff / cell.standard_error;
    } else {
      cell.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(cell.z));
    cell.index = std::move(index);
    rep.cells.push_back(std::move(cell));
  }
  rep.passed = rep.max_abs_z <= gate;
  return rep;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Two-sample chi-square test of homogeneity on the extinct-path tallies.
/// Cells whose pooled expected count falls below 5 in either sample are
/// lumped into one bin.
inline ChiSquareResult two_sample_chi_square(const EmpiricalDistribution& a,
                                             const EmpiricalDistribution& b) {
  if (a.n_extinct == 0 || b.n_extinct == 0) fail(ErrorKind::kNumeric, "empty sample");
  std::map<MultiIndex, std::pair<double, double>> joint;
  for (const auto& [k, c] : a.tallies) joint[k].first += static_cast<double>(c);
  for (const auto& [k, c] : b.tallies) joint[k].second += static_cast<double>(c);

  const double na = static_cast<double>(a.n_extinct);
  const double nb = static_cast<double>(b.n_extinct);
  const double total = na + nb;
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> lumped{0.0, 0.0};
  for (const auto& [k, ab] : joint) {
    const double pooled = ab.first + ab.second;
    if (std::min(pooled * na / total, pooled * nb / total) < 5.0) {
      lumped.first += ab.first;
      lumped.second += ab.second;
    } else {
      bins.push_back(ab);
    }
  }
  if (lumped.first + lumped.second > 0.0) bins.push_back(lumped);

  ChiSquareResult res;
  if (bins.size() < 2) return res;
  for (const auto& [oa, ob] : bins) {
    const double pooled = oa + ob;
    const double ea = pooled * na / total;
    const double eb = pooled * nb / total;
    res.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  res.dof = bins.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(res.dof));
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

}  // namespace crossing
