#pragma once

// Conditional-on-extinction crossing distributions and their moments.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "crossing/branching_law.hpp"
#include "crossing/error.hpp"
#include "crossing/rho_series.hpp"
#include "crossing/root_solver.hpp"
#include "crossing/truncated_series.hpp"

namespace crossing {

/// P(Y(tau) = l | tau < infinity) for every l of total degree <= K.
struct CrossingDistribution {
  CrossingSet set;
  unsigned initial_state = 1;
  std::size_t order = 0;
  Series probs{1, 0};
  double rho = 1.0;  // extinction probability from state 1
  double captured_mass = 0.0;
  bool conditional = true;

  double probability(const MultiIndex& l) const { return probs[l]; }
};

/// Series for the given set, dispatching to the univariate fast paths.
inline Series rho_series(const BranchingLaw& law, const CrossingSet& set,
                         std::size_t order) {
  if (set.size() == 1 && set[0] == 0) return death_series(law, order);
  if (set.size() == 1 && set[0] >= 2) {
    require_valid(law, set);
    return upcross_series(law, set[0], order);
  }
  return solve_rho_series(law, set, order);
}

/// Distribution from a precomputed rho-series: rho^{-i} [series^{*i}]_l.
inline CrossingDistribution distribution_from_series(const Series& series, double rho,
                                                     const CrossingSet& set,
                                                     unsigned initial_state) {
  if (initial_state < 1) fail(ErrorKind::kValidation, "initial state must be >= 1");
  if (!(rho > 0.0)) fail(ErrorKind::kNumeric, "extinction impossible (rho = 0)");
  CrossingDistribution dist;
  dist.set = set;
  dist.initial_state = initial_state;
  dist.order = series.order();
  dist.rho = rho;
  const double norm = std::pow(rho, -static_cast<double>(initial_state));
  dist.probs = convolution_power(series, initial_state).scaled(norm);
  for (double& p : dist.probs.data()) p = std::min(std::max(p, 0.0), 1.0);
  dist.captured_mass = dist.probs.sum();
  return dist;
}

inline CrossingDistribution conditional_distribution(const BranchingLaw& law,
                                                     const CrossingSet& set,
                                                     unsigned initial_state,
                                                     std::size_t order) {
  require_valid(law, set);
  if (initial_state < 1) fail(ErrorKind::kValidation, "initial state must be >= 1");
  const double rho = min_root_B(law).value;
  return distribution_from_series(rho_series(law, set, order), rho, set, initial_state);
}

/// One-dimensional distribution of a single tracked component.
struct Marginal {
  unsigned index = 0;  // b-index of the component
  std::vector<double> probs;

  double mass() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
};

/// Sums the joint table over every component except `k`.
inline Marginal marginal(const CrossingDistribution& dist, unsigned k) {
  const auto pos = dist.set.position(k);
  if (!pos) fail(ErrorKind::kValidation, "index " + std::to_string(k) + " is not in the crossing set");
  Marginal out;
  out.index = k;
  out.probs.assign(dist.order + 1, 0.0);
  const IndexSpace& sp = dist.probs.space();
  for (std::size_t r = 0; r < sp.size(); ++r) {
    out.probs[sp.counts(r)[*pos]] += dist.probs.at_rank(r);
  }
  return out;
}

inline constexpr double kMomentTailTolerance = 1e-8;

/// Partial-sum mean and variance of one crossing count at extinction.
struct MomentReport {
  unsigned index = 0;
  std::size_t order = 0;
  double rho = 1.0;
  double mean = 0.0;      // lower bound unless converged
  double variance = 0.0;
  double tail_mass = 0.0;
  double last_increment = 0.0;  // growth of the mean over the last ten terms
  bool converged = false;
  bool rho_is_one = true;  // false: moments are conditional on extinction
};

inline MomentReport moments(const BranchingLaw& law, const CrossingSet& set, unsigned k,
                            std::size_t order) {
  require_valid(law, set);
  if (!set.contains(k)) fail(ErrorKind::kValidation, "index " + std::to_string(k) + " is not in the crossing set");
  const CrossingSet single{k};
  const Series series = rho_series(law, single, order);
  const double rho = min_root_B(law).value;

  MomentReport rep;
  rep.index = k;
  rep.order = order;
  rep.rho = rho;
  rep.rho_is_one = rho == 1.0;

  double mass = 0.0, first = 0.0, second = 0.0, first_before = 0.0;
  const std::size_t window = order >= 10 ? order - 10 : 0;
  for (std::size_t n = 0; n <= order; ++n) {
    const double p = series.at_rank(n) / rho;
    const double x = static_cast<double>(n);
    mass += p;
    first += x * p;
    second += x * x * p;
    if (n == window) first_before = first;
  }
  rep.mean = first;
  rep.variance = second - first * first;
  rep.tail_mass = 1.0 - mass;
  rep.last_increment = first - first_before;
  rep.converged = rep.tail_mass < kMomentTailTolerance &&
                  rep.last_increment < kMomentTailTolerance;
  return rep;
}

}  // namespace crossing
