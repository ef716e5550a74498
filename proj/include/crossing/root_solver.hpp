#pragma once

// Minimal nonnegative roots on [0, 1] of B(u) and of B̄(u) + B_set(u, v).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "crossing/branching_law.hpp"
#include "crossing/error.hpp"

namespace crossing {

struct RootResult {
  double value = 0.0;
  double residual = 0.0;
  long iterations = 0;
};

inline constexpr double kRootStepTolerance = 1e-13;
inline constexpr long kRootIterationCap = 1'000'000;

namespace detail {

// Minimal root on [0, 1] of f(u) = sum_j c_j u^j with c_1 < 0 and c_j >= 0
// otherwise, where `coeffs` holds c_0..c_J.
//
// Iterates upward from u = 0. Each step takes the larger of the fixed-point
// map g(u) = sum_{j != 1} c_j u^j / (-c_1) and a Newton step; both stay below
// the minimal root because f is convex and positive to its left, so the
// iterate can never jump past it onto the second root.
inline RootResult minimal_root(std::span<const double> coeffs, double scale) {
  const double diag = -coeffs[1];
  auto eval = [&](double u) {
    double value = 0.0, slope = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
      slope = slope * u + value;
      value = value * u + coeffs[j];
    }
    return std::pair{value, slope};
  };

  RootResult r;
  if (coeffs[0] <= 0.0) {
    r.value = 0.0;
    r.residual = 0.0;
    return r;
  }

  // Subcritical or critical at 1: the minimal root is 1 exactly. Iterating
  // into a double root would stall at sqrt(machine epsilon).
  const auto [f1, d1] = eval(1.0);
  const double tol = kConservationTolerance * scale;
  if (std::abs(f1) <= tol && d1 <= tol) {
    r.value = 1.0;
    r.residual = std::abs(f1);
    return r;
  }

  double u = 0.0;
  for (long it = 1; it <= kRootIterationCap; ++it) {
    const auto [f, df] = eval(u);
    r.iterations = it;
    if (f <= 0.0) break;
    double next = (f + diag * u) / diag;  // g(u)
    if (df < 0.0) next = std::max(next, u - f / df);
    next = std::clamp(next, u, 1.0);
    const double step = next - u;
    u = next;
    if (step < kRootStepTolerance) break;
    if (it == kRootIterationCap) {
      fail(ErrorKind::kNumeric, "root iteration cap exceeded");
    }
  }
  r.value = u;
  r.residual = std::abs(eval(u).first);
  if (r.residual > tol) {
    fail(ErrorKind::kInternal,
         "root residual " + std::to_string(r.residual) + " exceeds tolerance");
  }
  return r;
}

}  // namespace detail

/// rho: the minimal nonnegative root of B(u) = 0, i.e. the extinction
/// probability from state 1.
inline RootResult min_root_B(const BranchingLaw& law) {
  require_valid(law);
  const auto b = law.rates();
  return detail::minimal_root(b, law.scale());
}

/// rho(v): the minimal nonnegative root of B̄(u) + B_set(u, v) = 0.
/// With v = 0 this is rho_0, the constant term of the rho-series.
inline RootResult min_root_at(const BranchingLaw& law, const CrossingSet& set,
                              std::span<const double> v) {
  require_valid(law, set);
  detail::check_dimension(set, v);
  std::vector<double> c(law.rates().begin(), law.rates().end());
  for (std::size_t p = 0; p < set.size(); ++p) {
    if (!(v[p] >= 0.0 && v[p] <= 1.0)) {
      fail(ErrorKind::kValidation, "v components must lie in [0, 1]");
    }
    if (set[p] < c.size()) c[set[p]] *= v[p];
  }
  return detail::minimal_root(c, law.scale());
}

inline RootResult min_root_at_zero(const BranchingLaw& law, const CrossingSet& set) {
  std::vector<double> zeros(set.size(), 0.0);
  return min_root_at(law, set, zeros);
}

}  // namespace crossing
