#pragma once

// Taylor coefficients rho_l of rho(v), the minimal root of
// B̄(u) + B_set(u, v) = 0 viewed as a function of v.
//
// rho_l is the probability that the process, started from one particle, dies
// out with exactly l_p jumps of each tracked b-index set[p].

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "crossing/branching_law.hpp"
#include "crossing/error.hpp"
#include "crossing/root_solver.hpp"
#include "crossing/truncated_series.hpp"

namespace crossing {

inline constexpr double kDegenerateDerivative = 1e-10;
inline constexpr double kNegativeClamp = 1e-14;

namespace detail {

inline double clamp_coefficient(double c, std::size_t where) {
  if (c >= 0.0) return c;
  if (c >= -kNegativeClamp) return 0.0;
  fail(ErrorKind::kInternal, "rho coefficient " + std::to_string(c) +
                                 " is negative at rank " + std::to_string(where));
}

inline void require_order(std::size_t order) {
  if (order < 1) fail(ErrorKind::kValidation, "truncation too small: K must be >= 1");
}

inline void require_nondegenerate(double derivative) {
  if (!(std::abs(derivative) > kDegenerateDerivative)) {
    fail(ErrorKind::kNumeric, "degenerate derivative at rho_0");
  }
}

}  // namespace detail

/// Degree-<=K truncation of rho(v) for an arbitrary crossing set.
///
/// Solves degree by degree. For a target index l of degree d,
///
///   sum_{j not in set} b_j [rho^j]_l + sum_{k in set, l_k >= 1} b_k [rho^k]_{l - e_k} = 0.
///
/// The unknown rho_l enters the first sum only linearly, with coefficient
/// B̄'(rho_0); everything else involves coefficients of degree < d. Powers
/// rho^p are kept as running tables: their degree-d block is first computed
/// with the unknown degree-d coefficients of rho masked to zero, then
/// corrected by p rho_0^{p-1} rho_l once rho_l is known.
inline Series solve_rho_series(const BranchingLaw& law, const CrossingSet& set,
                               std::size_t order) {
  require_valid(law, set);
  detail::require_order(order);

  const std::size_t dims = set.size();
  const double rho0 = min_root_at_zero(law, set).value;
  const double denom = eval_complement_derivative(law, set, rho0);
  detail::require_nondegenerate(denom);

  const std::size_t top = law.max_index();
  Series rho(dims, order);
  const IndexSpace& sp = rho.space();

  // powers[p] = rho^p for p = 0..top; powers[1] aliases rho via copies below.
  std::vector<Series> powers;
  powers.reserve(top + 1);
  powers.push_back(Series::unit_like(rho));
  for (std::size_t p = 1; p <= top; ++p) {
    Series s(rho.space_ptr());
    s.at_rank(0) = std::pow(rho0, static_cast<double>(p));
    powers.push_back(std::move(s));
  }
  rho.at_rank(0) = rho0;

  // d/du u^p at rho0, for the fix-up step.
  std::vector<double> dpow(top + 1, 0.0);
  for (std::size_t p = 1; p <= top; ++p) {
    dpow[p] = static_cast<double>(p) * std::pow(rho0, static_cast<double>(p - 1));
  }

  std::vector<std::uint32_t> shifted(dims);
  for (std::size_t d = 1; d <= order; ++d) {
    // Masked degree-d blocks of rho^p, p >= 2. rho's own degree-d block is
    // still zero here, and powers[p-1]'s block is already masked.
    for (std::size_t p = 2; p <= top; ++p) {
      Series::accumulate_product_degree(powers[p - 1], rho, d, powers[p]);
    }

    for (std::size_t r = sp.degree_begin(d); r < sp.degree_end(d); ++r) {
      double rhs = 0.0;
      for (std::size_t j = 2; j <= top; ++j) {
        if (law.rate(j) == 0.0 || set.contains(static_cast<unsigned>(j))) continue;
        rhs += law.rate(j) * powers[j].at_rank(r);
      }
      const auto target = sp.counts(r);
      for (std::size_t p = 0; p < dims; ++p) {
        if (target[p] == 0) continue;
        std::copy(target.begin(), target.end(), shifted.begin());
        --shifted[p];
        rhs += law.rate(set[p]) * powers[set[p]].at_rank(sp.rank(shifted));
      }
      const double value = detail::clamp_coefficient(-rhs / denom, r);
      rho.at_rank(r) = value;
      powers[1].at_rank(r) = value;
      for (std::size_t p = 2; p <= top; ++p) powers[p].at_rank(r) += dpow[p] * value;
    }
  }
  return rho;
}

/// Death-count series (set = {0}): rho_0 = 0, rho_1 = b_0 / (-b_1) and
///   rho_{k+1} = (1 / -b_1) sum_{j=2}^{k+1} b_j [rho^j]_{k+1}.
/// Since rho_0 = 0, [rho^j]_{k+1} only involves rho_1..rho_k.
inline Series death_series(const BranchingLaw& law, std::size_t order) {
  require_valid(law, CrossingSet{0});
  detail::require_order(order);

  const std::size_t top = law.max_index();
  const double diag = law.total_rate();
  std::vector<double> rho(order + 1, 0.0);
  // pw[j][n] = [rho^j]_n, zero for n < j.
  std::vector<std::vector<double>> pw(top + 1, std::vector<double>(order + 1, 0.0));

  rho[1] = law.rate(0) / diag;
  pw[1][1] = rho[1];
  for (std::size_t n = 1; n <= order; ++n) {
    if (n >= 2) {
      double acc = 0.0;
      for (std::size_t j = 2; j <= std::min(top, n); ++j) {
        if (law.rate(j) == 0.0) continue;
        acc += law.rate(j) * pw[j][n];
      }
      rho[n] = detail::clamp_coefficient(acc / diag, n);
      pw[1][n] = rho[n];
    }
    // Extend the power tables to degree n + 1 using rho_1..rho_n.
    if (n + 1 <= order) {
      for (std::size_t j = 2; j <= top; ++j) {
        double acc = 0.0;
        for (std::size_t c = 1; c + (j - 1) <= n + 1; ++c) {
          acc += rho[c] * pw[j - 1][n + 1 - c];
        }
        pw[j][n + 1] = acc;
      }
    }
  }

  Series out(1, order);
  for (std::size_t n = 0; n <= order; ++n) out.at_rank(n) = rho[n];
  return out;
}

/// (m-1)-range up-crossing series (set = {m}, m >= 2). rho_0 is the minimal
/// root of B_m(u) = sum_{j != m} b_j u^j, D = B_m'(rho_0), and
///   rho_1     = -b_m rho_0^m / D
///   rho_{k+1} = -( sum_{i != 1, m} b_i [rho^i]'_{k+1} + b_m [rho^m]_k ) / D
/// where [.]' excludes the terms that contain rho_{k+1} itself.
inline Series upcross_series(const BranchingLaw& law, unsigned m, std::size_t order) {
  if (m < 2) fail(ErrorKind::kValidation, "up-crossing index must be >= 2");
  const CrossingSet set{m};
  require_valid(law, set);
  detail::require_order(order);

  const std::size_t top = law.max_index();
  const double rho0 = min_root_at_zero(law, set).value;
  double deriv = 0.0;
  for (std::size_t j = 1; j <= top; ++j) {
    if (j == m) continue;
    deriv += static_cast<double>(j) * law.rate(j) * std::pow(rho0, static_cast<double>(j - 1));
  }
  detail::require_nondegenerate(deriv);

  std::vector<double> rho(order + 1, 0.0);
  rho[0] = rho0;
  // pw[j][n] = [rho^j]_n with all known coefficients.
  std::vector<std::vector<double>> pw(top + 1, std::vector<double>(order + 1, 0.0));
  pw[0][0] = 1.0;
  for (std::size_t j = 1; j <= top; ++j) pw[j][0] = std::pow(rho0, static_cast<double>(j));

  auto power_coefficient = [&](std::size_t j, std::size_t n) {
    // [rho^j]_n = sum_c rho_c [rho^{j-1}]_{n-c}, using the current rho table.
    double acc = 0.0;
    for (std::size_t c = 0; c <= n; ++c) acc += rho[c] * pw[j - 1][n - c];
    return acc;
  };

  for (std::size_t n = 1; n <= order; ++n) {
    // Masked: rho[n] is still zero, so [rho^j]_n misses exactly the linear
    // term j rho_0^{j-1} rho_n.
    for (std::size_t j = 1; j <= top; ++j) pw[j][n] = power_coefficient(j, n);
    double acc = law.rate(m) * pw[m][n - 1];
    for (std::size_t i = 2; i <= top; ++i) {
      if (i == m || law.rate(i) == 0.0) continue;
      acc += law.rate(i) * pw[i][n];
    }
    rho[n] = detail::clamp_coefficient(-acc / deriv, n);
    for (std::size_t j = 1; j <= top; ++j) {
      pw[j][n] += static_cast<double>(j) * std::pow(rho0, static_cast<double>(j - 1)) * rho[n];
    }
  }

  Series out(1, order);
  for (std::size_t n = 0; n <= order; ++n) out.at_rank(n) = rho[n];
  return out;
}

/// Death-count series of the cubic law B(u) = 2q - 3pu + u^3 computed only
/// from the closed recursion obtained by differentiating 2qv - 3p rho + rho^3:
///   rho_1 = 2q / 3p,  rho_2 = 0,
///   rho_{n+1} = 1/(p(n+1)) sum_{k=2}^{n} (n-k+1) rho_{n-k+1} sum_{i=1}^{k-1} rho_i rho_{k-i}.
/// Kept independent of the general solver so the two can check each other.
inline Series example32_series(double p, double q, std::size_t order) {
  if (!(p > 0.0 && q > 0.0)) fail(ErrorKind::kValidation, "p and q must be positive");
  if (std::abs(3.0 * p - 2.0 * q - 1.0) > kConservationTolerance * 3.0 * p) {
    fail(ErrorKind::kValidation, "conservation violated: 3p must equal 2q + 1");
  }
  detail::require_order(order);

  std::vector<double> rho(order + 1, 0.0);
  rho[1] = 2.0 * q / (3.0 * p);
  for (std::size_t n = 2; n + 1 <= order; ++n) {
    double acc = 0.0;
    for (std::size_t k = 2; k <= n; ++k) {
      double square = 0.0;
      for (std::size_t i = 1; i <= k - 1; ++i) square += rho[i] * rho[k - i];
      acc += static_cast<double>(n - k + 1) * rho[n - k + 1] * square;
    }
    rho[n + 1] = acc / (p * static_cast<double>(n + 1));
  }

  Series out(1, order);
  for (std::size_t n = 0; n <= order; ++n) out.at_rank(n) = rho[n];
  return out;
}

}  // namespace crossing
