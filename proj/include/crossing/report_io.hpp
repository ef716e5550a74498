#pragma once

// JSON and CSV renderings of computed results.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "crossing/branching_law.hpp"
#include "crossing/comparison.hpp"
#include "crossing/crossing_distribution.hpp"
#include "crossing/root_solver.hpp"
#include "crossing/simulation.hpp"
#include "crossing/truncated_series.hpp"

namespace crossing {

using nlohmann::json;

inline json to_json(const MultiIndex& m) {
  return std::vector<std::uint32_t>(m.counts().begin(), m.counts().end());
}

inline json set_to_json(const CrossingSet& s) {
  return std::vector<unsigned>(s.indices().begin(), s.indices().end());
}

// Non-finite doubles have no JSON literal; they are written as null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const RootResult& r) {
  return {{"value", r.value}, {"residual", r.residual}, {"iterations", r.iterations}};
}

/// {"coeffs": [{"index": [...], "value": x}], "K": K}; zero coefficients are
/// omitted.
inline json series_to_json(const Series& s) {
  json coeffs = json::array();
  s.for_each_nonzero([&](const MultiIndex& m, double c) {
    coeffs.push_back({{"index", to_json(m)}, {"value", c}});
  });
  return {{"coeffs", coeffs}, {"K", s.order()}};
}

inline json to_json(const CrossingDistribution& d) {
  json probs = json::array();
  d.probs.for_each_nonzero([&](const MultiIndex& m, double p) {
    probs.push_back({{"index", to_json(m)}, {"value", p}});
  });
  return {{"rho", d.rho},
          {"initial_state", d.initial_state},
          {"crossing_set", set_to_json(d.set)},
          {"conditional", d.conditional},
          {"probs", probs},
          {"captured_mass", d.captured_mass},
          {"K", d.order}};
}

inline json to_json(const MomentReport& r) {
  return {{"index", r.index},
          {"K", r.order},
          {"rho", r.rho},
          {"mean", r.mean},
          {"variance", r.variance},
          {"tail_mass", r.tail_mass},
          {"last_increment", r.last_increment},
          {"converged", r.converged},
          {"kind", r.rho_is_one ? "moments" : "conditional moments"},
          {"bounds", r.converged ? "estimate" : "lower bound"}};
}

inline json to_json(const EmpiricalDistribution& e) {
  json cells = json::array();
  for (const auto& [k, c] : e.tallies) {
    cells.push_back({{"index", to_json(k)}, {"count", c}, {"value", e.probability(k)}});
  }
  return {{"crossing_set", set_to_json(e.set)},
          {"initial_state", e.initial_state},
          {"n_paths", e.n_paths},
          {"n_extinct", e.n_extinct},
          {"extinct_fraction", e.extinct_fraction()},
          {"censor_rate", e.censor_rate()},
          {"empirical", cells}};
}

inline json to_json(const ComparisonReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"index", to_json(c.index)},
                     {"exact", c.exact},
                     {"empirical", c.empirical},
                     {"standard_error", c.standard_error},
                     {"z", number(c.z)}});
  }
  return {{"cells", cells},
          {"cells_compared", r.cells_compared()},
          {"max_abs_z", number(r.max_abs_z)},
          {"n_extinct", r.n_extinct},
          {"threshold", r.threshold},
          {"gate", r.gate},
          {"passed", r.passed}};
}

inline json to_json(const SurvivalReport& r) {
  return {{"index", r.index},
          {"level", r.level},
          {"rho", r.rho},
          {"n_paths", r.n_paths},
          {"n_surviving", r.n_surviving},
          {"n_at_level", r.n_at_level},
          {"fraction", r.fraction()}};
}

inline json to_json(const ValidationReport& r) {
  json diags = json::array();
  for (const auto& v : r.violations) {
    diags.push_back({{"code", std::string(diagnostic_name(v.code))}, {"message", v.message}});
  }
  return {{"valid", r.ok()}, {"diagnostics", diags}};
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline void csv_header(std::ostream& os, const CrossingSet& set) {
  for (unsigned k : set.indices()) os << "y_" << k << ',';
}

inline void csv_index(std::ostream& os, const MultiIndex& m) {
  for (auto c : m.counts()) os << c << ',';
}

}  // namespace detail

inline void write_csv(std::ostream& os, const CrossingDistribution& d) {
  os.precision(17);
  detail::csv_header(os, d.set);
  os << "probability\n";
  d.probs.for_each_nonzero([&](const MultiIndex& m, double p) {
    detail::csv_index(os, m);
    os << p << '\n';
  });
}

inline void write_csv(std::ostream& os, const EmpiricalDistribution& e) {
  os.precision(17);
  detail::csv_header(os, e.set);
  os << "count,frequency\n";
  for (const auto& [k, c] : e.tallies) {
    detail::csv_index(os, k);
    os << c << ',' << e.probability(k) << '\n';
  }
}

inline void write_csv(std::ostream& os, const ComparisonReport& r, const CrossingSet& set) {
  os.precision(17);
  detail::csv_header(os, set);
  os << "exact,empirical,standard_error,z\n";
  for (const auto& c : r.cells) {
    detail::csv_index(os, c.index);
    os << c.exact << ',' << c.empirical << ',' << c.standard_error << ',' << c.z << '\n';
  }
}

inline void write_csv(std::ostream& os, const MomentReport& r) {
  os.precision(17);
  os << "index,K,rho,mean,variance,tail_mass,converged\n"
     << r.index << ',' << r.order << ',' << r.rho << ',' << r.mean << ',' << r.variance << ','
     << r.tail_mass << ',' << (r.converged ? "true" : "false") << '\n';
}

}  // namespace crossing
