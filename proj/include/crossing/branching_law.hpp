#pragma once

// Weighted branching laws (rates b_j plus optional state weights w_i), the
// crossing index set, validation, and the generating functions built on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossing/error.hpp"

namespace crossing {

/// State-dependent time scaling w_i (i >= 1) of a weighted branching process.
///
/// Weights only rescale holding times; nothing in the crossing statistics
/// depends on them. They are carried so the timed simulator has something to
/// integrate and so invariance can be checked.
class Weights {
 public:
  enum class Rule { kConstant, kLinear, kTable };

  Weights() = default;

  static Weights unit() { return constant(1.0); }

  static Weights constant(double c) {
    Weights w;
    w.rule_ = Rule::kConstant;
    w.constant_ = c;
    return w;
  }

  /// w_i = i, the ordinary (unweighted) Markov branching process.
  static Weights linear() {
    Weights w;
    w.rule_ = Rule::kLinear;
    return w;
  }

  /// Explicit w_1, w_2, ..., w_n; undefined beyond n.
  static Weights table(std::vector<double> values) {
    Weights w;
    w.rule_ = Rule::kTable;
    w.table_ = std::move(values);
    return w;
  }

  Rule rule() const noexcept { return rule_; }
  double constant_value() const noexcept { return constant_; }
  std::span<const double> table_values() const noexcept { return table_; }

  bool is_unit() const noexcept {
    return rule_ == Rule::kConstant && constant_ == 1.0;
  }

  bool defined_at(std::uint64_t state) const noexcept {
    if (state == 0) return false;
    return rule_ != Rule::kTable || state <= table_.size();
  }

  double at(std::uint64_t state) const {
    if (!defined_at(state)) {
      fail(ErrorKind::kValidation,
           "weight undefined for state " + std::to_string(state));
    }
    switch (rule_) {
      case Rule::kConstant: return constant_;
      case Rule::kLinear: return static_cast<double>(state);
      case Rule::kTable: return table_[state - 1];
    }
    return constant_;
  }

  bool operator==(const Weights&) const = default;

 private:
  Rule rule_ = Rule::kConstant;
  double constant_ = 1.0;
  std::vector<double> table_;
};

/// Finite-support branching rates b_0, b_1, ..., b_J with b_1 the (negative)
/// total jump rate.
class BranchingLaw {
 public:
  BranchingLaw() : rates_(2, 0.0) {}

  explicit BranchingLaw(const std::map<unsigned, double>& rates,
                        Weights weights = Weights::unit())
      : weights_(std::move(weights)) {
    unsigned top = 1;
    for (const auto& [j, b] : rates) top = std::max(top, j);
    rates_.assign(top + 1, 0.0);
    for (const auto& [j, b] : rates) rates_[j] = b;
    trim();
  }

  explicit BranchingLaw(std::vector<double> dense,
                        Weights weights = Weights::unit())
      : rates_(std::move(dense)), weights_(std::move(weights)) {
    if (rates_.size() < 2) rates_.resize(2, 0.0);
    trim();
  }

  /// b_j, zero outside the stored support.
  double rate(std::size_t j) const noexcept {
    return j < rates_.size() ? rates_[j] : 0.0;
  }

  /// Dense view b_0..b_J.
  std::span<const double> rates() const noexcept { return rates_; }
  std::size_t max_index() const noexcept { return rates_.size() - 1; }

  const Weights& weights() const noexcept { return weights_; }

  /// -b_1.
  double total_rate() const noexcept { return -rates_[1]; }

  /// |b_1| + sum_{j != 1} |b_j|; the natural magnitude for residual checks.
  double scale() const noexcept {
    double s = 0.0;
    for (double b : rates_) s += std::abs(b);
    return s;
  }

  BranchingLaw scaled(double factor) const {
    std::vector<double> r = rates_;
    for (double& b : r) b *= factor;
    return BranchingLaw(std::move(r), weights_);
  }

  BranchingLaw with_weights(Weights w) const {
    return BranchingLaw(rates_, std::move(w));
  }

  /// Nonzero entries as an ordered map, the form used in model files.
  std::map<unsigned, double> sparse() const {
    std::map<unsigned, double> out;
    for (std::size_t j = 0; j < rates_.size(); ++j) {
      if (rates_[j] != 0.0) out.emplace(static_cast<unsigned>(j), rates_[j]);
    }
    return out;
  }

  bool operator==(const BranchingLaw&) const = default;

 private:
  void trim() {
    while (rates_.size() > 2 && rates_.back() == 0.0) rates_.pop_back();
  }

  std::vector<double> rates_;
  Weights weights_;
};

/// Strictly increasing set of b-indices whose jumps are tallied jointly.
/// Position p in the set corresponds to component p of every multi-index.
class CrossingSet {
 public:
  CrossingSet() = default;
  explicit CrossingSet(std::vector<unsigned> indices)
      : indices_(std::move(indices)) {}
  CrossingSet(std::initializer_list<unsigned> indices) : indices_(indices) {}

  std::span<const unsigned> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  unsigned operator[](std::size_t p) const { return indices_[p]; }

  std::optional<std::size_t> position(unsigned j) const noexcept {
    auto it = std::find(indices_.begin(), indices_.end(), j);
    if (it == indices_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - indices_.begin());
  }

  bool contains(unsigned j) const noexcept { return position(j).has_value(); }

  bool operator==(const CrossingSet&) const = default;

 private:
  std::vector<unsigned> indices_;
};

// ---------------------------------------------------------------------------
// Validation

enum class Diagnostic {
  kNonFiniteRate,
  kNegativeRate,
  kDiagonalNotNegative,
  kConservationViolated,
  kNoDeathRate,
  kNonPositiveWeight,
  kEmptySet,
  kSetNotIncreasing,
  kSetContainsOne,
  kSetRateNotPositive,
};

inline std::string_view diagnostic_name(Diagnostic d) {
  switch (d) {
    case Diagnostic::kNonFiniteRate: return "non-finite-rate";
    case Diagnostic::kNegativeRate: return "negative-rate";
    case Diagnostic::kDiagonalNotNegative: return "diagonal-not-negative";
    case Diagnostic::kConservationViolated: return "conservation-violated";
    case Diagnostic::kNoDeathRate: return "no-death-rate";
    case Diagnostic::kNonPositiveWeight: return "non-positive-weight";
    case Diagnostic::kEmptySet: return "empty-crossing-set";
    case Diagnostic::kSetNotIncreasing: return "crossing-set-not-increasing";
    case Diagnostic::kSetContainsOne: return "crossing-set-contains-one";
    case Diagnostic::kSetRateNotPositive: return "crossing-rate-not-positive";
  }
  return "unknown";
}

struct Violation {
  Diagnostic code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }

  bool has(Diagnostic d) const noexcept {
    return std::any_of(violations.begin(), violations.end(),
                       [d](const Violation& v) { return v.code == d; });
  }

  std::string summary() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.message;
    }
    return out;
  }
};

/// Relative tolerance on -b_1 = sum_{j != 1} b_j.
inline constexpr double kConservationTolerance = 1e-12;

inline ValidationReport validate(const BranchingLaw& law) {
  ValidationReport report;
  auto add = [&](Diagnostic d, std::string msg) {
    report.violations.push_back({d, std::move(msg)});
  };

  const auto b = law.rates();
  double others = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!std::isfinite(b[j])) {
      add(Diagnostic::kNonFiniteRate, "rate b_" + std::to_string(j) + " is not finite");
      return report;
    }
    if (j == 1) continue;
    if (b[j] < 0.0) {
      add(Diagnostic::kNegativeRate, "rate b_" + std::to_string(j) + " is negative");
    }
    others += b[j];
  }
  if (!(b[1] < 0.0)) {
    add(Diagnostic::kDiagonalNotNegative, "b_1 must be negative");
  }
  if (std::abs(b[1] + others) > kConservationTolerance * std::abs(b[1]) ||
      b[1] == 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "conservation violated (-b_1=" << -b[1] << " != " << others
       << "=sum of other rates)";
    add(Diagnostic::kConservationViolated, os.str());
  }
  if (!(b[0] > 0.0)) {
    add(Diagnostic::kNoDeathRate, "b_0 must be positive");
  }

  const Weights& w = law.weights();
  bool bad_weight = false;
  switch (w.rule()) {
    case Weights::Rule::kConstant:
      bad_weight = !(w.constant_value() > 0.0);
      break;
    case Weights::Rule::kLinear:
      break;
    case Weights::Rule::kTable:
      bad_weight = std::any_of(w.table_values().begin(), w.table_values().end(),
                               [](double x) { return !(x > 0.0); });
      break;
  }
  if (bad_weight) add(Diagnostic::kNonPositiveWeight, "weights must be positive");
  return report;
}

inline ValidationReport validate(const BranchingLaw& law, const CrossingSet& set) {
  ValidationReport report = validate(law);
  auto add = [&](Diagnostic d, std::string msg) {
    report.violations.push_back({d, std::move(msg)});
  };
  const auto idx = set.indices();
  if (idx.empty()) add(Diagnostic::kEmptySet, "crossing set is empty");
  for (std::size_t p = 1; p < idx.size(); ++p) {
    if (idx[p] <= idx[p - 1]) {
      add(Diagnostic::kSetNotIncreasing, "crossing set is not strictly increasing");
      break;
    }
  }
  if (set.contains(1)) add(Diagnostic::kSetContainsOne, "crossing set contains 1");
  for (unsigned k : idx) {
    if (k != 1 && !(law.rate(k) > 0.0)) {
      add(Diagnostic::kSetRateNotPositive,
          "crossing index " + std::to_string(k) + " has b_k <= 0");
    }
  }
  return report;
}

inline void require_valid(const BranchingLaw& law) {
  auto r = validate(law);
  if (!r.ok()) fail(ErrorKind::kValidation, r.summary());
}

inline void require_valid(const BranchingLaw& law, const CrossingSet& set) {
  auto r = validate(law, set);
  if (!r.ok()) fail(ErrorKind::kValidation, r.summary());
}

// ---------------------------------------------------------------------------
// Generating functions. These are pure polynomial evaluations and do not
// re-validate their inputs.

/// B(u) = sum_j b_j u^j.
inline double eval_B(const BranchingLaw& law, double u) {
  const auto b = law.rates();
  double acc = 0.0;
  for (std::size_t j = b.size(); j-- > 0;) acc = acc * u + b[j];
  return acc;
}

inline double eval_B_derivative(const BranchingLaw& law, double u) {
  const auto b = law.rates();
  double acc = 0.0;
  for (std::size_t j = b.size(); j-- > 1;) acc = acc * u + static_cast<double>(j) * b[j];
  return acc;
}

inline double eval_B_second_derivative(const BranchingLaw& law, double u) {
  const auto b = law.rates();
  double acc = 0.0;
  for (std::size_t j = b.size(); j-- > 2;) {
    acc = acc * u + static_cast<double>(j) * static_cast<double>(j - 1) * b[j];
  }
  return acc;
}

namespace detail {

// sum_j c_j u^j and its u-derivative, where c_j = b_j * factor(j).
template <class Factor>
std::pair<double, double> weighted_poly(const BranchingLaw& law, double u,
                                        Factor factor) {
  const auto b = law.rates();
  double value = 0.0;
  double slope = 0.0;
  for (std::size_t j = b.size(); j-- > 0;) {
    const double c = b[j] * factor(static_cast<unsigned>(j));
    slope = slope * u + value;
    value = value * u + c;
  }
  return {value, slope};
}

inline void check_dimension(const CrossingSet& set, std::span<const double> v) {
  if (v.size() != set.size()) {
    fail(ErrorKind::kValidation,
         "dimension mismatch: v has " + std::to_string(v.size()) +
             " components, crossing set has " + std::to_string(set.size()));
  }
}

}  // namespace detail

/// Complement part B̄(u) = sum over j outside the set of b_j u^j.
inline double eval_complement(const BranchingLaw& law, const CrossingSet& set,
                              double u) {
  return detail::weighted_poly(law, u, [&](unsigned j) {
           return set.contains(j) ? 0.0 : 1.0;
         }).first;
}

inline double eval_complement_derivative(const BranchingLaw& law,
                                         const CrossingSet& set, double u) {
  return detail::weighted_poly(law, u, [&](unsigned j) {
           return set.contains(j) ? 0.0 : 1.0;
         }).second;
}

/// Marked part sum over k in the set of b_k u^k v_k.
inline double eval_marked(const BranchingLaw& law, const CrossingSet& set,
                          double u, std::span<const double> v) {
  detail::check_dimension(set, v);
  double acc = 0.0;
  for (std::size_t p = 0; p < set.size(); ++p) {
    acc += law.rate(set[p]) * std::pow(u, static_cast<double>(set[p])) * v[p];
  }
  return acc;
}

/// B̄(u) + B_set(u, v): the defining function of rho(v).
inline double eval_split(const BranchingLaw& law, const CrossingSet& set,
                         double u, std::span<const double> v) {
  detail::check_dimension(set, v);
  return detail::weighted_poly(law, u, [&](unsigned j) {
           auto p = set.position(j);
           return p ? v[*p] : 1.0;
         }).first;
}

/// u-derivative of eval_split.
inline double eval_split_derivative(const BranchingLaw& law, const CrossingSet& set,
                                    double u, std::span<const double> v) {
  detail::check_dimension(set, v);
  return detail::weighted_poly(law, u, [&](unsigned j) {
           auto p = set.position(j);
           return p ? v[*p] : 1.0;
         }).second;
}

}  // namespace crossing
