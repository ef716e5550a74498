#pragma once

// Embedded-jump-chain simulation of the crossing-augmented branching process
// and empirical crossing distributions among extinct paths.
//
// From any state i >= 1 the chain picks b-index r != 1 with probability
// b_r / (-b_1) and moves to i + r - 1; the weight w_i cancels in this
// normalisation. A jump whose b-index is in the crossing set increments
// that component's tally.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "crossing/branching_law.hpp"
#include "crossing/error.hpp"
#include "crossing/philox.hpp"
#include "crossing/root_solver.hpp"
#include "crossing/truncated_series.hpp"

namespace crossing {

/// Jump distribution of the embedded chain over b-indices r != 1.
struct JumpKernel {
  std::vector<unsigned> b_index;
  std::vector<double> probability;
  std::vector<double> cumulative;

  /// Position of the jump selected by a uniform draw in [0, 1).
  std::size_t sample(double u) const {
    for (std::size_t p = 0; p + 1 < cumulative.size(); ++p) {
      if (u < cumulative[p]) return p;
    }
    return cumulative.size() - 1;
  }

  /// Probability of moving by `delta` (= r - 1).
  double probability_of_step(long delta) const {
    for (std::size_t p = 0; p < b_index.size(); ++p) {
      if (static_cast<long>(b_index[p]) - 1 == delta) return probability[p];
    }
    return 0.0;
  }
};

inline JumpKernel jump_kernel(const BranchingLaw& law) {
  require_valid(law);
  JumpKernel k;
  const double total = law.total_rate();
  double acc = 0.0;
  for (std::size_t r = 0; r <= law.max_index(); ++r) {
    if (r == 1 || law.rate(r) == 0.0) continue;
    k.b_index.push_back(static_cast<unsigned>(r));
    k.probability.push_back(law.rate(r) / total);
    acc += law.rate(r) / total;
    k.cumulative.push_back(acc);
  }
  k.cumulative.back() = 1.0;
  return k;
}

struct Caps {
  std::uint64_t max_steps = 10'000;
  std::uint64_t max_state = 1'000'000;
};

/// One simulated trajectory. `extinct` is false when a cap stopped it.
struct PathOutcome {
  bool extinct = false;
  std::vector<std::uint64_t> counts;
  std::uint64_t steps = 0;
  std::uint64_t final_state = 0;
  std::int64_t displacement = 0;  // sum of realised jump sizes
  std::optional<double> elapsed_time;

  bool operator==(const PathOutcome&) const = default;
};

/// State bookkeeping for one path: applies jumps by b-index.
class Trajectory {
 public:
  Trajectory(const CrossingSet& set, std::uint64_t initial_state)
      : set_(&set), state_(initial_state) {
    out_.counts.assign(set.size(), 0);
  }

  void apply(unsigned b_index) {
    if (auto p = set_->position(b_index)) ++out_.counts[*p];
    apply_tallied(b_index, -1);
  }

  /// Fast path when the caller already knows the crossing position (or -1).
  void apply_tallied(unsigned b_index, int position) {
    if (position >= 0) ++out_.counts[static_cast<std::size_t>(position)];
    state_ = state_ + b_index - 1;
    out_.displacement += static_cast<std::int64_t>(b_index) - 1;
    ++out_.steps;
  }

  std::uint64_t state() const noexcept { return state_; }
  std::uint64_t steps() const noexcept { return out_.steps; }

  PathOutcome finish() {
    out_.final_state = state_;
    out_.extinct = state_ == 0;
    return out_;
  }

  PathOutcome& outcome() noexcept { return out_; }

 private:
  const CrossingSet* set_;
  std::uint64_t state_;
  PathOutcome out_;
};

namespace detail {

inline std::vector<int> kernel_positions(const JumpKernel& kernel, const CrossingSet& set) {
  std::vector<int> pos(kernel.b_index.size(), -1);
  for (std::size_t p = 0; p < pos.size(); ++p) {
    if (auto q = set.position(kernel.b_index[p])) pos[p] = static_cast<int>(*q);
  }
  return pos;
}

inline void require_path_args(std::uint64_t initial_state, const Caps& caps) {
  if (initial_state < 1) fail(ErrorKind::kValidation, "initial state must be >= 1");
  if (caps.max_steps < 1 || caps.max_state < 1) fail(ErrorKind::kValidation, "caps must be positive");
}

// Core loop shared by the timed and untimed simulators. `on_hold(state)` is
// called before each jump.
template <class OnHold>
PathOutcome run_path(const JumpKernel& kernel, const std::vector<int>& positions,
                     const CrossingSet& set, std::uint64_t initial_state,
                     Philox4x32& jumps, const Caps& caps, OnHold&& on_hold) {
  Trajectory path(set, initial_state);
  while (path.state() > 0 && path.steps() < caps.max_steps &&
         path.state() <= caps.max_state) {
    on_hold(path.state());
    const std::size_t p = kernel.sample(jumps.uniform());
    path.apply_tallied(kernel.b_index[p], positions[p]);
  }
  return path.finish();
}

}  // namespace detail

/// Simulate path `path_index` of the stream keyed by `seed`.
inline PathOutcome simulate_path(const JumpKernel& kernel, const CrossingSet& set,
                                 std::uint64_t initial_state, std::uint64_t seed,
                                 std::uint64_t path_index, const Caps& caps) {
  detail::require_path_args(initial_state, caps);
  Philox4x32 jumps(seed, path_index, 0);
  return detail::run_path(kernel, detail::kernel_positions(kernel, set), set, initial_state,
                          jumps, caps, [](std::uint64_t) {});
}

inline PathOutcome simulate_path(const BranchingLaw& law, const CrossingSet& set,
                                 std::uint64_t initial_state, std::uint64_t seed,
                                 const Caps& caps, std::uint64_t path_index = 0) {
  require_valid(law, set);
  return simulate_path(jump_kernel(law), set, initial_state, seed, path_index, caps);
}

/// Continuous-time version: also accumulates Exp(w_i * (-b_1)) holding
/// times. Holding times come from a separate substream, so the jump sequence
/// (and hence the counts) is identical to simulate_path with the same key.
inline PathOutcome simulate_timed_path(const BranchingLaw& law, const CrossingSet& set,
                                       std::uint64_t initial_state, std::uint64_t seed,
                                       const Caps& caps, std::uint64_t path_index = 0) {
  require_valid(law, set);
  detail::require_path_args(initial_state, caps);
  const JumpKernel kernel = jump_kernel(law);
  Philox4x32 jumps(seed, path_index, 0);
  Philox4x32 clock(seed, path_index, 1);
  double elapsed = 0.0;
  const double total = law.total_rate();
  const Weights& w = law.weights();
  PathOutcome out = detail::run_path(
      kernel, detail::kernel_positions(kernel, set), set, initial_state, jumps, caps,
      [&](std::uint64_t state) {
        std::exponential_distribution<double> hold(w.at(state) * total);
        elapsed += hold(clock);
      });
  out.elapsed_time = elapsed;
  return out;
}

/// Number of worker threads: CROSSING_LAB_THREADS if set, else the hardware
/// concurrency.
inline unsigned simulation_threads() {
  if (const char* env = std::getenv("CROSSING_LAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `fn(path_index, accumulator)` for every path, splitting the index
/// range across threads, then merges the accumulators in thread order.
template <class Acc, class Fn>
Acc parallel_paths(std::uint64_t n_paths, unsigned threads, Fn fn) {
  threads = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(threads, n_paths)));
  std::vector<Acc> partial(threads);
  auto work = [&](unsigned t) {
    const std::uint64_t begin = n_paths * t / threads;
    const std::uint64_t end = n_paths * (t + 1) / threads;
    for (std::uint64_t k = begin; k < end; ++k) fn(k, partial[t]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  Acc total = std::move(partial[0]);
  for (unsigned t = 1; t < threads; ++t) total.merge(partial[t]);
  return total;
}

/// Empirical crossing distribution among extinct paths.
struct EmpiricalDistribution {
  CrossingSet set;
  unsigned initial_state = 1;
  std::uint64_t n_paths = 0;
  std::uint64_t n_extinct = 0;
  std::uint64_t n_censored = 0;
  std::map<MultiIndex, std::uint64_t> tallies;

  void merge(const EmpiricalDistribution& o) {
    n_paths += o.n_paths;
    n_extinct += o.n_extinct;
    n_censored += o.n_censored;
    for (const auto& [k, c] : o.tallies) tallies[k] += c;
  }

  void record(const PathOutcome& path) {
    ++n_paths;
    if (!path.extinct) {
      ++n_censored;
      return;
    }
    ++n_extinct;
    std::vector<std::uint32_t> c(path.counts.begin(), path.counts.end());
    ++tallies[MultiIndex(std::move(c))];
  }

  double probability(const MultiIndex& l) const {
    if (n_extinct == 0) return 0.0;
    auto it = tallies.find(l);
    return it == tallies.end() ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(n_extinct);
  }

  double extinct_fraction() const {
    return n_paths == 0 ? 0.0 : static_cast<double>(n_extinct) / static_cast<double>(n_paths);
  }

  double censor_rate() const {
    return n_paths == 0 ? 0.0 : static_cast<double>(n_censored) / static_cast<double>(n_paths);
  }
};

inline EmpiricalDistribution estimate_distribution(const BranchingLaw& law,
                                                   const CrossingSet& set,
                                                   unsigned initial_state,
                                                   std::uint64_t n_paths, const Caps& caps,
                                                   std::uint64_t seed,
                                                   unsigned threads = simulation_threads()) {
  require_valid(law, set);
  detail::require_path_args(initial_state, caps);
  if (n_paths < 1) fail(ErrorKind::kValidation, "need at least one path");
  const JumpKernel kernel = jump_kernel(law);
  const std::vector<int> positions = detail::kernel_positions(kernel, set);

  EmpiricalDistribution out = parallel_paths<EmpiricalDistribution>(
      n_paths, threads, [&](std::uint64_t k, EmpiricalDistribution& acc) {
        Philox4x32 jumps(seed, k, 0);
        acc.record(detail::run_path(kernel, positions, set, initial_state, jumps, caps,
                                    [](std::uint64_t) {}));
      });
  out.set = set;
  out.initial_state = initial_state;
  if (out.n_extinct == 0) {
    fail(ErrorKind::kNumeric, "zero extinct paths: caps too small or law too supercritical");
  }
  return out;
}

/// Fraction of surviving (censored) paths whose Y_m reached at least `level`.
struct SurvivalReport {
  unsigned index = 0;
  std::uint64_t level = 0;
  std::uint64_t n_paths = 0;
  std::uint64_t n_surviving = 0;
  std::uint64_t n_at_level = 0;
  double rho = 1.0;

  double fraction() const {
    return n_surviving == 0 ? 0.0
                            : static_cast<double>(n_at_level) / static_cast<double>(n_surviving);
  }

  void merge(const SurvivalReport& o) {
    n_paths += o.n_paths;
    n_surviving += o.n_surviving;
    n_at_level += o.n_at_level;
  }
};

inline SurvivalReport survival_divergence_check(const BranchingLaw& law, unsigned m,
                                                std::uint64_t level, std::uint64_t n_paths,
                                                const Caps& caps, std::uint64_t seed,
                                                unsigned threads = simulation_threads()) {
  const CrossingSet set{m};
  require_valid(law, set);
  detail::require_path_args(1, caps);
  const double rho = min_root_B(law).value;
  if (rho >= 1.0 - 1e-12) {
    fail(ErrorKind::kNumeric, "no surviving paths: extinction is certain (rho = 1)");
  }
  const JumpKernel kernel = jump_kernel(law);
  const std::vector<int> positions = detail::kernel_positions(kernel, set);

  SurvivalReport rep = parallel_paths<SurvivalReport>(
      n_paths, threads, [&](std::uint64_t k, SurvivalReport& acc) {
        Philox4x32 jumps(seed, k, 0);
        const PathOutcome path =
            detail::run_path(kernel, positions, set, 1, jumps, caps, [](std::uint64_t) {});
        ++acc.n_paths;
        if (path.extinct) return;
        ++acc.n_surviving;
        if (path.counts[0] >= level) ++acc.n_at_level;
      });
  rep.index = m;
  rep.level = level;
  rep.rho = rho;
  if (rep.n_surviving == 0) fail(ErrorKind::kNumeric, "no surviving paths within the caps");
  return rep;
}

}  // namespace crossing
