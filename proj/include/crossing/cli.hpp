#pragma once

// Command-line front end: configuration, dispatch, and output.
//
// Exit codes: 0 success, 1 invalid input, 2 numeric degeneracy,
// 3 statistical gate failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crossing/comparison.hpp"
#include "crossing/crossing_distribution.hpp"
#include "crossing/error.hpp"
#include "crossing/model.hpp"
#include "crossing/report_io.hpp"
#include "crossing/root_solver.hpp"
#include "crossing/simulation.hpp"

namespace crossing::cli {

inline constexpr std::size_t kMaxDimensions = 4;
inline constexpr std::size_t kDefaultUnivariateOrder = 100;
inline constexpr std::size_t kDefaultMultivariateOrder = 40;

struct RunConfig {
  std::string model_path;
  std::string preset_name;
  double mu = 1.0;
  std::vector<double> lambda{1.0};
  double p = 1.0;
  double q = 1.0;
  std::vector<unsigned> set{0};
  bool set_given = false;
  unsigned initial_state = 1;
  std::optional<std::size_t> order;
  std::uint64_t paths = 100'000;
  Caps caps;
  std::uint64_t seed = 1;
  std::optional<unsigned> index;  // moments component / survival m
  std::uint64_t level = 50;
  double min_fraction = 0.99;
  double threshold = kCellThreshold;
  double gate = kZGate;
  std::string format = "json";
  std::string output;
  std::string save_model;
};

inline Model resolve_model(const RunConfig& cfg) {
  if (cfg.model_path.empty() == cfg.preset_name.empty()) {
    fail(ErrorKind::kValidation, "exactly one of --model or --preset is required");
  }
  if (cfg.initial_state < 1) fail(ErrorKind::kValidation, "initial state must be >= 1");
  if (cfg.order && *cfg.order < 1) fail(ErrorKind::kValidation, "K must be >= 1");
  if (!cfg.model_path.empty()) {
    Model m = load_model(cfg.model_path);
    if (cfg.set_given) m.set = CrossingSet(cfg.set);
    return m;
  }
  PresetParams params;
  params.mu = cfg.mu;
  params.lambda = cfg.lambda.empty() ? 0.0 : cfg.lambda.front();
  params.batch_rates = cfg.lambda;
  params.p = cfg.p;
  params.q = cfg.q;
  params.set = CrossingSet(cfg.set);
  return preset(cfg.preset_name, params);
}

namespace detail {

inline std::size_t order_for(const RunConfig& cfg, const CrossingSet& set) {
  if (cfg.order) return *cfg.order;
  return set.size() == 1 ? kDefaultUnivariateOrder : kDefaultMultivariateOrder;
}

inline void require_dimension_cap(const CrossingSet& set) {
  if (set.size() > kMaxDimensions) {
    fail(ErrorKind::kValidation, "crossing set has more than " +
                                     std::to_string(kMaxDimensions) + " indices");
  }
}

struct Emitter {
  const RunConfig& cfg;
  std::ostream& out;

  template <class Write>
  void emit(Write&& write) {
    if (cfg.output.empty()) {
      write(out);
      return;
    }
    std::ofstream file(cfg.output);
    if (!file) fail(ErrorKind::kValidation, "cannot write '" + cfg.output + "'");
    write(file);
  }

  void json_or_csv(const nlohmann::json& doc, auto&& csv) {
    emit([&](std::ostream& os) {
      if (cfg.format == "csv") {
        csv(os);
      } else {
        os << doc.dump(2) << '\n';
      }
    });
  }
};

}  // namespace detail

/// Runs one subcommand. Errors are thrown as crossing::Error.
inline int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out) {
  detail::Emitter emitter{cfg, out};
  if (cfg.format != "json" && cfg.format != "csv") {
    fail(ErrorKind::kValidation, "format must be json or csv");
  }

  if (subcommand == "validate") {
    // Report every diagnostic rather than stopping at the first.
    Model m;
    if (!cfg.model_path.empty() && cfg.preset_name.empty()) {
      m = load_model(cfg.model_path);
      if (cfg.set_given) m.set = CrossingSet(cfg.set);
    } else {
      m = resolve_model(cfg);
    }
    const ValidationReport report = validate(m.law, m.set);
    nlohmann::json doc = to_json(report);
    doc["model"] = model_to_json(m);
    emitter.emit([&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    if (report.ok() && !cfg.save_model.empty()) save_model(m, cfg.save_model);
    return report.ok() ? 0 : static_cast<int>(ErrorKind::kValidation);
  }

  const Model m = resolve_model(cfg);
  require_valid(m.law, m.set);
  if (!cfg.save_model.empty()) save_model(m, cfg.save_model);

  if (subcommand == "roots") {
    const RootResult rho = min_root_B(m.law);
    const RootResult rho0 = min_root_at_zero(m.law, m.set);
    const nlohmann::json doc = {{"rho", to_json(rho)},
                                {"rho0", to_json(rho0)},
                                {"crossing_set", set_to_json(m.set)}};
    emitter.emit([&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    return 0;
  }

  if (subcommand == "dist") {
    detail::require_dimension_cap(m.set);
    const auto dist = conditional_distribution(m.law, m.set, cfg.initial_state,
                                               detail::order_for(cfg, m.set));
    emitter.json_or_csv(to_json(dist), [&](std::ostream& os) { write_csv(os, dist); });
    return 0;
  }

  if (subcommand == "moments") {
    const unsigned k = cfg.index.value_or(m.set[0]);
    const auto rep = moments(m.law, m.set, k, cfg.order.value_or(kDefaultUnivariateOrder));
    emitter.json_or_csv(to_json(rep), [&](std::ostream& os) { write_csv(os, rep); });
    return 0;
  }

  if (subcommand == "simulate") {
    const auto emp = estimate_distribution(m.law, m.set, cfg.initial_state, cfg.paths, cfg.caps,
                                           cfg.seed);
    emitter.json_or_csv(to_json(emp), [&](std::ostream& os) { write_csv(os, emp); });
    return 0;
  }

  if (subcommand == "compare") {
    detail::require_dimension_cap(m.set);
    const auto exact = conditional_distribution(m.law, m.set, cfg.initial_state,
                                                detail::order_for(cfg, m.set));
    const auto emp = estimate_distribution(m.law, m.set, cfg.initial_state, cfg.paths, cfg.caps,
                                           cfg.seed);
    const auto rep = compare(exact, emp, cfg.threshold, cfg.gate);
    nlohmann::json doc = to_json(rep);
    doc["censor_rate"] = emp.censor_rate();
    emitter.json_or_csv(doc, [&](std::ostream& os) { write_csv(os, rep, m.set); });
    return rep.passed ? 0 : static_cast<int>(ErrorKind::kGate);
  }

  if (subcommand == "survival-check") {
    unsigned index = 0;
    if (cfg.index) {
      index = *cfg.index;
    } else if (m.set.size() == 1) {
      index = m.set[0];
    } else {
      fail(ErrorKind::kValidation, "survival-check needs --m");
    }
    const auto rep = survival_divergence_check(m.law, index, cfg.level, cfg.paths, cfg.caps,
                                               cfg.seed);
    nlohmann::json doc = to_json(rep);
    doc["min_fraction"] = cfg.min_fraction;
    doc["passed"] = rep.fraction() >= cfg.min_fraction;
    emitter.emit([&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    return rep.fraction() >= cfg.min_fraction ? 0 : static_cast<int>(ErrorKind::kGate);
  }

  fail(ErrorKind::kValidation, "unknown subcommand '" + subcommand + "'");
}

/// Parses argv and runs the selected subcommand; returns the exit code.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"Crossing-number distributions of weighted Markov branching processes"};
  app.require_subcommand(1);
  RunConfig cfg;

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"validate", "Check a model and report every violated condition"},
      {"roots", "Print rho and rho_0"},
      {"dist", "Exact conditional crossing distribution"},
      {"moments", "Mean and variance of one crossing count"},
      {"simulate", "Empirical crossing distribution by simulation"},
      {"compare", "Exact versus simulated distribution, z-score gate"},
      {"survival-check", "Crossing counts on surviving paths"},
  };

  std::vector<unsigned> set_arg;
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--model", cfg.model_path, "Model file (JSON)");
    sub->add_option("--preset", cfg.preset_name, "birth-death | pure-death | cubic | mxm1");
    sub->add_option("--mu", cfg.mu, "Death / service rate");
    sub->add_option("--lambda", cfg.lambda, "Birth rate, or batch rates for mxm1")
        ->delimiter(',');
    sub->add_option("--p", cfg.p, "Cubic preset p");
    sub->add_option("--q", cfg.q, "Cubic preset q");
    sub->add_option("--set", set_arg, "Crossing set, e.g. 0,2")->delimiter(',');
    sub->add_option("-i,--initial", cfg.initial_state, "Initial population");
    sub->add_option("--format", cfg.format, "json | csv");
    sub->add_option("-o,--output", cfg.output, "Output file (default stdout)");
    sub->add_option("--save-model", cfg.save_model, "Write the resolved model file");
    const std::string name = s.name;
    if (name == "dist" || name == "moments" || name == "compare") {
      sub->add_option("--K", cfg.order, "Truncation order (total degree)");
    }
    if (name == "moments") sub->add_option("--index", cfg.index, "Crossing index k");
    if (name == "simulate" || name == "compare" || name == "survival-check") {
      sub->add_option("--paths", cfg.paths, "Number of simulated paths");
      sub->add_option("--max-steps", cfg.caps.max_steps, "Step cap per path");
      sub->add_option("--max-state", cfg.caps.max_state, "Population cap per path");
      sub->add_option("--seed", cfg.seed, "Stream seed");
    }
    if (name == "compare") {
      sub->add_option("--threshold", cfg.threshold, "Minimum exact mass of compared cells");
      sub->add_option("--gate", cfg.gate, "Maximum allowed |z|");
    }
    if (name == "survival-check") {
      sub->add_option("--m", cfg.index, "Crossing index m");
      sub->add_option("--level", cfg.level, "Threshold L on Y_m");
      sub->add_option("--min-fraction", cfg.min_fraction, "Required fraction");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ErrorKind::kValidation);
  }
  if (!set_arg.empty()) {
    cfg.set = set_arg;
    cfg.set_given = true;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    return run(subcommand, cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInternal ? static_cast<int>(ErrorKind::kNumeric)
                                            : e.exit_code();
  }
}

}  // namespace crossing::cli
