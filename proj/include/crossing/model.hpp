#pragma once

// A branching law paired with its crossing set: presets and the JSON model
// file format
//
//   {"b": {"0": 1.0, "1": -3.0, "2": 2.0}, "weights": null, "crossing_set": [0, 2]}
//
// Keys of "b" are decimal integers; absent indices mean zero. "weights" is
// null (all ones), an array w_1..w_n, a positive number (constant), or the
// string "linear" (w_i = i).

#include <cstddef>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "crossing/branching_law.hpp"
#include "crossing/error.hpp"

namespace crossing {

struct Model {
  BranchingLaw law;
  CrossingSet set{0};
};

struct PresetParams {
  double mu = 1.0;
  double lambda = 1.0;
  std::vector<double> batch_rates;  // mxm1: lambda_1, lambda_2, ...
  double p = 1.0;
  double q = 1.0;
  CrossingSet set{0};
};

/// Named laws:
///   birth-death  b = {0: mu, 1: -(mu + lambda), 2: lambda}
///   pure-death   b = {0: mu, 1: -mu}
///   cubic        B(u) = 2q - 3pu + u^3, requires 3p = 2q + 1
///   mxm1         bulk-arrival queue: b_0 = mu (service), b_{j+1} = lambda_j
///                (batch of j arrivals)
inline Model preset(const std::string& name, const PresetParams& params) {
  Model m;
  m.set = params.set;
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0)) fail(ErrorKind::kValidation, std::string(what) + " must be positive");
  };
  if (name == "birth-death") {
    positive(params.mu, "mu");
    positive(params.lambda, "lambda");
    m.law = BranchingLaw(std::map<unsigned, double>{
        {0, params.mu}, {1, -(params.mu + params.lambda)}, {2, params.lambda}});
  } else if (name == "pure-death") {
    positive(params.mu, "mu");
    m.law = BranchingLaw(std::map<unsigned, double>{{0, params.mu}, {1, -params.mu}});
  } else if (name == "cubic") {
    positive(params.p, "p");
    positive(params.q, "q");
    if (std::abs(3.0 * params.p - 2.0 * params.q - 1.0) > kConservationTolerance * 3.0 * params.p) {
      fail(ErrorKind::kValidation, "cubic preset requires 3p = 2q + 1");
    }
    m.law = BranchingLaw(std::map<unsigned, double>{
        {0, 2.0 * params.q}, {1, -3.0 * params.p}, {3, 1.0}});
  } else if (name == "mxm1") {
    positive(params.mu, "mu");
    std::map<unsigned, double> b{{0, params.mu}};
    double total = params.mu;
    for (std::size_t j = 0; j < params.batch_rates.size(); ++j) {
      const double rate = params.batch_rates[j];
      if (!(rate >= 0.0)) fail(ErrorKind::kValidation, "batch rates must be nonnegative");
      if (rate > 0.0) b[static_cast<unsigned>(j + 2)] = rate;
      total += rate;
    }
    b[1] = -total;
    m.law = BranchingLaw(b);
  } else {
    fail(ErrorKind::kValidation, "unknown preset '" + name + "'");
  }
  require_valid(m.law, m.set);
  return m;
}

inline nlohmann::json weights_to_json(const Weights& w) {
  switch (w.rule()) {
    case Weights::Rule::kConstant:
      return w.is_unit() ? nlohmann::json(nullptr) : nlohmann::json(w.constant_value());
    case Weights::Rule::kLinear:
      return "linear";
    case Weights::Rule::kTable:
      return std::vector<double>(w.table_values().begin(), w.table_values().end());
  }
  return nullptr;
}

inline Weights weights_from_json(const nlohmann::json& j) {
  if (j.is_null()) return Weights::unit();
  if (j.is_number()) return Weights::constant(j.get<double>());
  if (j.is_string() && j.get<std::string>() == "linear") return Weights::linear();
  if (j.is_array()) return Weights::table(j.get<std::vector<double>>());
  fail(ErrorKind::kValidation, "weights must be null, a number, \"linear\", or an array");
}

inline nlohmann::json model_to_json(const Model& m) {
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [j, rate] : m.law.sparse()) b[std::to_string(j)] = rate;
  nlohmann::json out;
  out["b"] = b;
  out["weights"] = weights_to_json(m.law.weights());
  out["crossing_set"] = std::vector<unsigned>(m.set.indices().begin(), m.set.indices().end());
  return out;
}

/// Parses a model document. Structural problems throw; semantic validity is
/// left to validate() so that the caller can report every diagnostic.
inline Model model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("b") || !doc["b"].is_object()) {
    fail(ErrorKind::kValidation, "model must be an object with a \"b\" object");
  }
  std::map<unsigned, double> b;
  for (const auto& [key, value] : doc["b"].items()) {
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorKind::kValidation, "b key '" + key + "' is not a nonnegative decimal integer");
    }
    if (!value.is_number()) fail(ErrorKind::kValidation, "b_" + key + " is not a number");
    b[static_cast<unsigned>(std::stoul(key))] = value.get<double>();
  }
  Model m;
  m.law = BranchingLaw(b, weights_from_json(doc.value("weights", nlohmann::json(nullptr))));
  if (doc.contains("crossing_set")) {
    const auto& cs = doc["crossing_set"];
    if (!cs.is_array()) fail(ErrorKind::kValidation, "crossing_set must be an array");
    std::vector<unsigned> idx;
    for (const auto& x : cs) {
      if (!x.is_number_unsigned()) fail(ErrorKind::kValidation, "crossing_set entries must be nonnegative integers");
      idx.push_back(x.get<unsigned>());
    }
    m.set = CrossingSet(std::move(idx));
  }
  return m;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open model file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

inline void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kValidation, "cannot write model file '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
}

}  // namespace crossing
