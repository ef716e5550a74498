#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crossing/cli.hpp"

namespace crossing {
namespace {

using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "crossing-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double prob_at(const json& doc, const std::vector<unsigned>& index) {
  for (const auto& cell : doc["probs"]) {
    if (cell["index"].get<std::vector<unsigned>>() == index) return cell["value"].get<double>();
  }
  return 0.0;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

TEST(Cli, DistJointBirthDeath) {
  const Result r = run_cli({"dist", "--preset", "birth-death", "--mu", "1", "--lambda", "1",
                            "--set", "0,2", "--K", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(prob_at(doc, {1, 0}), 0.5, 1e-15);
  EXPECT_NEAR(prob_at(doc, {2, 1}), 0.125, 1e-15);
  EXPECT_EQ(doc["K"], 40);
  EXPECT_EQ(doc["initial_state"], 1);
}

TEST(Cli, MomentsSubcritical) {
  const Result r = run_cli({"moments", "--preset", "birth-death", "--mu", "2", "--lambda", "1",
                            "--set", "0", "--K", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["mean"].get<double>(), 2.0, 1e-6);
  EXPECT_NEAR(doc["variance"].get<double>(), 6.0, 1e-4);
  EXPECT_TRUE(doc["converged"].get<bool>());
}

TEST(Cli, CompareExitsZeroOnMatchingLaw) {
  const Result r = run_cli({"compare", "--preset", "birth-death", "--mu", "1", "--lambda", "2",
                            "--set", "0", "--paths", "100000", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(json::parse(r.out)["passed"].get<bool>());
}

TEST(Cli, CompareGateFailureExitsThree) {
  const Result r = run_cli({"compare", "--preset", "birth-death", "--mu", "1", "--lambda", "2",
                            "--set", "0", "--paths", "20000", "--gate", "0.01"});
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, ValidationErrorsExitOne) {
  EXPECT_EQ(run_cli({"dist", "--preset", "birth-death", "--set", "1"}).code, 1);
  EXPECT_EQ(run_cli({"dist", "--preset", "nope"}).code, 1);
  EXPECT_EQ(run_cli({"dist"}).code, 1);
  EXPECT_EQ(run_cli({"dist", "--preset", "birth-death", "--K", "0"}).code, 1);
  EXPECT_EQ(run_cli({"dist", "--preset", "birth-death", "-i", "0"}).code, 1);
  EXPECT_EQ(run_cli({"dist", "--preset", "birth-death", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"roots", "--preset", "cubic", "--p", "1", "--q", "2"}).code, 1);
}

TEST(Cli, NumericDegeneracyExitsTwo) {
  EXPECT_EQ(run_cli({"survival-check", "--preset", "birth-death", "--mu", "2", "--lambda", "1",
                     "--m", "2", "--paths", "100"})
                .code,
            2);
  EXPECT_EQ(run_cli({"simulate", "--preset", "pure-death", "-i", "3", "--max-steps", "1",
                     "--paths", "10"})
                .code,
            2);
}

TEST(Cli, ValidateReportsEveryDiagnostic) {
  const auto path = temp_file("crossing_cli_invalid.json");
  std::ofstream(path) << R"({"b": {"0": 1, "1": -2, "2": 2}, "crossing_set": [1]})";
  const Result r = run_cli({"validate", "--model", path.string()});
  EXPECT_EQ(r.code, 1);
  const json doc = json::parse(r.out);
  EXPECT_FALSE(doc["valid"].get<bool>());
  EXPECT_GE(doc["diagnostics"].size(), 2u);
  std::filesystem::remove(path);
}

TEST(Cli, OutputIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> args{"simulate", "--preset", "birth-death", "--mu", "1",
                                      "--lambda", "1", "--set", "0,2", "--paths", "5000",
                                      "--max-steps", "1000", "--seed", "3"};
  const Result a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const std::vector<std::string> d{"dist", "--preset", "cubic", "--format", "csv", "--K", "30"};
  EXPECT_EQ(run_cli(d).out, run_cli(d).out);
}

TEST(Cli, SavedModelReproducesOutput) {
  const auto path = temp_file("crossing_cli_saved.json");
  const Result first = run_cli({"dist", "--preset", "mxm1", "--mu", "1", "--lambda", "0.5,0.25",
                                "--K", "60", "--save-model", path.string()});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(run_cli({"validate", "--model", path.string()}).code, 0);
  const Result second = run_cli({"dist", "--model", path.string(), "--K", "60"});
  EXPECT_EQ(first.out, second.out);
  std::filesystem::remove(path);
}

TEST(Cli, DimensionCap) {
  const auto path = temp_file("crossing_cli_wide.json");
  std::ofstream(path) << R"({"b": {"0": 1, "1": -5, "2": 1, "3": 1, "4": 1, "5": 1}, "crossing_set": [0, 2, 3, 4, 5]})";
  EXPECT_EQ(run_cli({"validate", "--model", path.string()}).code, 0);
  EXPECT_EQ(run_cli({"dist", "--model", path.string(), "--K", "5"}).code, 1);
  EXPECT_EQ(run_cli({"dist", "--model", path.string(), "--set", "0,2,3,4", "--K", "5"}).code, 0);
  std::filesystem::remove(path);
}

TEST(Cli, RootsAndSurvival) {
  const Result roots = run_cli({"roots", "--preset", "birth-death", "--mu", "1", "--lambda", "2"});
  ASSERT_EQ(roots.code, 0);
  EXPECT_NEAR(json::parse(roots.out)["rho"]["value"].get<double>(), 0.5, 1e-12);
  const Result surv = run_cli({"survival-check", "--preset", "birth-death", "--mu", "1",
                               "--lambda", "2", "--set", "2", "--paths", "2000", "--max-steps",
                               "2000", "--level", "0"});
  ASSERT_EQ(surv.code, 0) << surv.err;
  EXPECT_DOUBLE_EQ(json::parse(surv.out)["fraction"].get<double>(), 1.0);
}

TEST(Cli, WritesOutputFile) {
  const auto path = temp_file("crossing_cli_out.csv");
  ASSERT_EQ(run_cli({"dist", "--preset", "pure-death", "-i", "2", "--K", "5", "--format", "csv",
                     "-o", path.string()})
                .code,
            0);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "y_0,probability");
  EXPECT_EQ(row, "2,1");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace crossing
