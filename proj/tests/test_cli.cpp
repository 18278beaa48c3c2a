// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace ncg::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ncgeom_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string record_field(const std::string& text, const std::string& name, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find("name=" + name + " ") == std::string::npos) continue;
    const auto at = line.find(" " + key + "=");
    if (at == std::string::npos) return {};
    const auto start = at + key.size() + 2;
    return line.substr(start, line.find(' ', start) - start);
  }
  return {};
}

TEST(Cli, MissingCommandIsConfigError) {
  EXPECT_EQ(invoke({}).code, kConfigError);
  EXPECT_EQ(invoke({"--command", "bogus"}).code, kConfigError);
  EXPECT_EQ(invoke({"--command", "palatini-check", "--format", "xml"}).code, kConfigError);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kPass);
  EXPECT_NE(r.out.find("--command"), std::string::npos);
}

TEST(Cli, BadMetricFamilyIsConfigError) {
  const auto r = invoke({"--command", "palatini-check", "--metric", "fourier-perturbed"});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("not available"), std::string::npos);
  EXPECT_EQ(invoke({"--command", "palatini-check", "--metric", "identity:abc"}).code, kConfigError);
  EXPECT_EQ(invoke({"--command", "matrix-action", "--n", "7"}).code, kConfigError);
}

TEST(Cli, MetricFileOnlyForTorusAction) {
  EXPECT_EQ(invoke({"--command", "palatini-check", "--metric-file", "x.txt"}).code, kConfigError);
  EXPECT_EQ(invoke({"--command", "torus-action", "--metric-file", "/nonexistent/x.txt"}).code, kConfigError);
}

TEST(Cli, PalatiniCheckAtG0) {
  const auto r = invoke({"--command", "palatini-check", "--metric", "paper-g0", "--format", "records"});
  EXPECT_EQ(r.code, kPass);
  EXPECT_NEAR(std::stod(record_field(r.out, "action", "computed")), -1.0, 1e-12);
  EXPECT_GT(std::stod(record_field(r.out, "residual-norm", "computed")), 1e-2);
  EXPECT_NE(r.out.find("record=env version="), std::string::npos);
  EXPECT_NE(r.out.find("record=summary passed="), std::string::npos);
}

TEST(Cli, PalatiniCheckCounterexampleAsymmetry) {
  const auto r = invoke({"--command", "palatini-check", "--metric", "paper-counterexample-8x8", "--format", "records"});
  EXPECT_EQ(r.code, kPass);
  EXPECT_GT(std::stod(record_field(r.out, "inverse-asymmetry", "computed")), 1e-6);
  EXPECT_LT(std::abs(std::stod(record_field(r.out, "action", "computed"))), 1e-10);
}

TEST(Cli, PalatiniSolveConverges) {
  const auto r = invoke({"--command", "palatini-solve", "--metric", "random-spd", "--seed", "3", "--format", "records"});
  EXPECT_EQ(r.code, kPass) << r.out;
  EXPECT_EQ(record_field(r.out, "converged", "status"), "pass");
}

TEST(Cli, TinyToleranceFailsVerification) {
  const auto r = invoke({"--command", "palatini-solve", "--metric", "random-spd", "--seed", "3", "--tol", "1e-20",
                         "--format", "records"});
  EXPECT_EQ(r.code, kVerificationFailed);
  EXPECT_EQ(record_field(r.out, "converged", "status"), "fail");
}

TEST(Cli, TorusActionSplit) {
  const auto r = invoke({"--command", "torus-action", "--m", "2", "--grid", "16", "--metric", "random-spd",
                         "--format", "records"});
  EXPECT_EQ(r.code, kPass);
  EXPECT_EQ(record_field(r.out, "total-vs-split", "status"), "pass");
  EXPECT_EQ(std::stod(record_field(r.out, "split-classical", "computed")), 0.0);
}

TEST(Cli, TorusActionFourierHasNoSplit) {
  const auto r = invoke({"--command", "torus-action", "--grid", "16", "--metric", "fourier-perturbed:0.1,2"});
  EXPECT_EQ(r.code, kPass);
  EXPECT_EQ(r.out.find("total-vs-split"), std::string::npos);
}

TEST(Cli, TorusActionFromFile) {
  const auto model = torus::build_model(1, 2, 8, torus::constant_field(Matrix::Identity(1, 1)),
                                        torus::constant_field(2.0 * Matrix::Identity(3, 3)));
  const auto path = std::filesystem::temp_directory_path() / "ncgeom_cli_metric.txt";
  {
    std::ofstream f(path);
    torus::write_tabulated(f, model);
  }
  const auto r = invoke({"--command", "torus-action", "--metric-file", path.string(), "--format", "records"});
  std::filesystem::remove(path);
  EXPECT_EQ(r.code, kPass);
  EXPECT_NEAR(std::stod(record_field(r.out, "total", "computed")), torus::total_action(model),
              1e-9 * std::abs(torus::total_action(model)));
}

TEST(Cli, MatrixActionReportsFactorTwo) {
  const auto r = invoke({"--command", "matrix-action", "--n", "2", "--format", "records"});
  EXPECT_EQ(r.code, kVerificationFailed);
  EXPECT_NEAR(std::stod(record_field(r.out, "pipeline/closed-form", "computed")), 0.5, 1e-10);
}

TEST(Cli, OutFileAndTable) {
  const auto path = std::filesystem::temp_directory_path() / "ncgeom_cli_report.txt";
  const auto r = invoke({"--command", "palatini-check", "--metric", "identity", "--out", path.string()});
  EXPECT_EQ(r.code, kPass);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::filesystem::remove(path);
  EXPECT_NE(ss.str().find("summary: "), std::string::npos);
  EXPECT_NE(ss.str().find("PASS"), std::string::npos);
}

TEST(ParseMetric, Parameters) {
  const auto s = parse_metric("fourier-perturbed:0.25,3");
  EXPECT_EQ(s.family, "fourier-perturbed");
  ASSERT_EQ(s.params.size(), 2u);
  EXPECT_EQ(s.params[0], 0.25);
  EXPECT_EQ(s.params[1], 3.0);
  EXPECT_TRUE(parse_metric("identity").params.empty());
  EXPECT_THROW(parse_metric("x:1,,2"), Error);
}

}  // namespace
}  // namespace ncg::cli
