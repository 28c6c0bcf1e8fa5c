#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "demeasure/cli.hpp"
#include "demeasure/ir.hpp"
#include "demeasure/ir_json.hpp"
#include "demeasure/passes.hpp"

using namespace demeasure;
namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("demeasure_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
    ::unsetenv("DEMEASURE_SEED");
  }
  void TearDown() override { fs::remove_all(dir); }

  int run(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return cli::run(args, out, err);
  }
  static std::string fixture(const std::string& name) { return std::string(DEMEASURE_FIXTURES) + "/" + name; }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir;
  std::ostringstream out;
  std::ostringstream err;
};

TEST_F(CliTest, CompileResetFixture) {
  EXPECT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir"), "--passes", "dilate,feedback"}), 0)
      << err.str();
  const auto art = passes::parse_artifact(slurp(path("u.ir")));
  for (const auto& s : art.protocol.steps) EXPECT_TRUE(std::holds_alternative<ir::GateStep>(s));
  EXPECT_EQ(art.original_qubits, 1U);
}

TEST_F(CliTest, MissingInputNamesPath) {
  EXPECT_EQ(run({"compile", "--in", path("absent.ir"), "--out", path("u.ir")}), 1);
  EXPECT_NE(err.str().find("absent.ir"), std::string::npos);
}

TEST_F(CliTest, InvalidInputIsExitOne) {
  std::ofstream(path("bad.ir")) << R"({"ir_version": 1, "registers": {"qubits": 1, "classical": 1},
    "steps": [{"kind": "measure", "op_table": "nope", "targets": [0], "result": 0}]})";
  EXPECT_EQ(run({"compile", "--in", path("bad.ir"), "--out", path("u.ir")}), 1);
  std::ofstream(path("syntax.ir")) << "{ not json";
  EXPECT_EQ(run({"compile", "--in", path("syntax.ir"), "--out", path("u.ir")}), 1);
  EXPECT_NE(err.str().find("line 1"), std::string::npos);
}

TEST_F(CliTest, ZeroCopiesIsPassError) {
  EXPECT_EQ(run({"compile", "--in", fixture("bell_rus.ir"), "--out", path("u.ir"), "--passes", "rus-static:N=0"}), 2);
  EXPECT_NE(err.str().find("N must be ≥ 1"), std::string::npos);
}

TEST_F(CliTest, MissingPassIsPassError) {
  EXPECT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir"), "--passes", "dilate"}), 2);
}

TEST_F(CliTest, VerifyResetPair) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir")}), 0);
  EXPECT_EQ(run({"verify", "--original", fixture("reset.ir"), "--compiled", path("u.ir")}), 0) << err.str();
  EXPECT_EQ(out.str().rfind("PASS", 0), 0U);
}

TEST_F(CliTest, VerifyRusPair) {
  ASSERT_EQ(run({"compile", "--in", fixture("bell_rus.ir"), "--out", path("u.ir"), "--rus-copies", "3"}), 0);
  EXPECT_EQ(run({"verify", "--original", fixture("bell_rus.ir"), "--compiled", path("u.ir")}), 0) << out.str();
}

TEST_F(CliTest, DeletedGateFailsVerification) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir")}), 0);
  auto art = passes::parse_artifact(slurp(path("u.ir")));
  ASSERT_FALSE(art.protocol.steps.empty());
  art.protocol.steps.pop_back();
  std::ofstream(path("broken.ir")) << passes::serialize_artifact(art);
  EXPECT_EQ(run({"verify", "--original", fixture("reset.ir"), "--compiled", path("broken.ir")}), 3);
  EXPECT_EQ(out.str().rfind("FAIL", 0), 0U);
}

TEST_F(CliTest, ZeroToleranceFailsNontrivialPair) {
  ASSERT_EQ(run({"compile", "--in", fixture("bell_rus.ir"), "--out", path("u.ir"), "--rus-copies", "2"}), 0);
  EXPECT_EQ(run({"verify", "--original", fixture("bell_rus.ir"), "--compiled", path("u.ir"), "--tol", "0"}), 3);
}

TEST_F(CliTest, VerifyOverCapIsExitFour) {
  ASSERT_EQ(run({"compile", "--in", fixture("bell_rus.ir"), "--out", path("u.ir"), "--rus-copies", "3"}), 0);
  EXPECT_EQ(run({"verify", "--original", fixture("bell_rus.ir"), "--compiled", path("u.ir"), "--max-qubits", "2"}), 4);
}

TEST_F(CliTest, CompileOverCapIsExitFour) {
  EXPECT_EQ(run({"compile", "--in", fixture("bell_rus.ir"), "--out", path("u.ir"), "--rus-copies", "4",
                 "--max-qubits", "4"}),
            4);
}

TEST_F(CliTest, NoiselessMcIsExactlyZero) {
  EXPECT_EQ(run({"mc", "logical", "--p", "0", "--trials", "5000", "--seed", "1", "--report", path("r.json")}), 0);
  const auto j = ir::parse_json_text(slurp(path("r.json")));
  EXPECT_EQ(j["estimates"][0]["mean"].get<double>(), 0.0);
}

TEST_F(CliTest, BadEstimatorIsExitOne) {
  EXPECT_EQ(run({"mc", "frobnicate", "--p", "0.1", "--seed", "1"}), 1);
}

TEST_F(CliTest, ThresholdRejectsModelFlags) {
  EXPECT_EQ(run({"mc", "threshold", "--pattern", "single", "--seed", "1"}), 1);
  EXPECT_EQ(run({"mc", "threshold", "--p2", "0.1", "--seed", "1"}), 1);
}

TEST_F(CliTest, OutOfRangeProbabilityIsExitOne) {
  EXPECT_EQ(run({"mc", "logical", "--p", "1.5", "--seed", "1"}), 1);
}

TEST_F(CliTest, ReportsAreByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::string> base{"mc", "steady", "--p", "0.02", "--n", "2", "--trials", "20000", "--seed", "7"};
  auto with = [&](std::vector<std::string> extra) {
    auto v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  ASSERT_EQ(run(with({"--threads", "1", "--report", path("a.json")})), 0);
  const std::string first_out = out.str();
  ASSERT_EQ(run(with({"--threads", "4", "--report", path("b.json")})), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(first_out, out.str());
}

TEST_F(CliTest, MissingSeedIsPickedAndPrinted) {
  EXPECT_EQ(run({"mc", "logical", "--p", "0.01", "--trials", "1000"}), 0);
  EXPECT_NE(err.str().find("using seed"), std::string::npos);
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  ::setenv("DEMEASURE_SEED", "1234", 1);
  EXPECT_EQ(run({"mc", "logical", "--p", "0.05", "--trials", "1000", "--report", path("a.json")}), 0);
  EXPECT_EQ(err.str().find("using seed"), std::string::npos);
  ::unsetenv("DEMEASURE_SEED");
  EXPECT_EQ(run({"mc", "logical", "--p", "0.05", "--trials", "1000", "--seed", "1234", "--report", path("b.json")}), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(CliTest, CompileReportListsEveryPassOnce) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir"), "--report", path("r.json")}), 0);
  const auto j = ir::parse_json_text(slurp(path("r.json")));
  std::vector<std::string> names;
  for (const auto& p : j["passes"]) names.push_back(p["name"].get<std::string>());
  EXPECT_EQ(names, (std::vector<std::string>{"dilate", "feedback", "control-lift", "reset", "rus-static"}));
  EXPECT_TRUE(j.contains("tool_version"));
  EXPECT_EQ(j["inputs"].size(), 1U);
  EXPECT_EQ(run({"report", path("r.json")}), 0);
  EXPECT_NE(out.str().find("pass: dilate"), std::string::npos);
}

TEST_F(CliTest, CompileReportIsDeterministicWithoutTiming) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u1.ir"), "--seed", "5", "--report", path("a.json")}), 0);
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u2.ir"), "--seed", "5", "--report", path("b.json")}), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("u1.ir")), slurp(path("u2.ir")));
}

TEST_F(CliTest, TimingFlagAddsMilliseconds) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir"), "--timing", "--report", path("r.json")}),
            0);
  const auto j = ir::parse_json_text(slurp(path("r.json")));
  EXPECT_TRUE(j["passes"][0].contains("milliseconds"));
}

TEST_F(CliTest, VerifyReportCarriesVerdict) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir")}), 0);
  ASSERT_EQ(run({"verify", "--original", fixture("reset.ir"), "--compiled", path("u.ir"), "--report", path("r.json")}),
            0);
  const auto j = ir::parse_json_text(slurp(path("r.json")));
  ASSERT_EQ(j["verdicts"].size(), 1U);
  EXPECT_TRUE(j["verdicts"][0]["pass"].get<bool>());
  EXPECT_LT(j["verdicts"][0]["distance"].get<double>(), 1e-10);
}

TEST_F(CliTest, ReportSummarizesArtifact) {
  ASSERT_EQ(run({"compile", "--in", fixture("reset.ir"), "--out", path("u.ir")}), 0);
  EXPECT_EQ(run({"report", path("u.ir")}), 0);
  EXPECT_NE(out.str().find("valid"), std::string::npos);
  EXPECT_NE(out.str().find("ancillas: 1"), std::string::npos);
}

TEST_F(CliTest, ThresholdCommandRuns) {
  EXPECT_EQ(run({"mc", "threshold", "--n", "1", "--trials", "5000", "--seed", "3", "--bisections", "1"}), 0) << err.str();
  EXPECT_NE(out.str().find("threshold n=1 vs n=2"), std::string::npos);
}

TEST_F(CliTest, UnknownSubcommandIsExitOne) { EXPECT_EQ(run({"frobnicate"}), 1); }

TEST_F(CliTest, FnvDigestIsStable) {
  EXPECT_EQ(cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}
