#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dlp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args, const std::string& env = "") {
    const auto o = dir_ / "stdout.txt", e = dir_ / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" DLP_LAB_PATH "\" " + args + " > \"" + o.string() +
                            "\" 2> \"" + e.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
  }

  // last JSON line on stderr
  static nlohmann::json last_record(const std::string& err) {
    auto end = err.find_last_not_of('\n');
    auto begin = err.rfind('\n', end);
    return nlohmann::json::parse(err.substr(begin == std::string::npos ? 0 : begin + 1, end - begin));
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SpectrumJsonToStdout) {
  const auto r = run("spectrum --shape circle --radius 1 --n 32");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["N"], 32);
  EXPECT_NEAR(j["eigenvalues"][0][0].get<double>(), -1.0, 1e-10);
  const auto log = last_record(r.err);
  EXPECT_EQ(log["log"]["command"], "spectrum");
  EXPECT_EQ(log["log"]["grid"], "N=32");
  EXPECT_NE(log["log"]["versions"].get<std::string>().find("eigen"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  const auto r = run("spectrum --config " DLP_CONFIG_DIR "/ellipse.cfg --R 1 --n 32 --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "index,re,im,alpha,shape_id,N");
  EXPECT_NE(r.out.find("ellipse(c=2,R=1)"), std::string::npos);
}

TEST_F(Cli, SurfaceSpectrum) {
  const auto r = run("spectrum --shape sphere --n-theta 16 --n-phi 32");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["eigenvalues"].size(), 512u);
  EXPECT_EQ(last_record(r.err)["log"]["grid"], "16x32");
}

TEST_F(Cli, OutputDirEnvironmentAndAtomicFile) {
  const auto r = run("trace --shape ellipse --c 2 --R 0.5 --n 64 --out sub/trace.json", "DLP_LAB_OUTPUT_DIR=\"" + dir_.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(dir_ / "sub" / "trace.json"));
  EXPECT_NEAR(j["trace_K"].get<double>(), -1.0, 1e-10);
  EXPECT_GT(j["defect"].get<double>(), 0.0);
}

TEST_F(Cli, TraceCsv) {
  const auto r = run("trace --config " DLP_CONFIG_DIR "/circle.cfg --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "shape_id,N,trace_K,trace_KstarK_quadrature,trace_KstarK_svd,defect");
}

TEST_F(Cli, NodalCsv) {
  const auto r = run("nodal --shape ellipse --c 2 --R 0.5 --n 64 --pairs 4");
  ASSERT_EQ(r.code, 0) << r.err;
  int lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  EXPECT_EQ(lines, 5);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  for (const std::string args : {"spectrum --shape torus", "spectrum --shape ellipse --c 2", "bogus", "spectrum --n",
                                 "spectrum --config /nonexistent.cfg", "trace --shape sphere",
                                 "spectrum --shape circle --format xml", "spectrum --shape circle --n 15"}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2) << args << "\n" << r.err;
    const auto j = last_record(r.err);
    ASSERT_TRUE(j.contains("error")) << args;
    EXPECT_EQ(j["error"]["exit_code"], 2);
  }
}

TEST_F(Cli, IoErrorExitsFour) {
  std::ofstream(dir_ / "file") << "x";
  const auto r = run("spectrum --shape circle --n 16 --out \"" + (dir_ / "file" / "x.json").string() + "\"");
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_EQ(last_record(r.err)["error"]["kind"], "io");
}

TEST_F(Cli, SweepWritesLedgerAndSummary) {
  const std::string args = "sweep --family ellipse --R-values 0.5,1 --n 32 --ledger ledger.csv --summary summary.json";
  const std::string env = "DLP_LAB_OUTPUT_DIR=\"" + dir_.string() + "\"";
  auto r = run(args, env);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ledger = slurp(dir_ / "ledger.csv");
  const auto j = nlohmann::json::parse(slurp(dir_ / "summary.json"));
  EXPECT_TRUE(j["pass_flags"]["defect_positive"].get<bool>());
  r = run(args, env);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("reused"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "ledger.csv"), ledger);
}

TEST_F(Cli, VerifySingleCriterionAndFault) {
  auto r = run("verify --quick --only 1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("[PASS]  1"), std::string::npos);
  r = run("verify --quick --inject-fault --only 3");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("[FAIL]  3"), std::string::npos);
}

TEST_F(Cli, Version) {
  const auto r = run("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST_F(Cli, IdenticalConfigGivesIdenticalCsv) {
  const std::string args = "spectrum --config " DLP_CONFIG_DIR "/fourier.cfg --n 64 --format csv";
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c = run("nodal --config " DLP_CONFIG_DIR "/fourier.cfg --n 64 --pairs 3"), d = run("nodal --config " DLP_CONFIG_DIR "/fourier.cfg --n 64 --pairs 3");
  EXPECT_EQ(c.out, d.out);
}
