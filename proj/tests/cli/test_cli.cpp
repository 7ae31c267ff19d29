#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "einsym/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = einsym::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed-style binary through the shell and returns its exit code.
int run_binary(const std::string& args) {
  const std::string cmd = std::string(EINSYM_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("einsym_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"ricci", "--dim", "1"}).code, 2);
  EXPECT_EQ(run({"ricci", "--dim", "2", "--component", "1,3"}).code, 2);
  EXPECT_EQ(run({"deduce", "--dim", "2"}).code, 2);
  EXPECT_EQ(run({"determining", "--class", "nope"}).code, 2);
  EXPECT_EQ(run({"verify", "gct", "--dim", "5"}).code, 2);
  EXPECT_EQ(run({"verify", "two-dim", "--dim", "3"}).code, 2);
  EXPECT_EQ(run({"oracle", "--samples", "0"}).code, 2);
  EXPECT_EQ(run({"certify", "--lambda", "7"}).code, 2);
}

TEST(Cli, RicciConstructionHasNoCap) {
  const Outcome r = run({"ricci", "--dim", "5", "--component", "1,1", "--format", "json"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["components"].size(), 1U);
}

TEST(Cli, CertifyBothModes) {
  const Outcome zero = run({"certify", "--dim", "2", "--lambda", "0"});
  ASSERT_EQ(zero.code, 0) << zero.err;
  const auto jz = nlohmann::json::parse(zero.out);
  EXPECT_EQ(jz["generators"], (nlohmann::json{"GCT", "scaling"}));
  EXPECT_EQ(jz["schema"], 1);
  const Outcome sym = run({"certify", "--dim", "2", "--lambda", "sym"});
  ASSERT_EQ(sym.code, 0);
  EXPECT_EQ(nlohmann::json::parse(sym.out)["generators"], nlohmann::json{"GCT"});
  for (const auto& s : jz["steps"]) {
    EXPECT_TRUE(s.contains("name") && s.contains("paper_eq") && s.contains("status") && s.contains("residual_hash"));
  }
}

TEST(Cli, ReportsAndTextFormat) {
  EXPECT_EQ(run({"deduce", "--dim", "2", "--step", "phi-structure"}).code, 0);
  EXPECT_EQ(run({"verify", "scaling", "--dim", "2", "--lambda", "sym"}).code, 0);
  EXPECT_EQ(run({"verify", "ansatz", "--dim", "3"}).code, 0);
  const Outcome r = run({"verify", "two-dim"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("status: pass"), std::string::npos);
  EXPECT_EQ(run({"check-absent", "--dim", "3"}).code, 0);
  EXPECT_EQ(run({"oracle", "--dim", "2", "--target", "dricci", "--samples", "5"}).code, 0);
}

TEST(Cli, DeterminingJson) {
  const Outcome r = run({"determining", "--dim", "2", "--class", "dgddg", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["count"], j["constraints"].size());
  EXPECT_GT(j["count"].get<int>(), 0);
}

TEST(Cli, OutputDirectoryAndAtomicWrite) {
  const fs::path d = scratch_dir("out");
  ::setenv("EINSYM_OUT_DIR", d.c_str(), 1);
  const Outcome r = run({"prolong", "--dim", "2", "--field", "gct", "--component", "1,1", "--out", "sub/p.txt"});
  ::unsetenv("EINSYM_OUT_DIR");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(fs::exists(d / "sub/p.txt"));
  for (const auto& e : fs::directory_iterator(d / "sub")) EXPECT_EQ(e.path().filename(), "p.txt");
  fs::remove_all(d);
}

TEST(Cli, ByteIdenticalArtifacts) {
  const fs::path d = scratch_dir("det");
  const Outcome a = run({"certify", "--dim", "3", "--lambda", "0", "--jobs", "1", "--out", (d / "a.json").string()});
  const Outcome b = run({"certify", "--dim", "3", "--lambda", "0", "--jobs", "4", "--out", (d / "b.json").string()});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(slurp(d / "a.json"), slurp(d / "b.json"));
  fs::remove_all(d);
}

TEST(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_binary("ricci --dim 2 --component 1,1"), 0);
  EXPECT_EQ(run_binary("verify gct --dim 5"), 2);
  EXPECT_EQ(run_binary("--no-such-flag"), 2);
  EXPECT_EQ(run_binary("certify --dim 2 --lambda 0"), 0);
}
