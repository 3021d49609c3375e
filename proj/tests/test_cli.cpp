#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "waveguide/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + WAVEGUIDE_CLI + "\" " + args + " 2>&1";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) o.output += buf.data();
  const int raw = pclose(p);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("waveguide_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

const char* kModes = R"([geometry]
d1 = 1
d2 = 1
alpha0 = 0

[profile]
kind = rectwell
a = 1
alpha1 = -1

[run]
tasks = modes
)";

}  // namespace

TEST_F(CliTest, ValidateOnlySucceeds) {
  const auto o = run_cli("run " + write("m.ini", kModes) + " --validate-only");
  EXPECT_EQ(o.status, 0) << o.output;
  EXPECT_NE(o.output.find("configuration valid: 1 task(s), 1 sweep point(s)"), std::string::npos) << o.output;
}

TEST_F(CliTest, SuccessfulRunWritesAllOutputs) {
  const fs::path out = dir_ / "out";
  const auto o = run_cli("run " + write("m.ini", kModes) + " --out " + out.string());
  EXPECT_EQ(o.status, 0) << o.output;
  EXPECT_TRUE(fs::exists(out / "modes.csv"));
  EXPECT_TRUE(fs::exists(out / "modes.dat"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  std::ifstream dat(out / "modes.dat");
  std::string first;
  std::getline(dat, first);
  EXPECT_EQ(first.rfind("#", 0), 0u);
  EXPECT_NE(o.output.find("PASS "), std::string::npos);
}

TEST_F(CliTest, ConfigErrorExitsWithTwoAndNamesTheLine) {
  std::string bad = kModes;
  bad.replace(bad.find("a = 1\n"), 6, "a = x\n");
  const std::string path = write("bad.ini", bad);
  const auto o = run_cli("run " + path + " --validate-only");
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.output.find(path + ":8:"), std::string::npos) << o.output;
}

TEST_F(CliTest, MissingConfigExitsWithTwo) {
  EXPECT_EQ(run_cli("run " + (dir_ / "nope.ini").string()).status, 2);
}

TEST_F(CliTest, UnknownTaskOverrideExitsWithTwo) {
  const auto o = run_cli("run " + write("m.ini", kModes) + " --tasks modes,bogus --validate-only");
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.output.find("bogus"), std::string::npos);
}

TEST_F(CliTest, UnwritableOutputExitsWithTwo) {
  const auto o = run_cli("run " + write("m.ini", kModes) + " --out /proc/waveguide_cannot_write_here");
  EXPECT_EQ(o.status, 2) << o.output;
  EXPECT_NE(o.output.find("cannot create output directory"), std::string::npos);
}

TEST_F(CliTest, UsageErrorExitsWithTwo) {
  EXPECT_EQ(run_cli("run").status, 2);
  EXPECT_EQ(run_cli("run " + write("m.ini", kModes) + " --jobs notanumber").status, 2);
}

TEST_F(CliTest, FailedCheckExitsWithOne) {
  // A 100-sample Monte Carlo estimate cannot meet the 1e-4 agreement check.
  const std::string cfg = R"([geometry]
d1 = 1
d2 = 1
alpha0 = 0

[profile]
kind = rectwell
a = 1
alpha1 = -2

[numerics]
n_cells = 100
skn_strategy = montecarlo
mc_samples = 100

[run]
tasks = bounds
)";
  const auto o = run_cli("run " + write("mc.ini", cfg) + " --out " + (dir_ / "out").string());
  EXPECT_EQ(o.status, 1) << o.output;
  EXPECT_NE(o.output.find("FAIL bounds.skn_agreement"), std::string::npos) << o.output;
}

TEST_F(CliTest, SummaryEchoesAConfigThatRevalidates) {
  const fs::path out = dir_ / "out";
  ASSERT_EQ(run_cli("run " + write("m.ini", kModes) + " --seed 123 --out " + out.string()).status, 0);
  std::ifstream in(out / "summary.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["seed"], 123);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_TRUE(j.contains("tolerances"));
  const std::string echo = j["config"];
  const auto cfg = waveguide::load_config(waveguide::parse_ini(echo, "echo"));
  EXPECT_EQ(cfg.seed, 123u);
  EXPECT_EQ(waveguide::to_ini(cfg), echo);
}

TEST_F(CliTest, CsvValuesCarrySeventeenSignificantDigits) {
  const fs::path out = dir_ / "out";
  ASSERT_EQ(run_cli("run " + write("m.ini", kModes) + " --out " + out.string()).status, 0);
  std::ifstream in(out / "modes.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  // The first transverse eigenvalue pi^2/4 is irrational, so every digit is printed.
  EXPECT_NE(row.find("2.4674011002723395"), std::string::npos) << row;
}
