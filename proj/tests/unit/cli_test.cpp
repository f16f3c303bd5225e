#ifdef STIRAP_CLI

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stirap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& text) const {
    const fs::path path = dir_ / "run.ini";
    std::ofstream(path) << text;
    return path.string();
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(STIRAP_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

TEST_F(Cli, ScheduleDumpWritesFiles) {
  const fs::path out = dir_ / "out";
  EXPECT_EQ(run("schedule-dump --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "schedule.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST_F(Cli, UnknownKeyIsConfigError) {
  const std::string cfg = write_config("[schedule]\nwedge_deg = 90\nbogus = 1\n");
  EXPECT_EQ(run("schedule-dump --config " + cfg + " --out " + (dir_ / "out").string()), 2);
}

TEST_F(Cli, BadFlagIsConfigError) {
  EXPECT_EQ(run("schedule-dump --mode fuzzy"), 2);
  EXPECT_EQ(run("schedule-dump --no-such-flag"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST_F(Cli, TooFewWedgesIsFitError) {
  const std::string cfg = write_config(
      "[lambda]\ndissipation = false\n[schedule]\ntau_ns = 500\n[sweep]\nwedge_deg = 0, 90\n");
  EXPECT_EQ(run("berry-sweep --config " + cfg + " --out " + (dir_ / "out").string()), 4);
}

TEST_F(Cli, UnstableStepIsNumericalError) {
  const std::string cfg = write_config("[lambda]\nrabi_mhz = 100000\n[integration]\nsubsteps = 1\n");
  EXPECT_EQ(run("trajectory --config " + cfg + " --out " + (dir_ / "out").string()), 3);
}

}  // namespace

#endif
