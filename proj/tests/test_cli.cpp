#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef LOCC_LAB_PATH
#error "LOCC_LAB_PATH must name the locc-lab binary"
#endif

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("LOCC_LAB_THREADS");
    dir_ = fs::temp_directory_path() / ("locc_cli_" + std::string(
                                                          ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& text) {
    const fs::path p = dir_ / "cfg.json";
    std::ofstream(p) << text;
    return p.string();
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(LOCC_LAB_PATH) + " " + args + " > " + (dir_ / "stdout").string() + " 2> " +
                            (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const {
    std::ifstream in(dir_ / "stderr");
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(Cli, SuccessWritesOutputs) {
  const auto cfg = write_config(R"({"experiment": "comparability", "d": 3, "k_max": 2, "n_pairs": 50})");
  EXPECT_EQ(run("comparability --config " + cfg + " --output-dir " + (dir_ / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "comparability_3d_k1.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "comparability_3d_k2.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "run_meta.json"));
}

TEST_F(Cli, FlagsWithoutConfigFile) {
  EXPECT_EQ(run("catalysts --d 4 --n-pairs 40 --n-candidates 30 --format json -q --output-dir " +
                (dir_ / "out").string()),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "catalysts_4d_k1.json"));
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  const auto bad = write_config("{\n  \"experiment\": \"comparability\",\n  \"d\": 3,\n  \"n_pairs\": 0\n}");
  EXPECT_EQ(run("comparability --config " + bad), 2);
  EXPECT_NE(stderr_text().find("cfg.json:4: n_pairs must be positive"), std::string::npos) << stderr_text();

  EXPECT_EQ(run("comparability --d 3 --n-pairs 0"), 2);
  EXPECT_NE(stderr_text().find("--n-pairs"), std::string::npos);
  EXPECT_EQ(run("catalysts --d 8 --k 5 --d-chi 8"), 2);
  EXPECT_EQ(run("nonsense --d 3"), 2);
  EXPECT_EQ(run("catalysts --d 4 --format xml"), 2);
  EXPECT_EQ(run("catalysts --d 4 --strong-all-k maybe"), 2);
  EXPECT_EQ(run("catalysts --config " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("catalysts --d four"), 2);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help"), 0); }

}  // namespace
