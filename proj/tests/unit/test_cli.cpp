#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("avsfe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args, const std::string& env = "") {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + AVSFE_CLI_PATH + "' " + args +
                      " > '" + out.string() + "' 2> '" + err.string() + "'";
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST_F(Cli, MissingSubcommandPrintsUsage) {
  Outcome r = run("");
  EXPECT_EQ(r.code, 64);
  EXPECT_NE((r.out + r.err).find("converge"), std::string::npos);
  EXPECT_EQ(run("frobnicate").code, 64);
}

TEST_F(Cli, InvalidInputIsAConfigError) {
  EXPECT_EQ(run("converge --p 0").code, 2);
  EXPECT_EQ(run("solve --config does_not_exist.json").code, 2);
  std::ofstream(dir_ / "bad.json") << R"({"geometry": {"type": "square"}, "unknown_key": 1})";
  Outcome r = run("solve --config bad.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown_key"), std::string::npos);
  EXPECT_EQ(run("converge --p 1 --refinements 1", "AVSFE_THREADS=zero").code, 2);
}

TEST_F(Cli, StudyMismatchIsRejected) {
  Outcome r = run(std::string("beam --config '") + AVSFE_STUDIES_DIR + "/convergence_a.json'");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, CheckPasses) {
  Outcome r = run("check");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, ConvergeWritesOneRowPerLevel) {
  Outcome r = run("converge --p 2 --refinements 3 --csv out.csv --no-timing -q");
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(dir_ / "out.csv");
  EXPECT_EQ(csv.rfind("step,h_max,ndof,", 0), 0u);
  EXPECT_EQ(count_lines(csv), 1 + 4);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  ASSERT_EQ(run("converge --p 1 --refinements 2 --csv a.csv --no-timing -q").code, 0);
  ASSERT_EQ(run("converge --p 1 --refinements 2 --csv b.csv --no-timing -q", "AVSFE_THREADS=3").code, 0);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(Cli, CsvGoesToStdoutWithoutPath) {
  Outcome r = run("converge --p 1 --refinements 1 --no-timing -q");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("step,", 0), 0u);
  EXPECT_EQ(count_lines(r.out), 3);
}

TEST_F(Cli, SolveFromConfigWritesVtk) {
  std::ofstream(dir_ / "solve.json") << R"({
    "geometry": {"type": "square", "nx": 2, "ny": 2},
    "materials": {"0": {"E": 1500.0, "nu": 0.3}},
    "exact": "case_a",
    "discretization": {"p": 1},
    "adaptivity": {"theta": 0.5, "max_steps": 1},
    "output": {"csv": "solve.csv", "vtk_dir": "vtk"}
  })";
  Outcome r = run("solve --config solve.json --no-timing -q");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(dir_ / "solve.csv")), 3);
  int vtk = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "vtk")) vtk += e.path().extension() == ".vtk";
  EXPECT_EQ(vtk, 2);
}

}  // namespace
