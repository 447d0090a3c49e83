// Copyright 2026 The DPGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the dpgan executable as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dpgan_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  Result Run(const std::string& args, const std::string& env = "") {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" DPGAN_CLI "' " + args +
                            " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string WriteConfig(const std::string& extra_data = "", int n_g = 20) {
    const std::string path = Path("run.cfg");
    std::ofstream out(path);
    out << "[run]\nseed = 3\nout_dir = " << Path("run") << "\n"
        << "[data]\nsource = mixture\nn = 256\n" << extra_data
        << "[train]\nbatch_size = 16\nn_d = 2\nn_g = " << n_g
        << "\nlatent_dim = 3\nlog_every = 5\neval_batch = 32\ncheckpoint_every = 10\n"
        << "alpha_d = 0.001\nalpha_g = 0.001\n"
        << "[privacy]\nepsilon = 4\n"
        << "[discriminator]\nwidths = 2, 6, 1\nhidden = leaky_relu\noutput = identity\n"
        << "[generator]\nwidths = 3, 6, 2\nhidden = tanh\noutput = sigmoid\n";
    return path;
  }

  fs::path dir_;
};

const std::string kSource = DPGAN_SOURCE_DIR;

TEST_F(CliTest, CalibrateMatchesGolden) {
  const Result r =
      Run("calibrate --epsilon 9.6 --delta 1e-5 --q 0.0010666666666666667 --n-d 5");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, Slurp(kSource + "/tests/cli/golden/calibrate.txt"));
}

TEST_F(CliTest, CalibrateRejectsZeroEpsilon) {
  const Result r = Run("calibrate --epsilon 0 --delta 1e-5 --q 0.001 --n-d 5");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("epsilon"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Run("").exit_code, 2);
  EXPECT_EQ(Run("frobnicate").exit_code, 2);
  EXPECT_EQ(Run("calibrate --epsilon 1").exit_code, 2);
  const Result v = Run("--version");
  EXPECT_EQ(v.exit_code, 0);
  EXPECT_NE(v.out.find("1.0.0"), std::string::npos);
}

TEST_F(CliTest, Accountant) {
  const Result r = Run("accountant --q 0.01 --delta 1e-5 --sigma 1.0 --steps 10,100");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("10 "), std::string::npos);
  EXPECT_EQ(Run("accountant --q 0.01 --delta 1e-5").exit_code, 2);
}

TEST_F(CliTest, Gradcheck) {
  const Result pass = Run("gradcheck --arch 4,3,1 --c-p 0.01 --trials 10000");
  EXPECT_EQ(pass.exit_code, 0) << pass.err;
  EXPECT_NE(pass.out.find("c_g: 3.750000000e-03"), std::string::npos);
  EXPECT_NE(pass.out.find("result: PASS"), std::string::npos);

  const Result fail = Run("gradcheck --arch 4,3,1 --c-p 10");
  EXPECT_NE(fail.exit_code, 0);
  EXPECT_NE(fail.out.find("FAIL at layer 1 (width 3)"), std::string::npos);

  const Result none = Run("gradcheck --arch 4,3,1 --c-p 0.01 --trials 0");
  EXPECT_EQ(none.exit_code, 0);
  EXPECT_EQ(none.out.find("empirical"), std::string::npos);
}

TEST_F(CliTest, TrainWritesArtifactsAndResumes) {
  const std::string cfg = WriteConfig();
  const Result r = Run("train '" + cfg + "'");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const fs::path run = Path("run");
  const std::string metrics = Slurp(run / "metrics.csv");
  EXPECT_EQ(metrics.rfind("iteration,wasserstein_estimate,epsilon_spent\n", 0), 0u);
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 1 + 20 / 5);
  EXPECT_TRUE(fs::exists(run / "checkpoint_00000010.ckpt"));
  EXPECT_TRUE(fs::exists(run / "final.ckpt"));
  const auto manifest = nlohmann::json::parse(Slurp(run / "manifest.json"));
  EXPECT_EQ(manifest["status"], "complete");
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_EQ(manifest["generator_iterations"], 20);
  EXPECT_EQ(manifest["critic_steps"], 40);
  EXPECT_NEAR(manifest["epsilon_per_outer_loop"].get<double>(), 4.0, 0.04);

  // Resume from the midpoint into a second directory: same final checkpoint.
  const Result resumed = Run("train '" + cfg + "' --out-dir '" + Path("resumed") +
                             "' --resume '" + (run / "checkpoint_00000010.ckpt").string() + "'");
  ASSERT_EQ(resumed.exit_code, 0) << resumed.err;
  EXPECT_EQ(Slurp(run / "final.ckpt"), Slurp(fs::path(Path("resumed")) / "final.ckpt"));
}

TEST_F(CliTest, TrainTwiceIsBitwiseIdentical) {
  const std::string cfg = WriteConfig();
  ASSERT_EQ(Run("train '" + cfg + "' --out-dir '" + Path("a") + "'").exit_code, 0);
  const Result b = Run("train '" + Path("a/manifest.json") + "' --out-dir '" + Path("b") + "'");
  ASSERT_EQ(b.exit_code, 0) << b.err;
  for (const char* f : {"metrics.csv", "final.ckpt", "checkpoint_00000010.ckpt"}) {
    EXPECT_EQ(Slurp(fs::path(Path("a")) / f), Slurp(fs::path(Path("b")) / f)) << f;
  }
}

TEST_F(CliTest, OutDirFromEnvironment) {
  const std::string cfg = WriteConfig("", 5);
  ASSERT_EQ(Run("train '" + cfg + "'", "DPGAN_OUT_DIR='" + Path("env") + "'").exit_code, 0);
  EXPECT_TRUE(fs::exists(fs::path(Path("env")) / "final.ckpt"));
}

TEST_F(CliTest, TrainMissingDataNamesPath) {
  const std::string path = Path("run.cfg");
  {
    std::ofstream out(path);
    out << "[data]\nsource = csv\npath = /nonexistent/records.csv\n"
        << "[train]\nbatch_size = 4\nlatent_dim = 3\n[privacy]\nsigma_n = 0\n"
        << "[discriminator]\nwidths = 2, 1\nactivations = identity\n"
        << "[generator]\nwidths = 3, 2\nactivations = sigmoid\n";
  }
  const Result r = Run("train '" + path + "' --out-dir '" + Path("x") + "'");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("/nonexistent/records.csv"), std::string::npos) << r.err;
}

TEST_F(CliTest, GenerateHeaderOnlyForZeroAndDeterministic) {
  ASSERT_EQ(Run("train '" + WriteConfig("", 5) + "'").exit_code, 0);
  const std::string ckpt = Path("run/final.ckpt");
  const std::string before = Slurp(ckpt);
  const Result empty = Run("generate --checkpoint '" + ckpt + "' --n 0 --out '" +
                           Path("empty.csv") + "'");
  EXPECT_EQ(empty.exit_code, 0) << empty.err;
  EXPECT_EQ(Slurp(Path("empty.csv")), "x0,x1\n");

  ASSERT_EQ(Run("generate --checkpoint '" + ckpt + "' --n 100 --seed 4 --out '" +
                Path("a.csv") + "'").exit_code, 0);
  ASSERT_EQ(Run("generate --checkpoint '" + ckpt + "' --n 100 --seed 4 --out '" +
                Path("b.csv") + "'").exit_code, 0);
  EXPECT_EQ(Slurp(Path("a.csv")), Slurp(Path("b.csv")));
  ASSERT_EQ(Run("generate --checkpoint '" + ckpt + "' --n 20 --binarize 0.5 --out '" +
                Path("bin.csv") + "'").exit_code, 0);
  const std::string bin = Slurp(Path("bin.csv"));
  EXPECT_EQ(bin.find_first_not_of("x01,\n"), std::string::npos) << bin;
  EXPECT_EQ(Slurp(ckpt), before);
}

TEST_F(CliTest, GenerateRejectsCorruptCheckpoint) {
  {
    std::ofstream out(Path("bad.ckpt"));
    out << "garbage";
  }
  const Result r = Run("generate --checkpoint '" + Path("bad.ckpt") + "' --n 5 --out '" +
                       Path("o.csv") + "'");
  EXPECT_NE(r.exit_code, 0);
}

TEST_F(CliTest, EvaluateMatchesGolden) {
  const std::string fx = kSource + "/tests/cli/fixtures/";
  const Result r = Run("evaluate --real '" + fx + "real.csv' --gen '" + fx +
                       "gen.csv' --metrics dwp,nn --out-dir '" + Path("ev") + "'");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(Slurp(fs::path(Path("ev")) / "dwp.csv"), Slurp(kSource + "/tests/cli/golden/dwp.csv"));
  EXPECT_EQ(Slurp(fs::path(Path("ev")) / "nn.csv"), Slurp(kSource + "/tests/cli/golden/nn.csv"));
  const auto summary = nlohmann::json::parse(Slurp(fs::path(Path("ev")) / "summary.json"));
  EXPECT_TRUE(summary.contains("dwp"));
}

TEST_F(CliTest, EvaluateSelfComparisonIsDiagonal) {
  const std::string real = kSource + "/tests/cli/fixtures/real.csv";
  ASSERT_EQ(Run("evaluate --real '" + real + "' --gen '" + real + "' --metrics dwp --out-dir '" +
                Path("ev") + "'").exit_code, 0);
  std::ifstream in(fs::path(Path("ev")) / "dwp.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto a = line.find(','), b = line.rfind(',');
    EXPECT_EQ(line.substr(a + 1, b - a - 1), line.substr(b + 1)) << line;
  }
}

TEST_F(CliTest, EvaluateErrors) {
  const std::string fx = kSource + "/tests/cli/fixtures/";
  const Result unknown = Run("evaluate --real '" + fx + "real.csv' --gen '" + fx +
                             "gen.csv' --metrics fid --out-dir '" + Path("ev") + "'");
  EXPECT_EQ(unknown.exit_code, 2);
  EXPECT_NE(unknown.err.find("dwp, dwpre, nn, downstream"), std::string::npos) << unknown.err;

  {
    std::ofstream out(Path("wide.csv"));
    out << "a,b,c,d\n1,0,1,0\n";
  }
  const Result shape = Run("evaluate --real '" + fx + "real.csv' --gen '" + Path("wide.csv") +
                           "' --metrics dwp --out-dir '" + Path("ev") + "'");
  EXPECT_NE(shape.exit_code, 0);
  EXPECT_NE(shape.err.find("3"), std::string::npos);
  EXPECT_NE(shape.err.find("4"), std::string::npos);
}

}  // namespace
