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

#include "core/config.h"

#include <cmath>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "core/errors.h"
#include "core/privacy.h"
#include "test_helpers.h"

namespace dpgan {
namespace {

const char kBase[] = R"(# small run
[run]
seed = 7
out_dir = runs/a

[data]
source = mixture
n = 512
std = 0.05

[train]
batch_size = 32
n_d = 3
n_g = 10
latent_dim = 4
c_p = 0.01

[privacy]
epsilon = 10
delta = 1e-5

[discriminator]
widths = 2, 8, 1
hidden = leaky_relu
output = identity

[generator]
widths = 4, 8, 2
hidden = leaky_relu
output = sigmoid
)";

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

std::string ErrorOf(const std::string& text) {
  try {
    ParseRunConfig(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, ParsesEveryField) {
  const RunConfig c = ParseRunConfig(kBase);
  EXPECT_EQ(c.train.seed, 7u);
  EXPECT_EQ(c.out_dir, "runs/a");
  EXPECT_EQ(c.data.source, DataSource::kGaussianMixture);
  EXPECT_EQ(c.data.n, 512u);
  EXPECT_EQ(c.data.centers.size(), 4u);
  EXPECT_EQ(c.data.data_seed, 7u);
  EXPECT_EQ(c.train.batch_size, 32u);
  EXPECT_EQ(c.train.n_d, 3);
  EXPECT_EQ(c.train.n_g, 10u);
  EXPECT_EQ(c.epsilon, 10.0);
  EXPECT_FALSE(c.sigma_n.has_value());
  EXPECT_EQ(c.disc.layer_widths, (std::vector<std::size_t>{2, 8, 1}));
  EXPECT_EQ(c.disc.activations.back().kind, ActivationKind::kIdentity);
  EXPECT_EQ(c.gen.activations.front().kind, ActivationKind::kLeakyRelu);
  EXPECT_EQ(c.text, kBase);
}

TEST(ConfigTest, ResolveCalibratesSigmaPerOuterLoop) {
  const RunConfig c = ParseRunConfig(kBase);
  const TrainConfig t = ResolveTrainConfig(c, 512);
  const double q = 32.0 / 512.0;
  EXPECT_DOUBLE_EQ(t.sigma_n, 2.0 * q * std::sqrt(3.0 * std::log(1e5)) / 10.0);
  EXPECT_EQ(t.sigma_n, CalibrateSigma(10.0, 1e-5, q, 3));
}

TEST(ConfigTest, SigmaGivenDirectly) {
  const RunConfig c = ParseRunConfig(Replace(kBase, "epsilon = 10", "sigma_n = 0"));
  EXPECT_EQ(ResolveTrainConfig(c, 512).sigma_n, 0.0);
}

TEST(ConfigTest, ErrorsNameTheLineOrKey) {
  EXPECT_NE(ErrorOf(Replace(kBase, "n = 512", "n = 512\nbogus = 1")).find("unknown key data.bogus"),
            std::string::npos);
  EXPECT_NE(ErrorOf(Replace(kBase, "n = 512", "n = 512\nn = 3")).find("duplicate key"),
            std::string::npos);
  EXPECT_NE(ErrorOf(Replace(kBase, "c_p = 0.01", "c_p = abc")).find("train.c_p"),
            std::string::npos);
  EXPECT_NE(ErrorOf(Replace(kBase, "[run]", "[run")).find("config line 2"), std::string::npos);
  EXPECT_NE(ErrorOf(Replace(kBase, "epsilon = 10", "epsilon = 10\nsigma_n = 1"))
                .find("exactly one"),
            std::string::npos);
}

TEST(ConfigTest, ContractViolationsAreRejected) {
  EXPECT_THROW(ParseRunConfig(Replace(kBase, "c_p = 0.01", "c_p = 5")), PreconditionError);
  EXPECT_THROW(ParseRunConfig(Replace(kBase, "widths = 4, 8, 2", "widths = 3, 8, 2")),
               InvalidArgument);
  EXPECT_THROW(ParseRunConfig(Replace(kBase, "output = sigmoid", "output = tanh")),
               InvalidArgument);
  const RunConfig c = ParseRunConfig(Replace(kBase, "batch_size = 32", "batch_size = 600"));
  EXPECT_THROW(ResolveTrainConfig(c, 512), InvalidArgument);
}

TEST(ConfigTest, BinarySourceAndCouplings) {
  std::string text = Replace(kBase, "source = mixture\nn = 512\nstd = 0.05",
                             "source = binary\nn = 100\ndims = 2\nbase_probs = 0.2, 0.4\n"
                             "couplings = 0-1:0.5\nseed = 3");
  text = Replace(text, "widths = 4, 8, 2", "widths = 4, 8, 2");
  const RunConfig c = ParseRunConfig(text);
  EXPECT_EQ(c.data.source, DataSource::kCorrelatedBinary);
  EXPECT_EQ(c.data.base_probs, (std::vector<double>{0.2, 0.4}));
  ASSERT_EQ(c.data.couplings.size(), 1u);
  EXPECT_EQ(c.data.couplings[0].j, 1u);
  EXPECT_EQ(c.data.data_seed, 3u);
  const RecordMatrix d = LoadRunData(c);
  EXPECT_EQ(d.rows(), 100u);
  EXPECT_EQ(d.kind(), RecordKind::kBinary);
}

TEST(ConfigTest, CsvSourceAppliesNormBound) {
  testing::TempDir dir("config");
  {
    std::ofstream out(dir.File("d.csv"));
    out << "a,b\n3,4\n0.3,0.4\n";
  }
  const std::string text =
      Replace(kBase, "source = mixture\nn = 512\nstd = 0.05",
              "source = csv\npath = " + dir.File("d.csv") + "\nhas_header = true\nnorm_bound = 1");
  const RecordMatrix d = LoadRunData(ParseRunConfig(text));
  ASSERT_EQ(d.rows(), 2u);
  EXPECT_LE(d.MaxRowNorm(), 1.0);
  EXPECT_EQ(d.norm_bound(), 1.0);
}

TEST(ConfigTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadRunConfig("/nonexistent/run.cfg"), IoError);
  const std::string text = Replace(kBase, "source = mixture\nn = 512\nstd = 0.05",
                                   "source = csv\npath = /nonexistent/data.csv");
  EXPECT_THROW(LoadRunData(ParseRunConfig(text)), IoError);
}

TEST(ConfigTest, HashIsStableFnv1a) {
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
  EXPECT_EQ(Fnv1aHex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace dpgan
