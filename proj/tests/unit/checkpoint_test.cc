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

#include "core/checkpoint.h"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "core/data.h"
#include "core/errors.h"
#include "test_helpers.h"

namespace dpgan {
namespace {

struct Fixture {
  TrainConfig config;
  NetworkSpec disc = MakeSpec({2, 6, 1}, {ActivationKind::kLeakyRelu},
                              {ActivationKind::kIdentity});
  NetworkSpec gen = MakeSpec({3, 6, 2}, {ActivationKind::kTanh}, {ActivationKind::kSigmoid});
  RecordMatrix data = GenGaussianMixture(200, {{0.25, 0.75}, {0.75, 0.25}}, 0.05, 5);

  Fixture() {
    config.batch_size = 10;
    config.n_d = 2;
    config.n_g = 8;
    config.latent_dim = 3;
    config.log_every = 2;
    config.eval_batch = 20;
    config.sigma_n = 0.7;
    config.seed = 99;
    config.alpha_d = 1e-3;
    config.alpha_g = 1e-3;
  }
};

void ExpectSameState(const TrainerState& a, const TrainerState& b) {
  EXPECT_EQ(a.disc_spec, b.disc_spec);
  EXPECT_EQ(a.gen_spec, b.gen_spec);
  EXPECT_EQ(a.disc, b.disc);
  EXPECT_EQ(a.gen, b.gen);
  EXPECT_EQ(a.disc_opt.running_sq_avg, b.disc_opt.running_sq_avg);
  EXPECT_EQ(a.gen_opt.running_sq_avg, b.gen_opt.running_sq_avg);
  EXPECT_EQ(a.ledger, b.ledger);
  EXPECT_EQ(a.rng.SerializeState(), b.rng.SerializeState());
  EXPECT_EQ(a.sampler, b.sampler);
  EXPECT_EQ(a.generator_iteration, b.generator_iteration);
  EXPECT_EQ(a.critic_steps, b.critic_steps);
  EXPECT_EQ(a.c_g, b.c_g);
  EXPECT_EQ(a.max_per_example_norm, b.max_per_example_norm);
  ASSERT_EQ(a.log.rows.size(), b.log.rows.size());
  for (std::size_t i = 0; i < a.log.rows.size(); ++i) {
    EXPECT_EQ(a.log.rows[i].generator_iteration, b.log.rows[i].generator_iteration);
    EXPECT_EQ(a.log.rows[i].wasserstein_estimate, b.log.rows[i].wasserstein_estimate);
    EXPECT_EQ(a.log.rows[i].epsilon_spent, b.log.rows[i].epsilon_spent);
  }
}

TEST(CheckpointTest, EncodeDecodeRoundTrip) {
  Fixture f;
  f.config.n_g = 4;
  TrainerState s = InitTrainer(f.config, f.data, f.disc, f.gen);
  RunTraining(s, f.data, f.config);
  const Checkpoint ck{"seed = 99\n", s};
  const Checkpoint back = DecodeCheckpoint(EncodeCheckpoint(ck));
  EXPECT_EQ(back.config_text, ck.config_text);
  ExpectSameState(back.state, s);
}

TEST(CheckpointTest, ResumeIsBitwiseIdentical) {
  Fixture f;
  const TrainResult straight = Train(f.config, f.data, f.disc, f.gen);

  testing::TempDir dir("ckpt");
  TrainConfig first = f.config;
  first.n_g = 3;
  TrainerState s = InitTrainer(first, f.data, f.disc, f.gen);
  RunTraining(s, f.data, first);
  SaveCheckpoint({"cfg", s}, dir.File("mid.ckpt"));

  Checkpoint resumed = LoadCheckpoint(dir.File("mid.ckpt"));
  RunTraining(resumed.state, f.data, f.config);
  ExpectSameState(resumed.state, straight.state);
}

TEST(CheckpointTest, LoadGeneratorReadsOnlyTheGenerator) {
  Fixture f;
  f.config.n_g = 2;
  const TrainResult r = Train(f.config, f.data, f.disc, f.gen);
  testing::TempDir dir("ckpt");
  SaveCheckpoint({"cfg", r.state}, dir.File("g.ckpt"));
  const GeneratorSnapshot g = LoadGenerator(dir.File("g.ckpt"));
  EXPECT_EQ(g.spec, f.gen);
  EXPECT_EQ(g.params, r.gen);
}

TEST(CheckpointTest, CorruptionIsDetected) {
  Fixture f;
  const TrainerState s = InitTrainer(f.config, f.data, f.disc, f.gen);
  const std::string good = EncodeCheckpoint({"cfg", s});

  std::string flipped = good;
  flipped[good.size() / 2] ^= 0x10;
  EXPECT_THROW(DecodeCheckpoint(flipped), FormatError);

  EXPECT_THROW(DecodeCheckpoint(good.substr(0, good.size() - 9)), FormatError);
  EXPECT_THROW(DecodeCheckpoint(good.substr(0, 5)), FormatError);
  EXPECT_THROW(DecodeCheckpoint(""), FormatError);

  std::string magic = good;
  magic[0] = 'X';
  EXPECT_THROW(DecodeCheckpoint(magic), FormatError);

  std::string version = good;
  version[8] = 0x7f;
  try {
    DecodeCheckpoint(version);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
}

TEST(CheckpointTest, MissingAndCorruptFiles) {
  EXPECT_THROW(LoadCheckpoint("/nonexistent/x.ckpt"), IoError);
  EXPECT_THROW(LoadGenerator("/nonexistent/x.ckpt"), IoError);
  testing::TempDir dir("ckpt");
  {
    std::ofstream out(dir.File("junk.ckpt"), std::ios::binary);
    out << "not a checkpoint at all";
  }
  EXPECT_THROW(LoadCheckpoint(dir.File("junk.ckpt")), FormatError);
  EXPECT_THROW(LoadGenerator(dir.File("junk.ckpt")), FormatError);
}

}  // namespace
}  // namespace dpgan
