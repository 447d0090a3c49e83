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

#ifndef DPGAN_CORE_CONFIG_H_
#define DPGAN_CORE_CONFIG_H_

// Run configuration: flat "key = value" lines grouped under [section]
// headers, '#' starting a comment. Sections: run, data, train, privacy,
// discriminator, generator. See README.md for every key.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/data.h"
#include "core/tensor.h"
#include "core/trainer.h"

namespace dpgan {

enum class DataSource { kCsv, kGaussianMixture, kCorrelatedBinary };

struct DataSpec {
  DataSource source = DataSource::kGaussianMixture;
  // kCsv
  std::string path;
  RecordKind kind = RecordKind::kContinuous;
  bool has_header = false;
  // Generators
  std::size_t n = 4096;
  std::vector<Point2> centers;
  double std_dev = 0.05;
  std::size_t dims = 64;
  std::vector<double> base_probs;
  std::vector<PairCoupling> couplings;
  std::uint64_t data_seed = 0;
  // Rows longer than this are rescaled; 0 disables enforcement.
  double norm_bound = 0.0;
};

struct RunConfig {
  TrainConfig train;
  NetworkSpec disc;
  NetworkSpec gen;
  DataSpec data;
  // Exactly one of these is set.
  std::optional<double> epsilon;
  std::optional<double> sigma_n;
  std::string out_dir = "dpgan_run";
  // 0 writes only the final checkpoint.
  std::uint64_t checkpoint_every = 0;
  // Raw text the config was parsed from.
  std::string text;
};

// Throws FormatError for syntax errors and InvalidArgument for values that
// break the training contracts (checked without loading data).
RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::string& path);

// Builds or reads the training records and applies the norm bound.
RecordMatrix LoadRunData(const RunConfig& config);

// Resolves sigma_n (calibrating from epsilon with per-outer-loop semantics)
// and validates the training config against the data size.
TrainConfig ResolveTrainConfig(const RunConfig& config, std::size_t dataset_size);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string Fnv1aHex(const std::string& bytes);

}  // namespace dpgan

#endif  // DPGAN_CORE_CONFIG_H_
