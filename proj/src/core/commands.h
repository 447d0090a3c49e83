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


#ifndef DPGAN_CORE_COMMANDS_H_
#define DPGAN_CORE_COMMANDS_H_

// Operations behind the command-line tool. Each returns the text to print
// and throws the errors.h types on failure.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dpgan {

inline constexpr char kVersion[] = "1.0.0";

struct CalibrateArgs {
  double epsilon = 0.0;
  double delta = 0.0;
  double q = 0.0;
  int n_d = 0;
};

// sigma_n followed by the ledger epsilon after n_d, 10 n_d and 100 n_d steps.
std::string RunCalibrate(const CalibrateArgs& args);

struct AccountantArgs {
  double q = 0.0;
  double delta = 0.0;
  // Exactly one of sigma_n and epsilon; epsilon is calibrated with n_d.
  std::optional<double> sigma_n;
  std::optional<double> epsilon;
  int n_d = 5;
  // Step counts to tabulate. Empty means n_d times {1, 10, 100, 1000}.
  std::vector<std::uint64_t> steps;
};

std::string RunAccountant(const AccountantArgs& args);

struct GradcheckArgs {
  std::vector<std::size_t> widths;
  // One name for every layer, or one per layer.
  std::vector<std::string> activations;
  double c_p = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  // Real-record norm bound. The input bound is max(b_x, sqrt(input width))
  // since fake records lie in the unit cube; it only matters for unbounded
  // activations.
  double b_x = 1.0;
  bool include_biases = false;
};

struct GradcheckReport {
  std::string text;
  // False when the precondition fails or the empirical max exceeds c_g.
  bool pass = false;
};

GradcheckReport RunGradcheck(const GradcheckArgs& args);

struct TrainArgs {
  // A config file, or a manifest written by an earlier run.
  std::string config_path;
  // Overrides the config (and DPGAN_OUT_DIR) when non-empty.
  std::string out_dir;
  // Checkpoint to continue from.
  std::string resume_path;
};

struct TrainReport {
  std::string text;
  std::string out_dir;
  bool aborted = false;
};

// Writes metrics.csv, checkpoints and manifest.json under the output
// directory. A trainer abort is recorded in the manifest and rethrown.
TrainReport RunTrain(const TrainArgs& args);

struct GenerateArgs {
  std::string checkpoint_path;
  std::string out_path;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::optional<double> binarize_threshold;
};

std::string RunGenerate(const GenerateArgs& args);

struct EvaluateArgs {
  std::string real_path;
  std::string gen_path;
  std::string test_path;
  // Second class for the downstream metric.
  std::string gen_b_path;
  std::string test_b_path;
  bool has_header = true;
  std::vector<std::string> metrics;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t k = 3;
  std::size_t n_samples = 0;
  int repeats = 10;
  double l2 = 1e-3;
  int iters = 500;
  unsigned threads = 1;
};

// Metric names accepted by RunEvaluate.
std::vector<std::string> EvaluateMetricNames();

std::string RunEvaluate(const EvaluateArgs& args);

// Output directory: explicit value, else DPGAN_OUT_DIR, else the fallback.
std::string ResolveOutDir(const std::string& explicit_dir, const std::string& fallback);

}  // namespace dpgan

#endif  // DPGAN_CORE_COMMANDS_H_
