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

#ifndef DPGAN_CORE_TRAINER_H_
#define DPGAN_CORE_TRAINER_H_

// Differentially private WGAN training. Each outer iteration runs n_d critic
// updates
//   g_i   = grad_w [f_w(x_i) - f_w(G(z_i))]            (per example)
//   g_bar = (sum_i g_i + N(0, sigma_n^2 c_g^2 I)) / m  (one noise draw)
//   w     = clip(w + alpha_d RMSProp(g_bar), -c_p, c_p)
// followed by one noise-free generator update
//   g_theta = -grad_theta (1/m) sum_i f_w(G(z_i)),  theta -= alpha_g RMSProp(g_theta).
// Only critic updates touch data, so only they are charged to the accountant.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/data.h"
#include "core/privacy.h"
#include "core/rng.h"
#include "core/tensor.h"

namespace dpgan {

enum class LossKind {
  kWasserstein,
  // log D(x) + log(1 - D(G(z))) with D = sigmoid(f). Comparison only: the
  // privacy accounting is not re-derived for it.
  kMinimax,
};

struct TrainConfig {
  double alpha_d = 5e-5;
  double alpha_g = 5e-5;
  double c_p = 0.01;
  std::size_t batch_size = 64;
  int n_d = 5;
  std::uint64_t n_g = 1000;
  double sigma_n = 0.0;
  // Gradient bound scaling the noise. Zero means "derive from the
  // discriminator architecture".
  double c_g = 0.0;
  std::uint64_t seed = 0;
  std::size_t latent_dim = 100;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  // Wasserstein estimate and epsilon are logged every log_every generator
  // iterations.
  std::uint64_t log_every = 100;
  std::size_t eval_batch = 256;
  LossKind loss = LossKind::kWasserstein;
  // Weight decay on the discriminator, applied to every per-example gradient
  // before noise. c_g is not enlarged automatically.
  double l2 = 0.0;
  // Delta used when reporting epsilon.
  double delta = 1e-5;
  // Abort when a per-example gradient norm exceeds c_g.
  bool check_grad_bound = false;

  // Throws InvalidArgument / PreconditionError. Checks q = m/M in (0, 1], the
  // network contracts and the clip precondition for the discriminator.
  void Validate(const NetworkSpec& disc, const NetworkSpec& gen,
                std::size_t dataset_size) const;
  double SamplingRatio(std::size_t dataset_size) const {
    return static_cast<double>(batch_size) / static_cast<double>(dataset_size);
  }
};

// Latent vectors uniform on [-1, 1]^dim.
struct LatentSampler {
  std::size_t dim = 100;
  std::vector<double> Sample(Rng& rng) const;
};

struct MetricRow {
  std::uint64_t generator_iteration = 0;
  double wasserstein_estimate = 0.0;
  double epsilon_spent = 0.0;
  // Not persisted: excluded from checkpoints and metric files.
  double wallclock_seconds = 0.0;
};

struct MetricLog {
  std::vector<MetricRow> rows;
  // Throws InvalidArgument unless generator_iteration strictly increases.
  void Append(const MetricRow& row);
};

// Uniform batches without replacement within an epoch; the permutation is
// redrawn when fewer than a full batch of indices remain.
class BatchSampler {
 public:
  BatchSampler() = default;
  explicit BatchSampler(std::size_t dataset_size) : size_(dataset_size) {}

  std::vector<std::size_t> Next(std::size_t m, Rng& rng);

  std::size_t dataset_size() const { return size_; }
  const std::vector<std::size_t>& permutation() const { return perm_; }
  std::size_t position() const { return pos_; }
  void Restore(std::size_t dataset_size, std::vector<std::size_t> perm,
               std::size_t pos);

  bool operator==(const BatchSampler&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::size_t> perm_;
  std::size_t pos_ = 0;
};

struct TrainerState {
  NetworkSpec disc_spec;
  NetworkSpec gen_spec;
  ParameterSet disc;
  ParameterSet gen;
  RmspropState disc_opt;
  RmspropState gen_opt;
  MomentsLedger ledger;
  Rng rng;
  BatchSampler sampler;
  std::uint64_t generator_iteration = 0;
  std::uint64_t critic_steps = 0;
  // c_g in effect for this run.
  double c_g = 0.0;
  // Largest per-example critic gradient norm seen so far.
  double max_per_example_norm = 0.0;
  MetricLog log;
};

// c_g implied by the discriminator architecture: the larger of the closed-form
// bound plus its bias terms (interval-propagated range for unbounded
// activations) and the norm-propagated bound, both with biases.
double DefaultGradientBound(const NetworkSpec& disc, double c_p, double data_norm_bound);

// Discriminator weights uniform on [-c_p, c_p], generator weights
// Glorot-uniform, all biases zero.
TrainerState InitTrainer(const TrainConfig& config, const RecordMatrix& data,
                         const NetworkSpec& disc_spec, const NetworkSpec& gen_spec);

// grad_w [f_w(x) - f_w(G(z))] with the generator held fixed.
GradientSet PerExampleCriticGrad(const NetworkSpec& disc_spec, const ParameterSet& disc,
                                 const NetworkSpec& gen_spec, const ParameterSet& gen,
                                 std::span<const double> x, std::span<const double> z,
                                 LossKind loss = LossKind::kWasserstein);

// (sum of per-example gradients + one N(0, (sigma_n c_g)^2 I) vector) / m.
// Gradients are summed in list order; noise coordinates are drawn in Flatten
// order. Throws InvalidArgument for an empty batch.
GradientSet NoisyBatchGrad(std::span<const GradientSet> per_example, double sigma_n,
                           double c_g, GaussianSource& noise);

// One discriminator update. Draws z then x, charges one step to the
// accountant. `noise` overrides the state's generator for the Gaussian draw.
void CriticIteration(TrainerState& state, const RecordMatrix& data,
                     const TrainConfig& config, GaussianSource* noise = nullptr);

// grad_theta of (1/m) sum_i -f_w(G(z_i)) (or the minimax generator loss).
GradientSet GeneratorGrad(const NetworkSpec& disc_spec, const ParameterSet& disc,
                          const NetworkSpec& gen_spec, const ParameterSet& gen,
                          std::span<const std::vector<double>> zs,
                          LossKind loss = LossKind::kWasserstein);

// One generator update through the frozen discriminator. Noise free; the
// accountant is not touched.
void GeneratorIteration(TrainerState& state, const TrainConfig& config);

// Mean over a fresh batch of f_w(x) - f_w(G(z)), drawn from a generator
// seeded by (config.seed, generator_iteration) so logging never perturbs the
// training stream.
double LoggedWassersteinEstimate(const TrainerState& state, const RecordMatrix& data,
                                 const TrainConfig& config);

struct TrainHooks {
  // Called after every generator iteration.
  std::function<void(const TrainerState&)> after_generator_iteration;
};

// Continues from `state` until config.n_g generator iterations are done.
// Throws NumericError naming the iteration when a parameter becomes
// non-finite.
void RunTraining(TrainerState& state, const RecordMatrix& data,
                 const TrainConfig& config, const TrainHooks& hooks = {});

struct TrainResult {
  ParameterSet gen;
  MetricLog log;
  TrainerState state;
};

TrainResult Train(const TrainConfig& config, const RecordMatrix& data,
                  const NetworkSpec& disc_spec, const NetworkSpec& gen_spec,
                  const TrainHooks& hooks = {});

// Draws n samples through the generator from fresh latent vectors.
RecordMatrix GenerateSamples(const NetworkSpec& gen_spec, const ParameterSet& gen,
                             std::size_t n, std::uint64_t seed);

}  // namespace dpgan

#endif  // DPGAN_CORE_TRAINER_H_
