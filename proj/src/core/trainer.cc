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

#include "core/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/bounds.h"
#include "core/errors.h"
#include "core/eval.h"

namespace dpgan {

namespace {

// Stream labels for DeriveSeed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kLogStreamBase = 1'000'000;

double Sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

bool AllFinite(const ParameterSet& p) {
  for (const auto& w : p.weights) {
    for (double v : w.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (const auto& b : p.biases) {
    for (double v : b) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void AddInPlace(GradientSet& acc, const GradientSet& g, double scale = 1.0) {
  for (std::size_t l = 0; l < acc.weight_grads.size(); ++l) {
    auto& a = acc.weight_grads[l].values();
    const auto& b = g.weight_grads[l].values();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
    for (std::size_t i = 0; i < acc.bias_grads[l].size(); ++i) {
      acc.bias_grads[l][i] += scale * g.bias_grads[l][i];
    }
  }
}

}  // namespace

void TrainConfig::Validate(const NetworkSpec& disc, const NetworkSpec& gen,
                           std::size_t dataset_size) const {
  disc.Validate();
  gen.Validate();
  if (!(alpha_d > 0.0) || !(alpha_g > 0.0)) {
    throw InvalidArgument("learning rates must be positive");
  }
  if (!(c_p > 0.0)) throw InvalidArgument("c_p must be positive");
  if (batch_size == 0) throw InvalidArgument("batch size must be at least 1");
  if (dataset_size == 0) throw InvalidArgument("training data is empty");
  if (batch_size > dataset_size) {
    throw InvalidArgument("batch size " + std::to_string(batch_size) +
                          " exceeds dataset size " + std::to_string(dataset_size) +
                          " (q = m/M must lie in (0, 1])");
  }
  if (n_d < 1) throw InvalidArgument("n_d must be at least 1");
  if (!(sigma_n >= 0.0) || !std::isfinite(sigma_n)) {
    throw InvalidArgument("sigma_n must be finite and nonnegative");
  }
  if (!(c_g >= 0.0) || !std::isfinite(c_g)) {
    throw InvalidArgument("c_g must be finite and nonnegative (0 = derive)");
  }
  if (latent_dim == 0) throw InvalidArgument("latent dimension must be positive");
  if (!(rmsprop_decay > 0.0 && rmsprop_decay < 1.0)) {
    throw InvalidArgument("rmsprop_decay must lie in (0, 1)");
  }
  if (!(rmsprop_epsilon > 0.0)) throw InvalidArgument("rmsprop_epsilon must be positive");
  if (log_every == 0) throw InvalidArgument("log_every must be positive");
  if (eval_batch == 0) throw InvalidArgument("eval_batch must be positive");
  if (!(l2 >= 0.0)) throw InvalidArgument("l2 must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (disc.output_width() != 1) {
    throw InvalidArgument("discriminator output width must be 1, got " +
                          std::to_string(disc.output_width()));
  }
  if (gen.input_width() != latent_dim) {
    throw InvalidArgument("generator input width " + std::to_string(gen.input_width()) +
                          " does not match latent_dim " + std::to_string(latent_dim));
  }
  if (gen.output_width() != disc.input_width()) {
    throw InvalidArgument("generator output width " +
                          std::to_string(gen.output_width()) +
                          " does not match discriminator input width " +
                          std::to_string(disc.input_width()));
  }
  if (gen.activations.back().kind != ActivationKind::kSigmoid) {
    throw InvalidArgument("generator output layer must use sigmoid");
  }
  const PreconditionResult pre = CheckClipPrecondition(disc, c_p, NetworkBounds(disc));
  if (!pre.pass) {
    throw PreconditionError("c_p = " + std::to_string(c_p) +
                            " violates c_p <= 1/(m_k B_sigma') at discriminator layer " +
                            std::to_string(pre.failing_layer) + " (limit " +
                            std::to_string(pre.limit) + ")");
  }
}

std::vector<double> LatentSampler::Sample(Rng& rng) const {
  std::vector<double> z(dim);
  for (double& v : z) v = rng.Uniform(-1.0, 1.0);
  return z;
}

void MetricLog::Append(const MetricRow& row) {
  if (!rows.empty() && row.generator_iteration <= rows.back().generator_iteration) {
    throw InvalidArgument("metric log iterations must strictly increase");
  }
  rows.push_back(row);
}

std::vector<std::size_t> BatchSampler::Next(std::size_t m, Rng& rng) {
  if (m == 0 || m > size_) throw InvalidArgument("batch size must lie in [1, M]");
  if (perm_.size() != size_ || pos_ + m > perm_.size()) {
    perm_.resize(size_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    std::shuffle(perm_.begin(), perm_.end(), rng.engine());
    pos_ = 0;
  }
  std::vector<std::size_t> batch(perm_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                 perm_.begin() + static_cast<std::ptrdiff_t>(pos_ + m));
  pos_ += m;
  return batch;
}

void BatchSampler::Restore(std::size_t dataset_size, std::vector<std::size_t> perm,
                           std::size_t pos) {
  if (!perm.empty() && (perm.size() != dataset_size || pos > perm.size())) {
    throw FormatError("inconsistent batch sampler state");
  }
  size_ = dataset_size;
  perm_ = std::move(perm);
  pos_ = pos;
}

double DefaultGradientBound(const NetworkSpec& disc, double c_p, double data_norm_bound) {
  const DataBound data{data_norm_bound};
  return std::max(NetworkCg(disc, c_p, data, /*with_bias=*/true),
                  PropagatedGradientBound(disc, c_p, data, /*include_bias=*/true));
}

TrainerState InitTrainer(const TrainConfig& config, const RecordMatrix& data,
                         const NetworkSpec& disc_spec, const NetworkSpec& gen_spec) {
  config.Validate(disc_spec, gen_spec, data.rows());
  TrainerState s;
  s.disc_spec = disc_spec;
  s.gen_spec = gen_spec;
  s.disc = ZeroParameters(disc_spec);
  s.gen = ZeroParameters(gen_spec);

  Rng init(DeriveSeed(config.seed, kInitStream));
  for (auto& w : s.disc.weights) {
    for (double& v : w.values()) v = init.Uniform(-config.c_p, config.c_p);
  }
  for (auto& w : s.gen.weights) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (double& v : w.values()) v = init.Uniform(-limit, limit);
  }

  s.disc_opt = MakeRmspropState(disc_spec, config.rmsprop_decay, config.rmsprop_epsilon);
  s.gen_opt = MakeRmspropState(gen_spec, config.rmsprop_decay, config.rmsprop_epsilon);
  s.ledger = MomentsLedger(config.SamplingRatio(data.rows()), config.sigma_n);
  s.rng = Rng(DeriveSeed(config.seed, kTrainStream));
  s.sampler = BatchSampler(data.rows());
  // Fake samples are critic inputs too: sigmoid outputs have norm <= sqrt(width).
  const double data_bound =
      std::max(data.norm_bound().value_or(data.MaxRowNorm()),
               std::sqrt(static_cast<double>(gen_spec.output_width())));
  s.c_g = config.c_g > 0.0 ? config.c_g
                           : DefaultGradientBound(disc_spec, config.c_p, data_bound);
  return s;
}

GradientSet PerExampleCriticGrad(const NetworkSpec& disc_spec, const ParameterSet& disc,
                                 const NetworkSpec& gen_spec, const ParameterSet& gen,
                                 std::span<const double> x, std::span<const double> z,
                                 LossKind loss) {
  const std::vector<double> fake = Evaluate(gen_spec, gen, z);
  if (loss == LossKind::kWasserstein) return DifferenceGradient(disc_spec, disc, x, fake);

  // grad_w [log sigmoid(f(x)) + log(1 - sigmoid(f(fake)))]
  const auto fx = Forward(disc_spec, disc, x);
  const auto ff = Forward(disc_spec, disc, fake);
  const std::vector<double> seed_x{1.0 - Sigmoid(fx.output[0])};
  const std::vector<double> seed_f{-Sigmoid(ff.output[0])};
  GradientSet g = Backward(disc_spec, disc, fx.trace, seed_x);
  AddInPlace(g, Backward(disc_spec, disc, ff.trace, seed_f));
  g.RecomputeNorm();
  return g;
}

GradientSet NoisyBatchGrad(std::span<const GradientSet> per_example, double sigma_n,
                           double c_g, GaussianSource& noise) {
  if (per_example.empty()) throw InvalidArgument("noisy batch gradient of an empty batch");
  if (!(sigma_n >= 0.0) || !(c_g >= 0.0)) {
    throw InvalidArgument("sigma_n and c_g must be nonnegative");
  }
  std::vector<double> sum = Flatten(per_example[0]);
  for (std::size_t i = 1; i < per_example.size(); ++i) {
    const std::vector<double> g = Flatten(per_example[i]);
    if (g.size() != sum.size()) throw InvalidArgument("per-example gradient shapes differ");
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += g[k];
  }
  const double scale = sigma_n * c_g;
  if (scale > 0.0) {
    for (double& v : sum) v += scale * noise.NextGaussian();
  }
  const double inv_m = 1.0 / static_cast<double>(per_example.size());
  for (double& v : sum) v *= inv_m;
  GradientSet out = per_example[0];
  Unflatten(sum, out);
  return out;
}

void CriticIteration(TrainerState& state, const RecordMatrix& data,
                     const TrainConfig& config, GaussianSource* noise) {
  const std::size_t m = config.batch_size;
  const LatentSampler latent{config.latent_dim};
  std::vector<std::vector<double>> zs(m);
  for (auto& z : zs) z = latent.Sample(state.rng);
  const std::vector<std::size_t> batch = state.sampler.Next(m, state.rng);

  std::vector<GradientSet> per_example;
  per_example.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    GradientSet g = PerExampleCriticGrad(state.disc_spec, state.disc, state.gen_spec,
                                         state.gen, data.row(batch[i]), zs[i], config.loss);
    if (config.l2 > 0.0) {
      // Ascent direction: d/dw [-(l2/2)||w||^2] = -l2 w.
      for (std::size_t l = 0; l < g.weight_grads.size(); ++l) {
        auto& gw = g.weight_grads[l].values();
        const auto& w = state.disc.weights[l].values();
        for (std::size_t k = 0; k < gw.size(); ++k) gw[k] -= config.l2 * w[k];
      }
      g.RecomputeNorm();
    }
    state.max_per_example_norm = std::max(state.max_per_example_norm, g.norm);
    if (config.check_grad_bound && g.norm > state.c_g) {
      throw PreconditionError("per-example gradient norm " + std::to_string(g.norm) +
                              " exceeds c_g = " + std::to_string(state.c_g) +
                              " at critic step " + std::to_string(state.critic_steps));
    }
    per_example.push_back(std::move(g));
  }
  GaussianSource& source = noise != nullptr ? *noise : state.rng;
  const GradientSet mean = NoisyBatchGrad(per_example, config.sigma_n, state.c_g, source);
  RmspropStep(state.disc, mean, state.disc_opt, config.alpha_d, StepDirection::kAscent);
  ClipWeights(state.disc, config.c_p);
  state.ledger.RecordStep();
  ++state.critic_steps;
  if (!AllFinite(state.disc)) {
    throw NumericError("discriminator parameters became non-finite at generator iteration " +
                           std::to_string(state.generator_iteration),
                       static_cast<long long>(state.generator_iteration));
  }
}

GradientSet GeneratorGrad(const NetworkSpec& disc_spec, const ParameterSet& disc,
                          const NetworkSpec& gen_spec, const ParameterSet& gen,
                          std::span<const std::vector<double>> zs, LossKind loss) {
  if (zs.empty()) throw InvalidArgument("generator gradient of an empty batch");
  const double inv_m = 1.0 / static_cast<double>(zs.size());
  GradientSet total = ZeroGradients(gen_spec);
  for (const auto& z : zs) {
    const auto gen_pass = Forward(gen_spec, gen, z);
    const auto disc_pass = Forward(disc_spec, disc, gen_pass.output);
    // Loss per sample: -f(G(z)) for WGAN, log(1 - sigmoid(f(G(z)))) for minimax.
    const double dloss_df =
        loss == LossKind::kWasserstein ? -1.0 : -Sigmoid(disc_pass.output[0]);
    const std::vector<double> seed{dloss_df * inv_m};
    std::vector<double> dfake;
    Backward(disc_spec, disc, disc_pass.trace, seed, &dfake);
    AddInPlace(total, Backward(gen_spec, gen, gen_pass.trace, dfake));
  }
  total.RecomputeNorm();
  return total;
}

void GeneratorIteration(TrainerState& state, const TrainConfig& config) {
  const LatentSampler latent{config.latent_dim};
  std::vector<std::vector<double>> zs(config.batch_size);
  for (auto& z : zs) z = latent.Sample(state.rng);
  const GradientSet total = GeneratorGrad(state.disc_spec, state.disc, state.gen_spec,
                                          state.gen, zs, config.loss);
  RmspropStep(state.gen, total, state.gen_opt, config.alpha_g, StepDirection::kDescent);
  if (!AllFinite(state.gen)) {
    throw NumericError("generator parameters became non-finite at generator iteration " +
                           std::to_string(state.generator_iteration + 1),
                       static_cast<long long>(state.generator_iteration + 1));
  }
}

double LoggedWassersteinEstimate(const TrainerState& state, const RecordMatrix& data,
                                 const TrainConfig& config) {
  Rng rng(DeriveSeed(config.seed, kLogStreamBase + state.generator_iteration));
  const std::size_t n = config.eval_batch;
  Matrix real(n, data.cols());
  Matrix fake(n, data.cols());
  const LatentSampler latent{config.latent_dim};
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = data.row(rng.Index(data.rows()));
    std::copy(src.begin(), src.end(), real.row(i).begin());
    const auto g = Evaluate(state.gen_spec, state.gen, latent.Sample(rng));
    std::copy(g.begin(), g.end(), fake.row(i).begin());
  }
  return WassersteinEstimate(state.disc_spec, state.disc, real, fake);
}

void RunTraining(TrainerState& state, const RecordMatrix& data,
                 const TrainConfig& config, const TrainHooks& hooks) {
  const auto start = std::chrono::steady_clock::now();
  while (state.generator_iteration < config.n_g) {
    for (int t = 0; t < config.n_d; ++t) CriticIteration(state, data, config);
    GeneratorIteration(state, config);
    ++state.generator_iteration;
    if (state.generator_iteration % config.log_every == 0) {
      MetricRow row;
      row.generator_iteration = state.generator_iteration;
      row.wasserstein_estimate = LoggedWassersteinEstimate(state, data, config);
      if (!std::isfinite(row.wasserstein_estimate)) {
        throw NumericError("non-finite Wasserstein estimate at generator iteration " +
                               std::to_string(state.generator_iteration),
                           static_cast<long long>(state.generator_iteration));
      }
      row.epsilon_spent = state.ledger.Epsilon(config.delta);
      row.wallclock_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      state.log.Append(row);
    }
    if (hooks.after_generator_iteration) hooks.after_generator_iteration(state);
  }
}

TrainResult Train(const TrainConfig& config, const RecordMatrix& data,
                  const NetworkSpec& disc_spec, const NetworkSpec& gen_spec,
                  const TrainHooks& hooks) {
  TrainerState state = InitTrainer(config, data, disc_spec, gen_spec);
  RunTraining(state, data, config, hooks);
  TrainResult r{state.gen, state.log, std::move(state)};
  return r;
}

RecordMatrix GenerateSamples(const NetworkSpec& gen_spec, const ParameterSet& gen,
                             std::size_t n, std::uint64_t seed) {
  const LatentSampler latent{gen_spec.input_width()};
  Rng rng(seed);
  Matrix out(n, gen_spec.output_width());
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = Evaluate(gen_spec, gen, latent.Sample(rng));
    std::copy(g.begin(), g.end(), out.row(i).begin());
  }
  return RecordMatrix(std::move(out), RecordKind::kContinuous);
}

}  // namespace dpgan
