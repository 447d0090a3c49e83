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

#ifndef DPGAN_CORE_BOUNDS_H_
#define DPGAN_CORE_BOUNDS_H_

// Analytical bound on the per-example critic gradient norm implied by weight
// clipping, and a randomized harness that tries to falsify it.
//
// With every discriminator parameter in [-c_p, c_p], activations bounded by
// B_sigma with derivatives bounded by B_sigma', and
//   c_p <= 1 / (m_k B_sigma')   for every non-input layer k,
// the per-example gradient of f_w(x) - f_w(G(z)) is claimed to satisfy
//   ||g_w|| <= c_g = 2 c_p B_sigma B_sigma'^2 sum_{k=1}^{H-1} m_k m_{k+1}.
//
// Activation table (B_sigma, B_sigma'):
//   sigmoid          (1, 1/4)
//   tanh             (1, 1)
//   relu             (unbounded, 1)
//   leaky_relu(s<1)  (unbounded, 1)
//   identity         (unbounded, 1)
// Unbounded ranges are replaced by an interval-propagated bound on the layer
// outputs, which is finite because inputs and weights are bounded.

#include <cstdint>
#include <limits>
#include <optional>

#include "core/rng.h"
#include "core/tensor.h"

namespace dpgan {

struct ActivationBounds {
  // +infinity when the activation range is unbounded.
  double b_sigma = std::numeric_limits<double>::infinity();
  double b_sigma_prime = 1.0;

  bool bounded() const { return b_sigma < std::numeric_limits<double>::infinity(); }
};

ActivationBounds BoundsFor(const Activation& act);

// B_sigma is the largest range bound over hidden layers (the inputs of layers
// 2..H); B_sigma' is the largest derivative bound over all layers.
ActivationBounds NetworkBounds(const NetworkSpec& spec);

struct DataBound {
  double b_x = 1.0;
};

struct PreconditionResult {
  bool pass = true;
  // 1-based index of the first layer k with c_p > 1/(m_k B_sigma'); 0 on pass.
  std::size_t failing_layer = 0;
  double limit = std::numeric_limits<double>::infinity();
};

PreconditionResult CheckClipPrecondition(const NetworkSpec& spec, double c_p,
                                         const ActivationBounds& bounds);

// Interval propagation of |a^(l)| <= c_p (m_{l-1} |a^(l-1)| + bias) from
// |x| <= b_x, clamped by each activation's own range. Returns the largest
// hidden-layer bound (0 for single-layer networks).
double EffectiveBSigma(const NetworkSpec& spec, double c_p, const DataBound& data,
                       bool include_bias = true);

// 2 c_p B_sigma B_sigma'^2 sum_{k=1}^{H-1} m_k m_{k+1}. B_sigma comes from
// `bounds` when finite and from `effective_b_sigma` otherwise; throws
// PreconditionError when neither is available.
double ComputeCg(const NetworkSpec& spec, double c_p, const ActivationBounds& bounds,
                 std::optional<double> effective_b_sigma = std::nullopt);

// ComputeCg plus 2 c_p B_sigma B_sigma' sum_{k=1}^{H} m_k, covering bias
// gradients.
double ComputeCgWithBias(const NetworkSpec& spec, double c_p,
                         const ActivationBounds& bounds,
                         std::optional<double> effective_b_sigma = std::nullopt);

// Convenience: network bounds, effective B_sigma from `data`, then ComputeCg.
double NetworkCg(const NetworkSpec& spec, double c_p, const DataBound& data,
                 bool with_bias = false);

// Bound on ||grad_w [f_w(x) - f_w(x')]|| for ||x||, ||x'|| <= b_x and every
// parameter in [-c_p, c_p], by propagating per-layer norm bounds of the
// activations, their differences and the error vectors through
// ||W^(l)||_2 <= c_p sqrt(m_l m_{l-1}). Holds without the clip precondition.
double PropagatedGradientBound(const NetworkSpec& spec, double c_p, const DataBound& data,
                               bool include_bias = false);

struct GradBoundOptions {
  bool include_biases = false;
  // Width of the latent vector fed to the random sigmoid generator that
  // produces the fake sample of each trial.
  std::size_t latent_dim = 4;
};

struct GradBoundResult {
  double max_norm = 0.0;
  std::uint64_t trials = 0;
};

// Each trial draws parameters uniform on [-c_p, c_p], a real record uniform on
// [0, 1]^m_0 shrunk onto the b_x ball when longer, and a fake record
// sigmoid(A z + c) from a random generator with z uniform on [-1, 1]^latent.
// Returns the largest ||grad_w [f_w(x) - f_w(fake)]|| observed (weights only
// unless include_biases).
GradBoundResult EmpiricalGradBound(const NetworkSpec& spec, double c_p,
                                   std::uint64_t n_trials, const DataBound& data,
                                   Rng& rng, const GradBoundOptions& options = {});

}  // namespace dpgan

#endif  // DPGAN_CORE_BOUNDS_H_
