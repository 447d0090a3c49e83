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

#include "core/bounds.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/errors.h"

namespace dpgan {

ActivationBounds BoundsFor(const Activation& act) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (act.kind) {
    case ActivationKind::kSigmoid:
      return {1.0, 0.25};
    case ActivationKind::kTanh:
      return {1.0, 1.0};
    case ActivationKind::kRelu:
      return {kInf, 1.0};
    case ActivationKind::kLeakyRelu:
      return {kInf, std::max(1.0, act.slope)};
    case ActivationKind::kIdentity:
      return {kInf, 1.0};
  }
  return {kInf, 1.0};
}

ActivationBounds NetworkBounds(const NetworkSpec& spec) {
  spec.Validate();
  ActivationBounds out{0.0, 0.0};
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    const ActivationBounds b = BoundsFor(spec.activations[l]);
    out.b_sigma_prime = std::max(out.b_sigma_prime, b.b_sigma_prime);
    if (l + 1 < spec.depth()) out.b_sigma = std::max(out.b_sigma, b.b_sigma);
  }
  return out;
}

PreconditionResult CheckClipPrecondition(const NetworkSpec& spec, double c_p,
                                         const ActivationBounds& bounds) {
  spec.Validate();
  PreconditionResult r;
  for (std::size_t k = 1; k < spec.layer_widths.size(); ++k) {
    const double limit =
        1.0 / (static_cast<double>(spec.layer_widths[k]) * bounds.b_sigma_prime);
    r.limit = std::min(r.limit, limit);
    if (r.pass && c_p > limit) {
      r.pass = false;
      r.failing_layer = k;
    }
  }
  return r;
}

double EffectiveBSigma(const NetworkSpec& spec, double c_p, const DataBound& data,
                       bool include_bias) {
  spec.Validate();
  double prev = data.b_x;
  double largest = 0.0;
  for (std::size_t l = 0; l + 1 < spec.depth(); ++l) {
    const double fan_in = static_cast<double>(spec.layer_widths[l]);
    // |z_i| <= sum_j |W_ij| |a_j| + |b_i|; every activation here is
    // 1-Lipschitz through the origin up to its own range.
    double bound = c_p * (fan_in * prev + (include_bias ? 1.0 : 0.0));
    const ActivationBounds own = BoundsFor(spec.activations[l]);
    if (spec.activations[l].kind == ActivationKind::kSigmoid) {
      bound = 1.0;
    } else {
      bound = std::min(bound, own.b_sigma);
    }
    largest = std::max(largest, bound);
    prev = bound;
  }
  return largest;
}

namespace {

double ResolveBSigma(const ActivationBounds& bounds,
                     std::optional<double> effective_b_sigma) {
  if (bounds.bounded()) return bounds.b_sigma;
  if (effective_b_sigma && std::isfinite(*effective_b_sigma)) return *effective_b_sigma;
  throw PreconditionError(
      "activation range is unbounded and no data bound was supplied to derive "
      "an effective B_sigma");
}

}  // namespace

double ComputeCg(const NetworkSpec& spec, double c_p, const ActivationBounds& bounds,
                 std::optional<double> effective_b_sigma) {
  spec.Validate();
  if (!(c_p >= 0.0)) throw InvalidArgument("clip constant must be nonnegative");
  const double b_sigma = ResolveBSigma(bounds, effective_b_sigma);
  double pair_sum = 0.0;
  const auto& m = spec.layer_widths;
  for (std::size_t k = 1; k + 1 < m.size(); ++k) {
    pair_sum += static_cast<double>(m[k]) * static_cast<double>(m[k + 1]);
  }
  return 2.0 * c_p * b_sigma * bounds.b_sigma_prime * bounds.b_sigma_prime * pair_sum;
}

double ComputeCgWithBias(const NetworkSpec& spec, double c_p,
                         const ActivationBounds& bounds,
                         std::optional<double> effective_b_sigma) {
  const double base = ComputeCg(spec, c_p, bounds, effective_b_sigma);
  const double b_sigma = ResolveBSigma(bounds, effective_b_sigma);
  double width_sum = 0.0;
  for (std::size_t k = 1; k < spec.layer_widths.size(); ++k) {
    width_sum += static_cast<double>(spec.layer_widths[k]);
  }
  return base + 2.0 * c_p * b_sigma * bounds.b_sigma_prime * width_sum;
}

double NetworkCg(const NetworkSpec& spec, double c_p, const DataBound& data,
                 bool with_bias) {
  const ActivationBounds bounds = NetworkBounds(spec);
  const double eff = EffectiveBSigma(spec, c_p, data, with_bias);
  return with_bias ? ComputeCgWithBias(spec, c_p, bounds, eff)
                   : ComputeCg(spec, c_p, bounds, eff);
}

namespace {

struct DerivativeShape {
  // max sigma' - min sigma'.
  double range = 0.0;
  // Lipschitz constant of sigma'; infinite when sigma' jumps.
  double lipschitz = 0.0;
};

DerivativeShape ShapeFor(const Activation& act) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (act.kind) {
    case ActivationKind::kSigmoid:
      return {0.25, 1.0 / (6.0 * std::sqrt(3.0))};
    case ActivationKind::kTanh:
      return {1.0, 4.0 / (3.0 * std::sqrt(3.0))};
    case ActivationKind::kRelu:
      return {1.0, kInf};
    case ActivationKind::kLeakyRelu:
      return {std::abs(1.0 - act.slope), act.slope == 1.0 ? 0.0 : kInf};
    case ActivationKind::kIdentity:
      return {0.0, 0.0};
  }
  return {1.0, kInf};
}

}  // namespace

double PropagatedGradientBound(const NetworkSpec& spec, double c_p, const DataBound& data,
                               bool include_bias) {
  spec.Validate();
  if (!(c_p >= 0.0)) throw InvalidArgument("clip constant must be nonnegative");
  if (!(data.b_x >= 0.0)) throw InvalidArgument("data bound must be nonnegative");
  const std::size_t depth = spec.depth();
  const auto& m = spec.layer_widths;
  const double bias = include_bias ? 1.0 : 0.0;
  auto op_norm = [&](std::size_t l) {  // bound on ||W^(l)||_2, l 1-based
    return c_p * std::sqrt(static_cast<double>(m[l]) * static_cast<double>(m[l - 1]));
  };

  // Forward: a = activation norm, da = ||a - a'||, dz = ||z - z'||.
  std::vector<double> a(depth + 1), da(depth + 1), dz(depth + 1, 0.0);
  a[0] = data.b_x;
  da[0] = 2.0 * data.b_x;
  for (std::size_t l = 1; l <= depth; ++l) {
    const Activation& act = spec.activations[l - 1];
    const double width = std::sqrt(static_cast<double>(m[l]));
    const double z = op_norm(l) * a[l - 1] + bias * c_p * width;
    const double lip = BoundsFor(act).b_sigma_prime;
    dz[l] = op_norm(l) * da[l - 1];
    switch (act.kind) {
      case ActivationKind::kSigmoid:
        a[l] = std::min(width, 0.5 * width + 0.25 * z);
        da[l] = std::min({width, 2.0 * a[l], lip * dz[l]});
        break;
      case ActivationKind::kTanh:
        a[l] = std::min(width, z);
        da[l] = std::min({2.0 * width, 2.0 * a[l], lip * dz[l]});
        break;
      default:
        a[l] = lip * z;
        da[l] = std::min(2.0 * a[l], lip * dz[l]);
        break;
    }
  }

  // Backward: d = ||delta^(l)||, e = ||delta^(l) - delta'^(l)||.
  std::vector<double> d(depth + 1), e(depth + 1);
  auto jacobian_gap = [&](std::size_t l) {
    const DerivativeShape shape = ShapeFor(spec.activations[l - 1]);
    return std::isfinite(shape.lipschitz) ? std::min(shape.range, shape.lipschitz * dz[l])
                                          : shape.range;
  };
  d[depth] = BoundsFor(spec.activations[depth - 1]).b_sigma_prime;
  e[depth] = jacobian_gap(depth);
  for (std::size_t l = depth - 1; l >= 1; --l) {
    const double lip = BoundsFor(spec.activations[l - 1]).b_sigma_prime;
    d[l] = lip * op_norm(l + 1) * d[l + 1];
    e[l] = std::min(2.0 * d[l], lip * op_norm(l + 1) * e[l + 1] +
                                    jacobian_gap(l) * op_norm(l + 1) * d[l + 1]);
  }

  // grad W = delta (a - a')^T + (delta - delta') a'^T, grad b = delta - delta'.
  double sq = 0.0;
  for (std::size_t l = 1; l <= depth; ++l) {
    const double w = d[l] * da[l - 1] + e[l] * a[l - 1];
    sq += w * w + bias * e[l] * e[l];
  }
  return std::sqrt(sq);
}

GradBoundResult EmpiricalGradBound(const NetworkSpec& spec, double c_p,
                                   std::uint64_t n_trials, const DataBound& data,
                                   Rng& rng, const GradBoundOptions& options) {
  spec.Validate();
  if (spec.output_width() != 1) {
    throw InvalidArgument("discriminator output width must be 1");
  }
  if (!(c_p >= 0.0)) throw InvalidArgument("clip constant must be nonnegative");
  const std::size_t dim = spec.input_width();
  const std::size_t latent = std::max<std::size_t>(1, options.latent_dim);
  GradBoundResult result;
  ParameterSet params = ZeroParameters(spec);
  std::vector<double> x(dim), fake(dim), z(latent);
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    for (auto& w : params.weights) {
      for (double& v : w.values()) v = c_p > 0.0 ? rng.Uniform(-c_p, c_p) : 0.0;
    }
    for (auto& b : params.biases) {
      for (double& v : b) {
        v = (options.include_biases && c_p > 0.0) ? rng.Uniform(-c_p, c_p) : 0.0;
      }
    }
    double sq = 0.0;
    for (double& v : x) {
      v = rng.Uniform(0.0, 1.0);
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm > data.b_x) {
      for (double& v : x) v *= data.b_x / norm;
    }
    for (double& v : z) v = rng.Uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < dim; ++i) {
      double pre = rng.NextGaussian();
      for (double zj : z) pre += rng.NextGaussian() * zj;
      fake[i] = 1.0 / (1.0 + std::exp(-pre));
    }
    const GradientSet g = DifferenceGradient(spec, params, x, fake);
    const double n = options.include_biases ? g.norm : g.WeightOnlyNorm();
    result.max_norm = std::max(result.max_norm, n);
    ++result.trials;
  }
  return result;
}

}  // namespace dpgan
