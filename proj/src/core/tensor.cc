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

#include "core/tensor.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace dpgan {

std::vector<double> MatVec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) {
    throw InvalidArgument("MatVec: vector length " + std::to_string(x.size()) +
                          " does not match " + std::to_string(a.cols()) +
                          " columns");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> MatTVec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) {
    throw InvalidArgument("MatTVec: vector length " + std::to_string(x.size()) +
                          " does not match " + std::to_string(a.rows()) +
                          " rows");
  }
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * xi;
  }
  return y;
}

double Activation::Apply(double z) const {
  switch (kind) {
    case ActivationKind::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case ActivationKind::kTanh:
      return std::tanh(z);
    case ActivationKind::kRelu:
      return z > 0.0 ? z : 0.0;
    case ActivationKind::kLeakyRelu:
      return z > 0.0 ? z : slope * z;
    case ActivationKind::kIdentity:
      return z;
  }
  return z;
}

double Activation::Derivative(double z) const {
  switch (kind) {
    case ActivationKind::kSigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case ActivationKind::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case ActivationKind::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case ActivationKind::kLeakyRelu:
      return z > 0.0 ? 1.0 : slope;
    case ActivationKind::kIdentity:
      return 1.0;
  }
  return 1.0;
}

Activation ParseActivation(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (c != ' ' && c != '\t') text.push_back(c == '-' ? '_' : c);
  }
  if (text == "sigmoid") return {ActivationKind::kSigmoid};
  if (text == "tanh") return {ActivationKind::kTanh};
  if (text == "relu") return {ActivationKind::kRelu};
  if (text == "identity" || text == "linear") return {ActivationKind::kIdentity};
  if (text.rfind("leaky_relu", 0) == 0) {
    Activation act{ActivationKind::kLeakyRelu, 0.2};
    const auto open = text.find('(');
    if (open != std::string::npos) {
      const auto close = text.find(')', open);
      if (close == std::string::npos) {
        throw InvalidArgument("unterminated leaky_relu slope: " + raw);
      }
      try {
        act.slope = std::stod(text.substr(open + 1, close - open - 1));
      } catch (const std::exception&) {
        throw InvalidArgument("bad leaky_relu slope: " + raw);
      }
    } else if (text != "leaky_relu") {
      throw InvalidArgument("unknown activation: " + raw);
    }
    if (!(act.slope >= 0.0) || act.slope > 1.0) {
      throw InvalidArgument("leaky_relu slope must lie in [0, 1]: " + raw);
    }
    return act;
  }
  throw InvalidArgument("unknown activation: " + raw);
}

std::string ActivationName(const Activation& act) {
  switch (act.kind) {
    case ActivationKind::kSigmoid:
      return "sigmoid";
    case ActivationKind::kTanh:
      return "tanh";
    case ActivationKind::kRelu:
      return "relu";
    case ActivationKind::kLeakyRelu: {
      // Shortest text that parses back to the same slope.
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof(buf), act.slope);
      return "leaky_relu(" + std::string(buf, res.ptr) + ")";
    }
    case ActivationKind::kIdentity:
      return "identity";
  }
  return "identity";
}

void NetworkSpec::Validate() const {
  if (layer_widths.size() < 2) {
    throw InvalidArgument("network needs an input width and at least one layer");
  }
  if (activations.size() + 1 != layer_widths.size()) {
    throw InvalidArgument("network has " + std::to_string(layer_widths.size()) +
                          " widths but " + std::to_string(activations.size()) +
                          " activations; expected one per non-input layer");
  }
  for (std::size_t w : layer_widths) {
    if (w == 0) throw InvalidArgument("layer widths must be positive");
  }
}

NetworkSpec MakeSpec(std::vector<std::size_t> widths, Activation hidden,
                     Activation output) {
  NetworkSpec spec;
  spec.layer_widths = std::move(widths);
  const std::size_t h = spec.layer_widths.size() - 1;
  for (std::size_t l = 0; l + 1 < h; ++l) spec.activations.push_back(hidden);
  spec.activations.push_back(output);
  spec.Validate();
  return spec;
}

std::size_t ParameterSet::NumParameters() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

double ParameterSet::MaxAbs() const {
  double m = 0.0;
  for (const auto& w : weights) {
    for (double v : w.values()) m = std::max(m, std::abs(v));
  }
  for (const auto& b : biases) {
    for (double v : b) m = std::max(m, std::abs(v));
  }
  return m;
}

ParameterSet ZeroParameters(const NetworkSpec& spec) {
  spec.Validate();
  ParameterSet p;
  for (std::size_t l = 1; l < spec.layer_widths.size(); ++l) {
    p.weights.emplace_back(spec.layer_widths[l], spec.layer_widths[l - 1]);
    p.biases.emplace_back(spec.layer_widths[l], 0.0);
  }
  return p;
}

void GradientSet::RecomputeNorm() {
  double s = 0.0;
  for (const auto& w : weight_grads) {
    for (double v : w.values()) s += v * v;
  }
  for (const auto& b : bias_grads) {
    for (double v : b) s += v * v;
  }
  norm = std::sqrt(s);
}

double GradientSet::WeightOnlyNorm() const {
  double s = 0.0;
  for (const auto& w : weight_grads) {
    for (double v : w.values()) s += v * v;
  }
  return std::sqrt(s);
}

GradientSet ZeroGradients(const NetworkSpec& spec) {
  ParameterSet p = ZeroParameters(spec);
  GradientSet g;
  g.weight_grads = std::move(p.weights);
  g.bias_grads = std::move(p.biases);
  return g;
}

namespace {

template <typename Weights, typename Biases>
std::vector<double> FlattenImpl(const Weights& weights, const Biases& biases) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].values().begin(), weights[l].values().end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

template <typename Weights, typename Biases>
void UnflattenImpl(std::span<const double> flat, Weights& weights, Biases& biases) {
  std::size_t expected = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    expected += weights[l].size() + biases[l].size();
  }
  if (flat.size() != expected) {
    throw InvalidArgument("flattened length " + std::to_string(flat.size()) +
                          " does not match parameter count " +
                          std::to_string(expected));
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& v : weights[l].values()) v = flat[k++];
    for (double& v : biases[l]) v = flat[k++];
  }
}

void CheckShapes(const NetworkSpec& spec, const ParameterSet& params) {
  spec.Validate();
  const std::size_t h = spec.depth();
  if (params.weights.size() != h || params.biases.size() != h) {
    throw InvalidArgument("parameter set has the wrong number of layers");
  }
  for (std::size_t l = 0; l < h; ++l) {
    if (params.weights[l].rows() != spec.layer_widths[l + 1] ||
        params.weights[l].cols() != spec.layer_widths[l] ||
        params.biases[l].size() != spec.layer_widths[l + 1]) {
      throw InvalidArgument("parameter shapes do not match layer " +
                            std::to_string(l + 1));
    }
  }
}

}  // namespace

std::vector<double> Flatten(const GradientSet& grads) {
  return FlattenImpl(grads.weight_grads, grads.bias_grads);
}
std::vector<double> Flatten(const ParameterSet& params) {
  return FlattenImpl(params.weights, params.biases);
}
void Unflatten(std::span<const double> flat, GradientSet& grads) {
  UnflattenImpl(flat, grads.weight_grads, grads.bias_grads);
  grads.RecomputeNorm();
}
void Unflatten(std::span<const double> flat, ParameterSet& params) {
  UnflattenImpl(flat, params.weights, params.biases);
}

ForwardResult Forward(const NetworkSpec& spec, const ParameterSet& params,
                      std::span<const double> input) {
  CheckShapes(spec, params);
  if (input.size() != spec.input_width()) {
    throw InvalidArgument("input length " + std::to_string(input.size()) +
                          " does not match network input width " +
                          std::to_string(spec.input_width()));
  }
  ForwardResult r;
  r.trace.input.assign(input.begin(), input.end());
  std::span<const double> a = r.trace.input;
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    std::vector<double> z = MatVec(params.weights[l], a);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += params.biases[l][i];
      out[i] = spec.activations[l].Apply(z[i]);
    }
    r.trace.pre_activations.push_back(std::move(z));
    r.trace.post_activations.push_back(std::move(out));
    a = r.trace.post_activations.back();
  }
  r.output = r.trace.post_activations.back();
  return r;
}

std::vector<double> Evaluate(const NetworkSpec& spec, const ParameterSet& params,
                             std::span<const double> input) {
  return Forward(spec, params, input).output;
}

std::vector<std::vector<double>> ErrorVectors(const NetworkSpec& spec,
                                              const ParameterSet& params,
                                              const ActivationTrace& trace,
                                              std::span<const double> output_grad) {
  CheckShapes(spec, params);
  const std::size_t h = spec.depth();
  if (trace.pre_activations.size() != h) {
    throw InvalidArgument("trace depth does not match network depth");
  }
  if (output_grad.size() != spec.output_width()) {
    throw InvalidArgument("output gradient length does not match output width");
  }
  std::vector<std::vector<double>> delta(h);
  // delta^(H) = grad_a C (.) sigma'(z^(H))
  delta[h - 1].resize(output_grad.size());
  for (std::size_t i = 0; i < output_grad.size(); ++i) {
    delta[h - 1][i] =
        output_grad[i] * spec.activations[h - 1].Derivative(trace.pre_activations[h - 1][i]);
  }
  // delta^(l) = ((W^(l+1))^T delta^(l+1)) (.) sigma'(z^(l))
  for (std::size_t l = h - 1; l-- > 0;) {
    delta[l] = MatTVec(params.weights[l + 1], delta[l + 1]);
    for (std::size_t i = 0; i < delta[l].size(); ++i) {
      delta[l][i] *= spec.activations[l].Derivative(trace.pre_activations[l][i]);
    }
  }
  return delta;
}

GradientSet Backward(const NetworkSpec& spec, const ParameterSet& params,
                     const ActivationTrace& trace,
                     std::span<const double> output_grad,
                     std::vector<double>* input_grad) {
  const auto delta = ErrorVectors(spec, params, trace, output_grad);
  GradientSet g = ZeroGradients(spec);
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    std::span<const double> prev =
        l == 0 ? std::span<const double>(trace.input) : trace.post_activations[l - 1];
    Matrix& gw = g.weight_grads[l];
    // dC/dW_jk = a_k^(l-1) delta_j^(l)
    for (std::size_t j = 0; j < gw.rows(); ++j) {
      auto r = gw.row(j);
      const double d = delta[l][j];
      for (std::size_t k = 0; k < r.size(); ++k) r[k] = d * prev[k];
    }
    g.bias_grads[l] = delta[l];
  }
  if (input_grad != nullptr) *input_grad = MatTVec(params.weights[0], delta[0]);
  g.RecomputeNorm();
  return g;
}

GradientSet DifferenceGradient(const NetworkSpec& spec, const ParameterSet& params,
                               std::span<const double> a, std::span<const double> b) {
  if (spec.output_width() != 1) {
    throw InvalidArgument("difference gradient needs a scalar-output network");
  }
  const std::vector<double> seed{1.0};
  const auto fa = Forward(spec, params, a);
  const auto fb = Forward(spec, params, b);
  GradientSet g = Backward(spec, params, fa.trace, seed);
  const GradientSet gb = Backward(spec, params, fb.trace, seed);
  for (std::size_t l = 0; l < g.weight_grads.size(); ++l) {
    auto& w = g.weight_grads[l].values();
    const auto& wb = gb.weight_grads[l].values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= wb[i];
    for (std::size_t i = 0; i < g.bias_grads[l].size(); ++i) {
      g.bias_grads[l][i] -= gb.bias_grads[l][i];
    }
  }
  g.RecomputeNorm();
  return g;
}

RmspropState MakeRmspropState(const NetworkSpec& spec, double decay,
                              double epsilon_stabilizer) {
  if (!(decay > 0.0 && decay < 1.0)) {
    throw InvalidArgument("RMSProp decay must lie in (0, 1)");
  }
  if (!(epsilon_stabilizer > 0.0)) {
    throw InvalidArgument("RMSProp stabilizer must be positive");
  }
  RmspropState s;
  s.running_sq_avg.assign(ZeroParameters(spec).NumParameters(), 0.0);
  s.decay = decay;
  s.epsilon_stabilizer = epsilon_stabilizer;
  return s;
}

void RmspropStep(ParameterSet& params, const GradientSet& grads,
                 RmspropState& state, double lr, StepDirection direction) {
  std::vector<double> p = Flatten(params);
  const std::vector<double> g = Flatten(grads);
  if (p.size() != g.size() || state.running_sq_avg.size() != p.size()) {
    throw InvalidArgument("RMSProp: parameter, gradient and state sizes differ");
  }
  const double sign = direction == StepDirection::kAscent ? 1.0 : -1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double& v = state.running_sq_avg[i];
    v = state.decay * v + (1.0 - state.decay) * g[i] * g[i];
    p[i] += sign * lr * g[i] / std::sqrt(v + state.epsilon_stabilizer);
  }
  Unflatten(p, params);
}

void ClipWeights(ParameterSet& params, double c_p) {
  if (!(c_p > 0.0)) throw InvalidArgument("clip constant must be positive");
  // NaN passes through so the caller's finiteness check sees it.
  auto clamp = [c_p](double v) { return std::isnan(v) ? v : std::clamp(v, -c_p, c_p); };
  for (auto& w : params.weights) {
    for (double& v : w.values()) v = clamp(v);
  }
  for (auto& b : params.biases) {
    for (double& v : b) v = clamp(v);
  }
}

}  // namespace dpgan
