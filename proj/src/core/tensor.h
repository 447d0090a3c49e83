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

#ifndef DPGAN_CORE_TENSOR_H_
#define DPGAN_CORE_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/errors.h"

namespace dpgan {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = A x
std::vector<double> MatVec(const Matrix& a, std::span<const double> x);
// y = A^T x
std::vector<double> MatTVec(const Matrix& a, std::span<const double> x);

enum class ActivationKind { kSigmoid, kTanh, kRelu, kLeakyRelu, kIdentity };

struct Activation {
  ActivationKind kind = ActivationKind::kSigmoid;
  // Only meaningful for kLeakyRelu.
  double slope = 0.2;

  double Apply(double z) const;
  double Derivative(double z) const;
  bool operator==(const Activation&) const = default;
};

// Parses "sigmoid", "tanh", "relu", "leaky_relu", "leaky_relu(0.1)", "identity".
Activation ParseActivation(const std::string& text);
std::string ActivationName(const Activation& act);

// Fully-connected architecture. layer_widths[0] is the input width; layer l
// (1-based) maps m_{l-1} inputs to m_l outputs through activations[l-1].
struct NetworkSpec {
  std::vector<std::size_t> layer_widths;
  std::vector<Activation> activations;

  std::size_t depth() const { return activations.size(); }
  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t output_width() const { return layer_widths.back(); }

  // Throws InvalidArgument when the widths and activations disagree.
  void Validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

// Builds a spec with one activation for hidden layers and one for the output.
NetworkSpec MakeSpec(std::vector<std::size_t> widths, Activation hidden,
                     Activation output);

// W^(l) has shape m_l x m_{l-1}: entry (i, j) connects node j of layer l-1 to
// node i of layer l.
struct ParameterSet {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t NumParameters() const;
  double MaxAbs() const;
  bool operator==(const ParameterSet&) const = default;
};

ParameterSet ZeroParameters(const NetworkSpec& spec);

struct ActivationTrace {
  std::vector<double> input;
  // pre_activations[l] = z^(l+1), post_activations[l] = a^(l+1).
  std::vector<std::vector<double>> pre_activations;
  std::vector<std::vector<double>> post_activations;
};

struct GradientSet {
  std::vector<Matrix> weight_grads;
  std::vector<std::vector<double>> bias_grads;
  double norm = 0.0;

  void RecomputeNorm();
  double WeightOnlyNorm() const;
  bool operator==(const GradientSet&) const = default;
};

GradientSet ZeroGradients(const NetworkSpec& spec);

// Flattened views in a fixed order: layer by layer, weights (row-major) then
// biases. Used for noise injection and optimizer state.
std::vector<double> Flatten(const GradientSet& grads);
std::vector<double> Flatten(const ParameterSet& params);
void Unflatten(std::span<const double> flat, GradientSet& grads);
void Unflatten(std::span<const double> flat, ParameterSet& params);

struct ForwardResult {
  std::vector<double> output;
  ActivationTrace trace;
};

ForwardResult Forward(const NetworkSpec& spec, const ParameterSet& params,
                      std::span<const double> input);

// Output only; avoids storing the trace.
std::vector<double> Evaluate(const NetworkSpec& spec, const ParameterSet& params,
                             std::span<const double> input);

// Backpropagation of dC/da^(H) = output_grad. When input_grad is non-null it
// receives dC/da^(0), the gradient with respect to the network input.
GradientSet Backward(const NetworkSpec& spec, const ParameterSet& params,
                     const ActivationTrace& trace,
                     std::span<const double> output_grad,
                     std::vector<double>* input_grad = nullptr);

// Error vectors delta^(l) for l = 1..H (index l-1), exposed for checking the
// backpropagation identities directly.
std::vector<std::vector<double>> ErrorVectors(const NetworkSpec& spec,
                                              const ParameterSet& params,
                                              const ActivationTrace& trace,
                                              std::span<const double> output_grad);

// Gradient of f(a) - f(b) with respect to the parameters of a scalar-output
// network, computed as two backward passes.
GradientSet DifferenceGradient(const NetworkSpec& spec, const ParameterSet& params,
                               std::span<const double> a, std::span<const double> b);

struct RmspropState {
  std::vector<double> running_sq_avg;
  double decay = 0.9;
  double epsilon_stabilizer = 1e-8;
  bool operator==(const RmspropState&) const = default;
};

RmspropState MakeRmspropState(const NetworkSpec& spec, double decay = 0.9,
                              double epsilon_stabilizer = 1e-8);

enum class StepDirection { kAscent, kDescent };

// state' = decay*state + (1-decay)*g^2; param' = param +/- lr*g/sqrt(state'+eps).
void RmspropStep(ParameterSet& params, const GradientSet& grads,
                 RmspropState& state, double lr, StepDirection direction);

void ClipWeights(ParameterSet& params, double c_p);

}  // namespace dpgan

#endif  // DPGAN_CORE_TENSOR_H_
