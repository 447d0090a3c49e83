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

#ifndef DPGAN_CORE_RNG_H_
#define DPGAN_CORE_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace dpgan {

// Source of standard-normal draws. Training code takes this interface so tests
// can inject a known noise vector.
class GaussianSource {
 public:
  virtual ~GaussianSource() = default;
  virtual double NextGaussian() = 0;
};

// Seeded generator whose complete state (engine and normal-distribution cache)
// can be written into a checkpoint and restored.
class Rng : public GaussianSource {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double NextGaussian() override { return normal_(engine_); }
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  // Uniform integer in [0, n).
  std::uint64_t Index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::uint64_t Next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

  std::string SerializeState() const;
  void RestoreState(const std::string& text);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Derives an independent stream seed from a base seed and a label (splitmix64).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace dpgan

#endif  // DPGAN_CORE_RNG_H_
