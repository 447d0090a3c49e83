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

#ifndef DPGAN_CORE_DATA_H_
#define DPGAN_CORE_DATA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/tensor.h"

namespace dpgan {

enum class RecordKind { kContinuous, kBinary };

// Training records, one per row. Binary matrices hold only 0/1; once a norm
// bound is attached every row norm is at most that bound.
class RecordMatrix {
 public:
  RecordMatrix() = default;
  // Throws InvalidArgument if `kind` is binary and an entry is not 0 or 1, or
  // if any entry is non-finite.
  RecordMatrix(Matrix values, RecordKind kind);

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  RecordKind kind() const { return kind_; }
  const Matrix& values() const { return values_; }
  std::span<const double> row(std::size_t r) const { return values_.row(r); }
  std::optional<double> norm_bound() const { return norm_bound_; }

  double MaxRowNorm() const;
  // Rows `indices` in the given order.
  RecordMatrix Select(std::span<const std::size_t> indices) const;

  bool operator==(const RecordMatrix&) const = default;

 private:
  friend RecordMatrix EnforceNormBound(const RecordMatrix&, double);
  Matrix values_;
  RecordKind kind_ = RecordKind::kContinuous;
  std::optional<double> norm_bound_;
};

struct LoadReport {
  RecordMatrix data;
  // Rows skipped because a cell was empty or not a number.
  std::size_t dropped_rows = 0;
};

// Reads a comma-separated file; every nonzero cell becomes 1. Empty files and
// ragged rows throw FormatError naming the 1-based line.
LoadReport LoadBinaryCsv(const std::string& path, bool has_header = false);

// Reads real-valued records with the same row rules as LoadBinaryCsv.
LoadReport LoadContinuousCsv(const std::string& path, bool has_header = false);

// Writes one row per record. Binary matrices are written as integers.
void SaveCsv(const RecordMatrix& data, const std::string& path,
             const std::vector<std::string>& header = {});

// Rows with norm above b_x are rescaled onto the sphere of radius b_x.
RecordMatrix EnforceNormBound(const RecordMatrix& data, double b_x);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// n points, uniform component choice, isotropic N(center, std^2 I). Row i is
// a pure function of (seed, i).
RecordMatrix GenGaussianMixture(std::size_t n, const std::vector<Point2>& centers,
                                double std_dev, std::uint64_t seed);

struct PairCoupling {
  std::size_t i = 0;
  std::size_t j = 0;
  // Correlation of the latent Gaussians behind columns i and j.
  double strength = 0.0;
};

// Latent-threshold sampler: a unit-variance Gaussian vector with the given
// pairwise correlations is thresholded per column so that P(x_i = 1) equals
// base_probs[i]. Throws PreconditionError naming the first coupling that
// makes the latent covariance non positive definite.
RecordMatrix GenCorrelatedBinary(std::size_t n, std::size_t dims,
                                 const std::vector<double>& base_probs,
                                 const std::vector<PairCoupling>& couplings,
                                 std::uint64_t seed);

}  // namespace dpgan

#endif  // DPGAN_CORE_DATA_H_
