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

#ifndef DPGAN_CORE_EVAL_H_
#define DPGAN_CORE_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/data.h"
#include "core/errors.h"
#include "core/tensor.h"

namespace dpgan {

// Thrown by TrainLogreg when every label is identical.
class UniLabelError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// mean_x f_w(x) - mean_fake f_w(fake), rows of the two matrices being samples.
double WassersteinEstimate(const NetworkSpec& disc_spec, const ParameterSet& disc,
                           const Matrix& real_batch, const Matrix& fake_batch);

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

// Exact k nearest training rows of each generated row by Euclidean distance,
// ties broken by the lower training index.
std::vector<std::vector<Neighbor>> NearestNeighbors(const RecordMatrix& generated,
                                                    const RecordMatrix& training,
                                                    std::size_t k);

struct DwpPair {
  std::size_t dim_index = 0;
  double p_real = 0.0;
  double p_gen = 0.0;
};

// Per-column Bernoulli success probabilities (column means).
std::vector<DwpPair> Dwp(const RecordMatrix& real, const RecordMatrix& generated);

struct LogregModel {
  std::vector<double> weights;
  double bias = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;

  std::vector<double> Scores(const Matrix& features) const;
};

// L2-regularized logistic regression (the intercept is not penalized), fit by
// accelerated gradient descent from zero until the gradient norm drops below
// 1e-6 or `iters` steps are taken. Throws UniLabelError for one-class labels.
LogregModel TrainLogreg(const Matrix& features, std::span<const double> labels,
                        double l2, int iters);

// Probability that a random positive outscores a random negative, ties
// counted 1/2. Throws InvalidArgument unless both classes are present.
double Auc(std::span<const double> scores, std::span<const double> labels);

enum class SkipReason { kNone, kUniLabel, kTestUniLabel };
std::string SkipReasonName(SkipReason reason);

struct DwpreResult {
  std::size_t dim_index = 0;
  double auc_real = 0.0;
  double auc_gen = 0.0;
  SkipReason skip_reason = SkipReason::kNone;
};

struct DwpreOptions {
  double l2 = 1e-3;
  int iters = 500;
  // Per-column fits run on this many threads; results are ordered by column.
  unsigned threads = 1;
};

// For each column d, fits "rest of the columns -> column d" on the real and on
// the generated training matrices and scores both on `test`.
std::vector<DwpreResult> Dwpre(const RecordMatrix& real, const RecordMatrix& generated,
                               const RecordMatrix& test, const DwpreOptions& options = {});

struct SplitResult {
  RecordMatrix train;
  RecordMatrix test;
};

// Seeded shuffle, then the first train_fraction of rows go to `train`.
SplitResult TrainTestSplit(const RecordMatrix& data, double train_fraction,
                           std::uint64_t seed);

// Repeatedly draws n_samples/2 rows from each generated class, fits logistic
// regression (class a = 0, class b = 1) and returns the accuracy on the
// pooled test rows of every repeat.
std::vector<double> DownstreamClassify(const RecordMatrix& gen_class_a,
                                       const RecordMatrix& gen_class_b,
                                       const RecordMatrix& test_a,
                                       const RecordMatrix& test_b,
                                       std::size_t n_samples, int repeats,
                                       std::uint64_t seed);

// Entries >= threshold become 1, the rest 0.
RecordMatrix Binarize(const RecordMatrix& generated, double threshold = 0.5);

// CSV writers: these files are the plotting surface for the metrics.
void WriteDwpCsv(const std::vector<DwpPair>& pairs, const std::string& path);
void WriteDwpreCsv(const std::vector<DwpreResult>& results, const std::string& path);
void WriteNeighborsCsv(const std::vector<std::vector<Neighbor>>& neighbors,
                       const std::string& path);
void WriteAccuracyCsv(const std::vector<double>& accuracies, const std::string& path);

// Summary statistics used by the JSON report.
double MeanAbsDwpGap(const std::vector<DwpPair>& pairs);
double DwpCorrelation(const std::vector<DwpPair>& pairs);
struct DwpreSummary {
  double mean_auc_real = 0.0;
  double mean_auc_gen = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};
DwpreSummary SummarizeDwpre(const std::vector<DwpreResult>& results);

}  // namespace dpgan

#endif  // DPGAN_CORE_EVAL_H_
