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

#include "core/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "core/rng.h"

namespace dpgan {

namespace {

double Sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

void CheckSameColumns(const RecordMatrix& a, const RecordMatrix& b, const char* what) {
  if (a.cols() != b.cols()) {
    throw InvalidArgument(std::string(what) + ": column counts differ (" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) +
                          ")");
  }
}

void RequireBinary(const RecordMatrix& m, const char* what) {
  if (m.kind() != RecordKind::kBinary) {
    throw InvalidArgument(std::string(what) + " requires binary records");
  }
}

std::ofstream OpenCsv(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  return out;
}

}  // namespace

double WassersteinEstimate(const NetworkSpec& disc_spec, const ParameterSet& disc,
                           const Matrix& real_batch, const Matrix& fake_batch) {
  if (real_batch.rows() == 0 || fake_batch.rows() == 0) {
    throw InvalidArgument("Wasserstein estimate needs non-empty batches");
  }
  // Running means stay exact for a constant critic.
  auto mean_output = [&](const Matrix& batch) {
    double mean = 0.0;
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      const double f = Evaluate(disc_spec, disc, batch.row(i))[0];
      mean += (f - mean) / static_cast<double>(i + 1);
    }
    return mean;
  };
  return mean_output(real_batch) - mean_output(fake_batch);
}

std::vector<std::vector<Neighbor>> NearestNeighbors(const RecordMatrix& generated,
                                                    const RecordMatrix& training,
                                                    std::size_t k) {
  CheckSameColumns(generated, training, "nearest neighbors");
  if (k > training.rows()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(training.rows()) + " training rows");
  }
  std::vector<std::vector<Neighbor>> out(generated.rows());
  std::vector<std::pair<double, std::size_t>> dist(training.rows());
  for (std::size_t g = 0; g < generated.rows(); ++g) {
    const auto a = generated.row(g);
    for (std::size_t t = 0; t < training.rows(); ++t) {
      const auto b = training.row(t);
      double s = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
      dist[t] = {s, t};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                      dist.end());
    for (std::size_t j = 0; j < k; ++j) {
      out[g].push_back({dist[j].second, std::sqrt(dist[j].first)});
    }
  }
  return out;
}

std::vector<DwpPair> Dwp(const RecordMatrix& real, const RecordMatrix& generated) {
  RequireBinary(real, "DWP");
  RequireBinary(generated, "DWP");
  CheckSameColumns(real, generated, "DWP");
  auto column_means = [](const RecordMatrix& m) {
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) mean[c] += row[c];
    }
    if (m.rows() > 0) {
      for (double& v : mean) v /= static_cast<double>(m.rows());
    }
    return mean;
  };
  const auto pr = column_means(real);
  const auto pg = column_means(generated);
  std::vector<DwpPair> pairs(real.cols());
  for (std::size_t c = 0; c < pairs.size(); ++c) pairs[c] = {c, pr[c], pg[c]};
  return pairs;
}

std::vector<double> LogregModel::Scores(const Matrix& features) const {
  std::vector<double> s = MatVec(features, weights);
  for (double& v : s) v = Sigmoid(v + bias);
  return s;
}

LogregModel TrainLogreg(const Matrix& features, std::span<const double> labels,
                        double l2, int iters) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (labels.size() != n) throw InvalidArgument("logistic regression: label count mismatch");
  if (n == 0) throw InvalidArgument("logistic regression: no examples");
  if (!(l2 >= 0.0)) throw InvalidArgument("logistic regression: l2 must be nonnegative");
  std::size_t positives = 0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw InvalidArgument("logistic regression: labels must be 0/1");
    positives += y == 1.0;
  }
  if (positives == 0 || positives == n) {
    throw UniLabelError("logistic regression: labels contain a single class");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> x(features.values().data(), static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(d));
  const Eigen::Map<const Eigen::VectorXd> y(labels.data(), static_cast<Eigen::Index>(n));
  const double inv_n = 1.0 / static_cast<double>(n);

  // Step 1/L with L bounding the Hessian: 0.25 * lambda_max([X 1]^T [X 1] / n)
  // (power iteration, padded) + l2.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
  double v_bias = 1.0;
  double lambda_max = 1.0;
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd xv = (x * v).array() + v_bias;
    Eigen::VectorXd next = x.transpose() * xv * inv_n;
    const double next_bias = xv.sum() * inv_n;
    const double norm = std::sqrt(next.squaredNorm() + next_bias * next_bias);
    if (norm == 0.0) break;
    lambda_max = norm;
    v = next / norm;
    v_bias = next_bias / norm;
  }
  const double lipschitz = 0.25 * lambda_max * 1.1 + l2;
  const double step = 1.0 / lipschitz;

  // Gradient, and the loss when `loss` is non-null. One exp per example:
  // with e = exp(-|z|), softplus(z) = max(z, 0) + log1p(e) and
  // sigmoid(z) = 1 / (1 + e) for z >= 0, e / (1 + e) otherwise.
  Eigen::VectorXd resid(static_cast<Eigen::Index>(n));
  auto gradient = [&](const Eigen::VectorXd& w, double b, Eigen::VectorXd& gw, double& gb,
                      double* loss) {
    const Eigen::VectorXd z = (x * w).array() + b;
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double e = std::exp(-std::abs(z[i]));
      const double sig = z[i] >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      if (loss != nullptr) total += std::max(z[i], 0.0) + std::log1p(e) - y[i] * z[i];
      resid[i] = (sig - y[i]) * inv_n;
    }
    gw = x.transpose() * resid + l2 * w;
    gb = resid.sum();
    if (loss != nullptr) *loss = total * inv_n + 0.5 * l2 * w.squaredNorm();
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double b = 0.0;
  Eigen::VectorXd prev_w = w;
  double prev_b = 0.0;
  double momentum_t = 1.0;
  Eigen::VectorXd gw, ygw, new_gw;
  double gb = 0.0, ygb = 0.0, new_gb = 0.0;
  double current_loss = 0.0;
  gradient(w, b, gw, gb, &current_loss);
  LogregModel model;
  model.gradient_norm = std::sqrt(gw.squaredNorm() + gb * gb);
  for (int it = 0; it < iters && model.gradient_norm >= 1e-6; ++it) {
    const double next_t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
    const double beta = (momentum_t - 1.0) / next_t;
    const Eigen::VectorXd yw = w + beta * (w - prev_w);
    const double yb = b + beta * (b - prev_b);
    gradient(yw, yb, ygw, ygb, nullptr);
    Eigen::VectorXd new_w = yw - step * ygw;
    const double new_b = yb - step * ygb;
    double new_loss = 0.0;
    gradient(new_w, new_b, new_gw, new_gb, &new_loss);
    if (new_loss > current_loss && beta > 0.0) {
      // Momentum overshot: restart from a plain gradient step.
      momentum_t = 1.0;
      prev_w = w;
      prev_b = b;
      w -= step * gw;
      b -= step * gb;
      gradient(w, b, gw, gb, &current_loss);
    } else {
      momentum_t = next_t;
      prev_w = std::move(w);
      prev_b = b;
      w = std::move(new_w);
      b = new_b;
      gw.swap(new_gw);
      gb = new_gb;
      current_loss = new_loss;
    }
    model.gradient_norm = std::sqrt(gw.squaredNorm() + gb * gb);
    model.iterations = it + 1;
  }
  model.weights.assign(w.data(), w.data() + w.size());
  model.bias = b;
  return model;
}

double Auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("AUC: size mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with midranks for ties.
  double pos = 0.0;
  double neg = 0.0;
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i) + static_cast<double>(j - 1)) + 1.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1.0) {
        rank_sum += midrank;
        pos += 1.0;
      } else {
        neg += 1.0;
      }
    }
    i = j;
  }
  if (pos == 0.0 || neg == 0.0) {
    throw InvalidArgument("AUC is undefined when only one class is present");
  }
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

std::string SkipReasonName(SkipReason reason) {
  switch (reason) {
    case SkipReason::kNone:
      return "none";
    case SkipReason::kUniLabel:
      return "uni-label";
    case SkipReason::kTestUniLabel:
      return "test-uni-label";
  }
  return "none";
}

namespace {

struct ColumnTask {
  Matrix features;
  std::vector<double> labels;
};

ColumnTask SplitColumn(const RecordMatrix& m, std::size_t target) {
  ColumnTask t{Matrix(m.rows(), m.cols() - 1), std::vector<double>(m.rows())};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    auto out = t.features.row(r);
    std::size_t k = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == target) {
        t.labels[r] = row[c];
      } else {
        out[k++] = row[c];
      }
    }
  }
  return t;
}

bool IsUniLabel(std::span<const double> labels) {
  return std::all_of(labels.begin(), labels.end(),
                     [&](double v) { return v == labels.front(); });
}

DwpreResult DwpreColumn(const RecordMatrix& real, const RecordMatrix& generated,
                        const RecordMatrix& test, std::size_t d,
                        const DwpreOptions& options) {
  DwpreResult r;
  r.dim_index = d;
  const ColumnTask real_task = SplitColumn(real, d);
  const ColumnTask gen_task = SplitColumn(generated, d);
  if (real_task.labels.empty() || gen_task.labels.empty() ||
      IsUniLabel(real_task.labels) || IsUniLabel(gen_task.labels)) {
    r.skip_reason = SkipReason::kUniLabel;
    return r;
  }
  const ColumnTask test_task = SplitColumn(test, d);
  if (test_task.labels.empty() || IsUniLabel(test_task.labels)) {
    r.skip_reason = SkipReason::kTestUniLabel;
    return r;
  }
  const LogregModel real_model =
      TrainLogreg(real_task.features, real_task.labels, options.l2, options.iters);
  const LogregModel gen_model =
      TrainLogreg(gen_task.features, gen_task.labels, options.l2, options.iters);
  r.auc_real = Auc(real_model.Scores(test_task.features), test_task.labels);
  r.auc_gen = Auc(gen_model.Scores(test_task.features), test_task.labels);
  return r;
}

}  // namespace

std::vector<DwpreResult> Dwpre(const RecordMatrix& real, const RecordMatrix& generated,
                               const RecordMatrix& test, const DwpreOptions& options) {
  RequireBinary(real, "DWpre");
  RequireBinary(generated, "DWpre");
  RequireBinary(test, "DWpre");
  CheckSameColumns(real, generated, "DWpre");
  CheckSameColumns(real, test, "DWpre");
  if (real.cols() < 2) throw InvalidArgument("DWpre needs at least two columns");
  const std::size_t dims = real.cols();
  std::vector<DwpreResult> results(dims);
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    for (std::size_t d = 0; d < dims; ++d) {
      results[d] = DwpreColumn(real, generated, test, d, options);
    }
    return results;
  }
  for (std::size_t start = 0; start < dims; start += threads) {
    std::vector<std::future<DwpreResult>> pending;
    for (std::size_t d = start; d < std::min<std::size_t>(dims, start + threads); ++d) {
      pending.push_back(std::async(std::launch::async, [&, d] {
        return DwpreColumn(real, generated, test, d, options);
      }));
    }
    for (std::size_t k = 0; k < pending.size(); ++k) results[start + k] = pending[k].get();
  }
  return results;
}

SplitResult TrainTestSplit(const RecordMatrix& data, double train_fraction,
                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> idx(data.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(idx.size())));
  std::span<const std::size_t> all(idx);
  return {data.Select(all.subspan(0, n_train)), data.Select(all.subspan(n_train))};
}

std::vector<double> DownstreamClassify(const RecordMatrix& gen_class_a,
                                       const RecordMatrix& gen_class_b,
                                       const RecordMatrix& test_a,
                                       const RecordMatrix& test_b,
                                       std::size_t n_samples, int repeats,
                                       std::uint64_t seed) {
  CheckSameColumns(gen_class_a, gen_class_b, "downstream classification");
  CheckSameColumns(gen_class_a, test_a, "downstream classification");
  CheckSameColumns(gen_class_a, test_b, "downstream classification");
  const std::size_t half = n_samples / 2;
  if (half == 0) throw InvalidArgument("downstream classification needs n_samples >= 2");
  if (gen_class_a.rows() < half || gen_class_b.rows() < half) {
    throw InvalidArgument("not enough generated samples: need " + std::to_string(half) +
                          " per class");
  }
  const std::size_t dim = gen_class_a.cols();
  const std::size_t n_test = test_a.rows() + test_b.rows();
  Matrix test_x(n_test, dim);
  std::vector<double> test_y(n_test);
  for (std::size_t r = 0; r < test_a.rows(); ++r) {
    std::copy(test_a.row(r).begin(), test_a.row(r).end(), test_x.row(r).begin());
    test_y[r] = 0.0;
  }
  for (std::size_t r = 0; r < test_b.rows(); ++r) {
    const std::size_t k = test_a.rows() + r;
    std::copy(test_b.row(r).begin(), test_b.row(r).end(), test_x.row(k).begin());
    test_y[k] = 1.0;
  }

  Rng rng(seed);
  std::vector<double> accuracies;
  for (int rep = 0; rep < repeats; ++rep) {
    Matrix x(2 * half, dim);
    std::vector<double> y(2 * half);
    auto draw = [&](const RecordMatrix& src, std::size_t offset, double label) {
      std::vector<std::size_t> idx(src.rows());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), rng.engine());
      for (std::size_t k = 0; k < half; ++k) {
        std::copy(src.row(idx[k]).begin(), src.row(idx[k]).end(),
                  x.row(offset + k).begin());
        y[offset + k] = label;
      }
    };
    draw(gen_class_a, 0, 0.0);
    draw(gen_class_b, half, 1.0);
    double accuracy = 0.5;
    try {
      const LogregModel model = TrainLogreg(x, y, 1e-3, 500);
      const auto p = model.Scores(test_x);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < n_test; ++i) {
        correct += ((p[i] >= 0.5) ? 1.0 : 0.0) == test_y[i];
      }
      accuracy = n_test ? static_cast<double>(correct) / static_cast<double>(n_test) : 0.0;
    } catch (const UniLabelError&) {
      // Unreachable: both classes are always drawn.
    }
    accuracies.push_back(accuracy);
  }
  return accuracies;
}

RecordMatrix Binarize(const RecordMatrix& generated, double threshold) {
  Matrix m = generated.values();
  for (double& v : m.values()) v = v >= threshold ? 1.0 : 0.0;
  return RecordMatrix(std::move(m), RecordKind::kBinary);
}

void WriteDwpCsv(const std::vector<DwpPair>& pairs, const std::string& path) {
  auto out = OpenCsv(path);
  out << "dim_index,p_real,p_gen\n";
  for (const auto& p : pairs) out << p.dim_index << ',' << p.p_real << ',' << p.p_gen << '\n';
}

void WriteDwpreCsv(const std::vector<DwpreResult>& results, const std::string& path) {
  auto out = OpenCsv(path);
  out << "dim_index,auc_real,auc_gen,skip_reason\n";
  for (const auto& r : results) {
    out << r.dim_index << ',';
    if (r.skip_reason == SkipReason::kNone) {
      out << r.auc_real << ',' << r.auc_gen;
    } else {
      out << ',';
    }
    out << ',' << SkipReasonName(r.skip_reason) << '\n';
  }
}

void WriteNeighborsCsv(const std::vector<std::vector<Neighbor>>& neighbors,
                       const std::string& path) {
  auto out = OpenCsv(path);
  out << "generated_index,rank,training_index,distance\n";
  for (std::size_t g = 0; g < neighbors.size(); ++g) {
    for (std::size_t k = 0; k < neighbors[g].size(); ++k) {
      out << g << ',' << k + 1 << ',' << neighbors[g][k].index << ','
          << neighbors[g][k].distance << '\n';
    }
  }
}

void WriteAccuracyCsv(const std::vector<double>& accuracies, const std::string& path) {
  auto out = OpenCsv(path);
  out << "repeat,accuracy\n";
  for (std::size_t i = 0; i < accuracies.size(); ++i) out << i << ',' << accuracies[i] << '\n';
}

double MeanAbsDwpGap(const std::vector<DwpPair>& pairs) {
  if (pairs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : pairs) s += std::abs(p.p_gen - p.p_real);
  return s / static_cast<double>(pairs.size());
}

double DwpCorrelation(const std::vector<DwpPair>& pairs) {
  const double n = static_cast<double>(pairs.size());
  if (pairs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mr = 0.0, mg = 0.0;
  for (const auto& p : pairs) {
    mr += p.p_real;
    mg += p.p_gen;
  }
  mr /= n;
  mg /= n;
  double srr = 0.0, sgg = 0.0, srg = 0.0;
  for (const auto& p : pairs) {
    srr += (p.p_real - mr) * (p.p_real - mr);
    sgg += (p.p_gen - mg) * (p.p_gen - mg);
    srg += (p.p_real - mr) * (p.p_gen - mg);
  }
  if (srr == 0.0 || sgg == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return srg / std::sqrt(srr * sgg);
}

DwpreSummary SummarizeDwpre(const std::vector<DwpreResult>& results) {
  DwpreSummary s;
  for (const auto& r : results) {
    if (r.skip_reason == SkipReason::kNone) {
      s.mean_auc_real += r.auc_real;
      s.mean_auc_gen += r.auc_gen;
      ++s.evaluated;
    } else {
      ++s.skipped;
    }
  }
  if (s.evaluated > 0) {
    s.mean_auc_real /= static_cast<double>(s.evaluated);
    s.mean_auc_gen /= static_cast<double>(s.evaluated);
  }
  return s;
}

}  // namespace dpgan
