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
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "core/data.h"
#include "core/errors.h"
#include "core/rng.h"
#include "test_helpers.h"

namespace dpgan {
namespace {

RecordMatrix Binary(std::size_t rows, std::size_t cols, std::vector<double> values) {
  Matrix m(rows, cols);
  m.values() = std::move(values);
  return RecordMatrix(std::move(m), RecordKind::kBinary);
}

RecordMatrix Continuous(const Matrix& m) { return RecordMatrix(m, RecordKind::kContinuous); }

double BruteForceAuc(const std::vector<double>& s, const std::vector<double>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1.0) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0.0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double Accuracy(const LogregModel& model, const Matrix& x, const std::vector<double>& y) {
  const auto p = model.Scores(x);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += (p[i] >= 0.5) == (y[i] == 1.0);
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

TEST(WassersteinTest, IdenticalBatchesGiveZero) {
  const NetworkSpec spec = MakeSpec({3, 4, 1}, {ActivationKind::kSigmoid},
                                    {ActivationKind::kIdentity});
  Rng rng(1);
  const ParameterSet p = testing::RandomParams(spec, rng, 0.5);
  Matrix batch(10, 3);
  for (double& v : batch.values()) v = rng.Uniform(0, 1);
  EXPECT_EQ(WassersteinEstimate(spec, p, batch, batch), 0.0);
}

TEST(WassersteinTest, ConstantCriticGivesZero) {
  const NetworkSpec spec = MakeSpec({2, 3, 1}, {ActivationKind::kSigmoid},
                                    {ActivationKind::kIdentity});
  ParameterSet p = ZeroParameters(spec);
  p.biases[1][0] = 0.7;
  Matrix real(5, 2, 3.0);
  Matrix fake(7, 2, -1.0);
  EXPECT_DOUBLE_EQ(WassersteinEstimate(spec, p, real, fake), 0.0);
}

TEST(WassersteinTest, LinearCriticGivesMeanDifference) {
  const NetworkSpec spec = MakeSpec({2, 1}, {ActivationKind::kIdentity},
                                    {ActivationKind::kIdentity});
  ParameterSet p = ZeroParameters(spec);
  p.weights[0](0, 0) = 1.0;
  Matrix real(2, 2);
  real.values() = {1.0, 5.0, 3.0, -2.0};
  Matrix fake(2, 2);
  fake.values() = {-1.0, 0.0, 1.0, 9.0};
  EXPECT_NEAR(WassersteinEstimate(spec, p, real, fake), 2.0, 1e-15);
}

TEST(NearestNeighborsTest, ExactCopyIsFirstNeighbor) {
  Rng rng(2);
  Matrix train(20, 4);
  for (double& v : train.values()) v = rng.Uniform(0, 1);
  Matrix gen(1, 4);
  std::copy(train.row(5).begin(), train.row(5).end(), gen.row(0).begin());
  const auto nn = NearestNeighbors(Continuous(gen), Continuous(train), 3);
  ASSERT_EQ(nn[0].size(), 3u);
  EXPECT_EQ(nn[0][0].index, 5u);
  EXPECT_EQ(nn[0][0].distance, 0.0);
}

TEST(NearestNeighborsTest, FullKReturnsAllSortedWithIndexTies) {
  Matrix train(6, 1);
  train.values() = {2.0, -1.0, 1.0, 0.5, -0.5, 3.0};
  Matrix gen(1, 1);
  gen.values() = {0.0};
  const auto nn = NearestNeighbors(Continuous(gen), Continuous(train), 6);
  std::vector<std::size_t> order;
  for (const auto& n : nn[0]) order.push_back(n.index);
  EXPECT_EQ(order, (std::vector<std::size_t>{3, 4, 1, 2, 0, 5}));
}

TEST(NearestNeighborsTest, MatchesBruteForceOracle) {
  Rng rng(3);
  Matrix train(100, 8);
  for (double& v : train.values()) v = std::round(rng.Uniform(0, 4));
  Matrix gen(30, 8);
  for (double& v : gen.values()) v = std::round(rng.Uniform(0, 4));
  const std::size_t k = 7;
  const auto nn = NearestNeighbors(Continuous(gen), Continuous(train), k);
  for (std::size_t g = 0; g < gen.rows(); ++g) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t t = 0; t < train.rows(); ++t) {
      double s = 0.0;
      for (std::size_t c = 0; c < 8; ++c) {
        const double d = gen(g, c) - train(t, c);
        s += d * d;
      }
      all.emplace_back(std::sqrt(s), t);
    }
    std::sort(all.begin(), all.end());
    ASSERT_EQ(nn[g].size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(nn[g][i].index, all[i].second) << "row " << g << " rank " << i;
      EXPECT_EQ(nn[g][i].distance, all[i].first);
    }
  }
}

TEST(NearestNeighborsTest, RejectsKAboveTrainingSize) {
  Matrix train(3, 2);
  Matrix gen(1, 2);
  EXPECT_THROW(NearestNeighbors(Continuous(gen), Continuous(train), 4), InvalidArgument);
}

TEST(DwpTest, DirectCountExample) {
  const auto pairs = Dwp(Binary(4, 1, {1, 0, 1, 1}), Binary(4, 1, {1, 0, 0, 1}));
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_DOUBLE_EQ(pairs[0].p_real, 0.75);
  EXPECT_DOUBLE_EQ(pairs[0].p_gen, 0.5);
}

TEST(DwpTest, SelfComparisonLiesOnDiagonal) {
  const RecordMatrix x = GenCorrelatedBinary(300, 10, std::vector<double>(10, 0.3), {}, 4);
  for (const auto& p : Dwp(x, x)) EXPECT_EQ(p.p_real, p.p_gen);
  EXPECT_EQ(MeanAbsDwpGap(Dwp(x, x)), 0.0);
}

TEST(DwpTest, AllZeroGenerated) {
  const RecordMatrix x = GenCorrelatedBinary(300, 5, std::vector<double>(5, 0.4), {}, 5);
  const auto pairs = Dwp(x, Binary(10, 5, std::vector<double>(50, 0.0)));
  for (const auto& p : pairs) EXPECT_EQ(p.p_gen, 0.0);
}

TEST(DwpTest, RejectsNonBinaryAndShapeMismatch) {
  Matrix m(2, 1);
  m.values() = {0.5, 1.0};
  EXPECT_THROW(Dwp(Continuous(m), Binary(2, 1, {0, 1})), InvalidArgument);
  EXPECT_THROW(Dwp(Binary(2, 1, {0, 1}), Binary(1, 2, {0, 1})), InvalidArgument);
}

TEST(AucTest, Examples) {
  const std::vector<double> y = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(Auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, y), 0.75);
  EXPECT_DOUBLE_EQ(Auc(y, y), 1.0);
  EXPECT_DOUBLE_EQ(Auc(std::vector<double>(4, 0.3), y), 0.5);
}

TEST(AucTest, SingleClassThrows) {
  EXPECT_THROW(Auc(std::vector<double>{0.1, 0.2}, std::vector<double>{1, 1}),
               InvalidArgument);
}

TEST(AucTest, MatchesBruteForceUpTo500) {
  Rng rng(6);
  for (std::size_t n : {2u, 3u, 10u, 57u, 200u, 500u}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = trial % 2 == 0 ? std::floor(rng.Uniform(0, 6)) : rng.Uniform(0, 1);
        y[i] = rng.Uniform(0, 1) < 0.4 ? 1.0 : 0.0;
      }
      y[0] = 0.0;
      y[1] = 1.0;
      EXPECT_EQ(Auc(s, y), BruteForceAuc(s, y)) << "n=" << n << " trial " << trial;
    }
  }
}

TEST(LogregTest, SeparatedDataIsFitPerfectly) {
  Matrix x(20, 1);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = static_cast<double>(i) - 9.5;
    y[i] = i >= 10 ? 1.0 : 0.0;
  }
  const LogregModel m = TrainLogreg(x, y, 1e-3, 500);
  EXPECT_EQ(Accuracy(m, x, y), 1.0);
}

TEST(LogregTest, IndependentLabelsGiveChanceAuc) {
  Rng rng(7);
  const std::size_t n = 10000;
  auto make = [&](Matrix& x, std::vector<double>& y) {
    x = Matrix(n, 5);
    y.assign(n, 0.0);
    for (double& v : x.values()) v = rng.Uniform(-1, 1);
    for (double& v : y) v = rng.Uniform(0, 1) < 0.5 ? 1.0 : 0.0;
  };
  Matrix xtr, xte;
  std::vector<double> ytr, yte;
  make(xtr, ytr);
  make(xte, yte);
  const LogregModel m = TrainLogreg(xtr, ytr, 1e-3, 500);
  const double auc = Auc(m.Scores(xte), yte);
  EXPECT_GE(auc, 0.45);
  EXPECT_LE(auc, 0.55);
}

TEST(LogregTest, MatchesGridSearchOracle) {
  const std::vector<double> xs = {-2.0, -1.5, -1.0, -0.4, 0.0, 0.3, 0.8, 1.1, 1.7, 2.4};
  const std::vector<double> ys = {0, 0, 1, 0, 0, 1, 0, 1, 1, 1};
  const double l2 = 0.05;
  Matrix x(xs.size(), 1);
  x.values() = xs;
  auto objective = [&](double w, double b) {
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double z = w * xs[i] + b;
      loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - ys[i] * z;
    }
    return loss / static_cast<double>(xs.size()) + 0.5 * l2 * w * w;
  };
  double best_w = 0.0, best_b = 0.0, best = objective(0.0, 0.0);
  auto search = [&](double cw, double cb, double half, double step) {
    const double w0 = cw, b0 = cb;
    for (double w = w0 - half; w <= w0 + half; w += step) {
      for (double b = b0 - half; b <= b0 + half; b += step) {
        const double f = objective(w, b);
        if (f < best) {
          best = f;
          best_w = w;
          best_b = b;
        }
      }
    }
  };
  search(0.0, 0.0, 5.0, 0.01);
  search(best_w, best_b, 0.02, 1e-4);
  const LogregModel m = TrainLogreg(x, ys, l2, 100000);
  EXPECT_LT(m.gradient_norm, 1e-6);
  EXPECT_NEAR(m.weights[0], best_w, 1e-3);
  EXPECT_NEAR(m.bias, best_b, 1e-3);
}

TEST(LogregTest, SingleClassThrowsUniLabel) {
  Matrix x(3, 1);
  EXPECT_THROW(TrainLogreg(x, std::vector<double>{1, 1, 1}, 1e-3, 10), UniLabelError);
}

TEST(DwpreTest, GeneratedEqualsRealGivesEqualAucs) {
  const RecordMatrix x =
      GenCorrelatedBinary(400, 6, std::vector<double>(6, 0.35), {{0, 1, 0.8}}, 9);
  const auto split = TrainTestSplit(x, 0.8, 1);
  for (const auto& r : Dwpre(split.train, split.train, split.test)) {
    if (r.skip_reason != SkipReason::kNone) continue;
    EXPECT_EQ(r.auc_real, r.auc_gen);
  }
}

TEST(DwpreTest, AllZeroGeneratedSkipsEveryColumn) {
  const RecordMatrix x = GenCorrelatedBinary(200, 4, std::vector<double>(4, 0.4), {}, 10);
  const auto results = Dwpre(x, Binary(50, 4, std::vector<double>(200, 0.0)), x);
  for (const auto& r : results) EXPECT_EQ(r.skip_reason, SkipReason::kUniLabel);
  EXPECT_EQ(SummarizeDwpre(results).skipped, 4u);
}

TEST(DwpreTest, CoupledPairIsPredictable) {
  const std::vector<double> p(8, 0.3);
  const RecordMatrix coupled = GenCorrelatedBinary(5000, 8, p, {{0, 1, 0.9}}, 11);
  const RecordMatrix indep = GenCorrelatedBinary(5000, 8, p, {}, 12);
  const auto cs = TrainTestSplit(coupled, 0.8, 2);
  const auto is = TrainTestSplit(indep, 0.8, 2);
  const auto rc = Dwpre(cs.train, cs.train, cs.test);
  const auto ri = Dwpre(is.train, is.train, is.test);
  EXPECT_GT(rc[0].auc_real, 0.6);
  EXPECT_NEAR(ri[0].auc_real, 0.5, 0.05);
}

TEST(DwpreTest, ThreadedResultsMatchSerial) {
  const RecordMatrix x =
      GenCorrelatedBinary(300, 7, std::vector<double>(7, 0.3), {{2, 3, 0.7}}, 13);
  const auto split = TrainTestSplit(x, 0.8, 3);
  DwpreOptions threaded;
  threaded.threads = 3;
  const auto a = Dwpre(split.train, split.train, split.test);
  const auto b = Dwpre(split.train, split.train, split.test, threaded);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t d = 0; d < a.size(); ++d) {
    EXPECT_EQ(b[d].dim_index, d);
    EXPECT_EQ(a[d].auc_real, b[d].auc_real);
    EXPECT_EQ(a[d].skip_reason, b[d].skip_reason);
  }
}

TEST(SplitTest, PartitionsRows) {
  Matrix m(10, 1);
  std::iota(m.values().begin(), m.values().end(), 0.0);
  const auto s = TrainTestSplit(Continuous(m), 0.8, 4);
  ASSERT_EQ(s.train.rows(), 8u);
  ASSERT_EQ(s.test.rows(), 2u);
  std::set<double> seen;
  for (std::size_t r = 0; r < 8; ++r) seen.insert(s.train.row(r)[0]);
  for (std::size_t r = 0; r < 2; ++r) seen.insert(s.test.row(r)[0]);
  EXPECT_EQ(seen.size(), 10u);
}

TEST(DownstreamTest, SeparatedClassesClassifyWell) {
  const RecordMatrix a = GenGaussianMixture(2000, {{0.25, 0.25}}, 0.05, 1);
  const RecordMatrix b = GenGaussianMixture(2000, {{0.75, 0.75}}, 0.05, 2);
  const RecordMatrix ta = GenGaussianMixture(500, {{0.25, 0.25}}, 0.05, 3);
  const RecordMatrix tb = GenGaussianMixture(500, {{0.75, 0.75}}, 0.05, 4);
  const auto acc = DownstreamClassify(a, b, ta, tb, 400, 10, 5);
  ASSERT_EQ(acc.size(), 10u);
  EXPECT_GT(std::accumulate(acc.begin(), acc.end(), 0.0) / 10.0, 0.95);
}

TEST(DownstreamTest, IdenticalClassesGiveChance) {
  const std::vector<Point2> c = {{0.25, 0.25}, {0.75, 0.75}};
  const RecordMatrix a = GenGaussianMixture(2000, c, 0.05, 6);
  const RecordMatrix b = GenGaussianMixture(2000, c, 0.05, 7);
  const RecordMatrix ta = GenGaussianMixture(1000, c, 0.05, 8);
  const RecordMatrix tb = GenGaussianMixture(1000, c, 0.05, 9);
  const auto acc = DownstreamClassify(a, b, ta, tb, 400, 20, 10);
  EXPECT_NEAR(std::accumulate(acc.begin(), acc.end(), 0.0) / 20.0, 0.5, 0.05);
}

TEST(DownstreamTest, RejectsTooFewSamples) {
  const RecordMatrix a = GenGaussianMixture(10, {{0.5, 0.5}}, 0.05, 1);
  EXPECT_THROW(DownstreamClassify(a, a, a, a, 40, 1, 1), InvalidArgument);
}

TEST(BinarizeTest, BoundaryMapsToOne) {
  Matrix m(1, 3);
  m.values() = {0.49, 0.5, 0.51};
  const RecordMatrix b = Binarize(Continuous(m), 0.5);
  EXPECT_EQ(b.kind(), RecordKind::kBinary);
  EXPECT_EQ(b.values().values(), (std::vector<double>{0, 1, 1}));
}

TEST(BinarizeTest, ZeroThresholdAndIdempotence) {
  Matrix m(1, 3);
  m.values() = {0.0, 0.2, 1.0};
  EXPECT_EQ(Binarize(Continuous(m), 0.0).values().values(), (std::vector<double>{1, 1, 1}));
  const RecordMatrix once = Binarize(Continuous(m), 0.5);
  EXPECT_EQ(Binarize(once, 0.5).values(), once.values());
}

}  // namespace
}  // namespace dpgan
