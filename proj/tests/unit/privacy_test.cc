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


#include "core/privacy.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "core/data.h"
#include "core/errors.h"
#include "core/rng.h"

namespace dpgan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(CalibrateSigmaTest, PaperInputs) {
  const double q = 64.0 / 60000.0;
  const double sigma = CalibrateSigma(9.6, 1e-5, q, 5);
  const double closed = 2.0 * q * std::sqrt(5.0 * std::log(1e5)) / 9.6;
  EXPECT_NEAR(sigma, closed, 1e-12 * closed);
  EXPECT_NEAR(sigma, 1.686e-3, 5e-7);
}

TEST(CalibrateSigmaTest, DoublingEpsilonHalvesSigma) {
  for (double eps : {0.3, 1.0, 7.5, 40.0}) {
    EXPECT_EQ(CalibrateSigma(2 * eps, 1e-5, 0.01, 3), CalibrateSigma(eps, 1e-5, 0.01, 3) / 2);
  }
}

TEST(CalibrateSigmaTest, UnitRadical) {
  EXPECT_DOUBLE_EQ(CalibrateSigma(1.0, std::exp(-1.0), 0.5, 1), 1.0);
}

TEST(CalibrateSigmaTest, RejectsOutOfRange) {
  EXPECT_THROW(CalibrateSigma(0.0, 1e-5, 0.1, 1), InvalidArgument);
  EXPECT_THROW(CalibrateSigma(-1.0, 1e-5, 0.1, 1), InvalidArgument);
  EXPECT_THROW(CalibrateSigma(1.0, 0.0, 0.1, 1), InvalidArgument);
  EXPECT_THROW(CalibrateSigma(1.0, 1.0, 0.1, 1), InvalidArgument);
  EXPECT_THROW(CalibrateSigma(1.0, 1e-5, 0.0, 1), InvalidArgument);
  EXPECT_THROW(CalibrateSigma(1.0, 1e-5, 1.5, 1), InvalidArgument);
  EXPECT_THROW(CalibrateSigma(1.0, 1e-5, 0.1, 0), InvalidArgument);
}

TEST(BudgetTest, DeltaWarning) {
  PrivacyBudget b{1.0, 1e-3, 0.1, 1};
  EXPECT_TRUE(b.DeltaTooLarge(10000));
  EXPECT_FALSE(b.DeltaTooLarge(100));
}

TEST(StepLogMgfTest, Examples) {
  EXPECT_EQ(StepLogMgf(0.0, 1.0, 3.0), 0.0);
  EXPECT_NEAR(StepLogMgf(0.01, 1.0, 1.0), 1e-4, 1e-20);
  EXPECT_DOUBLE_EQ(StepLogMgf(0.03, 0.7, 4.0), 4.0 * StepLogMgf(0.03, 0.7, 2.0));
  EXPECT_EQ(StepLogMgf(0.1, 0.0, 1.0), kInf);
}

TEST(LedgerTest, AdditiveLogMoments) {
  MomentsLedger ledger(0.02, 1.3);
  EXPECT_EQ(ledger.LogMoment(5.0), 0.0);
  ledger.RecordStep();
  EXPECT_EQ(ledger.LogMoment(5.0), StepLogMgf(0.02, 1.3, 5.0));
  ledger.RecordSteps(99);
  EXPECT_EQ(ledger.steps_taken(), 100u);
  EXPECT_DOUBLE_EQ(ledger.LogMoment(5.0), 100 * StepLogMgf(0.02, 1.3, 5.0));
}

TEST(LedgerTest, EpsilonNeverDecreasesAsStepsAccumulate) {
  MomentsLedger ledger(0.01, 0.5);
  double prev = 0.0;
  for (int t = 1; t <= 10000; ++t) {
    ledger.RecordStep();
    const double eps = ledger.Epsilon(1e-5);
    ASSERT_GE(eps, prev) << t;
    prev = eps;
  }
}

TEST(LedgerTest, RoundTripTenEpsilon) {
  const double q = 64.0 / 60000.0;
  const double sigma = CalibrateSigma(10.0, 1e-5, q, 5);
  MomentsLedger ledger(q, sigma);
  ledger.RecordSteps(5);
  EXPECT_NEAR(ledger.Epsilon(1e-5), 10.0, 0.1);
}

TEST(LedgerTest, RoundTripSweep) {
  for (double delta : {1e-3, 1e-5, 1e-7}) {
    for (double q : {1e-3, 1e-2, 1e-1}) {
      for (int n_d : {1, 2, 5}) {
        for (int i = 0; i <= 30; ++i) {
          const double eps = 0.1 * std::pow(1000.0, i / 30.0);
          const double sigma = CalibrateSigma(eps, delta, q, n_d);
          MomentsLedger ledger(q, sigma);
          ledger.RecordSteps(n_d);
          const double got = ledger.Epsilon(delta);
          ASSERT_LE(std::abs(got - eps), 0.01 * eps)
              << "eps " << eps << " delta " << delta << " q " << q << " n_d " << n_d;
          // The searched value never beats the closed-form optimum by more than
          // rounding, and stays within 1% of it.
          const double closed = ledger.ClosedFormEpsilon(delta);
          ASSERT_LE(std::abs(got - closed), 0.01 * closed);
        }
      }
    }
  }
}

TEST(LedgerTest, GridOnlyStaysWithinOnePercentNearInteriorOptimum) {
  // sigma chosen so lambda* sits inside [1, 64].
  MomentsLedger ledger(0.01, 1.0);
  ledger.RecordSteps(1000);
  const double closed = ledger.ClosedFormEpsilon(1e-5);
  EXPECT_LE(std::abs(ledger.Epsilon(1e-5) - closed), 0.01 * closed);
}

TEST(LedgerTest, HugeNoiseGivesTinyEpsilon) {
  MomentsLedger ledger(0.01, 1e6);
  ledger.RecordSteps(1000);
  EXPECT_LT(ledger.Epsilon(1e-5), 1e-3);
}

TEST(LedgerTest, QuadrupledStepsDoubleEpsilon) {
  MomentsLedger a(0.01, 0.8), b(0.01, 0.8);
  a.RecordSteps(250);
  b.RecordSteps(1000);
  EXPECT_NEAR(b.Epsilon(1e-5) / a.Epsilon(1e-5), 2.0, 0.02);
}

TEST(LedgerTest, MonotoneInSigmaStepsAndQ) {
  auto eps = [](double q, double sigma, std::uint64_t steps) {
    MomentsLedger l(q, sigma);
    l.RecordSteps(steps);
    return l.Epsilon(1e-5);
  };
  for (double s = 0.1; s < 10.0; s *= 1.5) EXPECT_GT(eps(0.01, s, 100), eps(0.01, s * 1.5, 100));
  for (std::uint64_t t = 1; t < 5000; t *= 3) EXPECT_LT(eps(0.01, 1.0, t), eps(0.01, 1.0, t * 3));
  for (double q = 0.001; q < 0.5; q *= 2) EXPECT_LT(eps(q, 1.0, 100), eps(q * 2, 1.0, 100));
}

TEST(LedgerTest, EdgeCases) {
  MomentsLedger fresh(0.01, 1.0);
  EXPECT_EQ(fresh.Epsilon(1e-5), 0.0);
  MomentsLedger noiseless(0.01, 0.0);
  noiseless.RecordStep();
  EXPECT_EQ(noiseless.Epsilon(1e-5), kInf);
  MomentsLedger empty(0.01, 1.0, {});
  empty.RecordStep();
  EXPECT_THROW(empty.Epsilon(1e-5), InvalidArgument);
  EXPECT_THROW(fresh.Epsilon(0.0), InvalidArgument);
  EXPECT_THROW(MomentsLedger(0.01, 1.0, {1.0, -2.0}), InvalidArgument);
}

TEST(LedgerTest, PerOuterLoopMatchesCalibration) {
  const double sigma = CalibrateSigma(3.0, 1e-6, 0.02, 5);
  MomentsLedger ledger(0.02, sigma);
  ledger.RecordSteps(5);
  EXPECT_NEAR(ledger.Epsilon(1e-6), 3.0, 1e-9);
}

TEST(PrivacyLossTest, Definitions) {
  EXPECT_EQ(PrivacyLoss(-1.3, -1.3), 0.0);
  EXPECT_EQ(PrivacyLoss(-0.2, -1.7), -PrivacyLoss(-1.7, -0.2));
  // Unit Gaussians with means 0 and 1.
  auto log_n = [](double o, double mu) {
    return -0.5 * (o - mu) * (o - mu) - 0.5 * std::log(2 * M_PI);
  };
  EXPECT_NEAR(PrivacyLoss(log_n(0.0, 0.0), log_n(0.0, 1.0)), 0.5, 1e-15);
  EXPECT_EQ(PrivacyLoss(log_n(0.5, 0.0), log_n(0.5, 1.0)), 0.0);
  EXPECT_THROW(PrivacyLoss(-1.0, -kInf), PreconditionError);
}

RecordMatrix OneRecord(double v) {
  Matrix m(1, 1, v);
  return RecordMatrix(std::move(m), RecordKind::kContinuous);
}

// Gaussian mechanism on the single record value.
AuditMechanism GaussianMechanism(double sigma) {
  return [sigma](const RecordMatrix& d, Rng& rng) {
    return d.row(0)[0] + sigma * rng.NextGaussian();
  };
}

TEST(AuditTest, IdenticalDatasetsGiveSmallRatio) {
  const auto r = EmpiricalDpAudit(GaussianMechanism(1.0), OneRecord(0.0), OneRecord(0.0),
                                  10000, 20, 7);
  EXPECT_TRUE(r.warning.empty());
  EXPECT_GT(r.bins_retained, 0);
  EXPECT_LE(r.max_log_ratio, 3 * r.standard_error + 0.05);
}

TEST(AuditTest, NoNoiseDiverges) {
  const auto r = EmpiricalDpAudit(GaussianMechanism(0.0), OneRecord(0.0), OneRecord(1.0),
                                  2000, 20, 7);
  EXPECT_EQ(r.max_log_ratio, kInf);
}

TEST(AuditTest, GaussianLogRatioBoundedByAnalyticValue) {
  // For means 0 and 1 and sigma 2 the density log-ratio on the retained
  // range is |2o - 1| / (2 sigma^2); binning can only shrink it.
  const auto r = EmpiricalDpAudit(GaussianMechanism(2.0), OneRecord(0.0), OneRecord(1.0),
                                  100000, 40, 11);
  EXPECT_GT(r.max_log_ratio, 0.0);
  EXPECT_LT(r.max_log_ratio, 2.0);
}

TEST(AuditTest, FewTrialsWarn) {
  const auto r = EmpiricalDpAudit(GaussianMechanism(1.0), OneRecord(0.0), OneRecord(0.0),
                                  100, 10, 1);
  EXPECT_FALSE(r.warning.empty());
  EXPECT_THROW(EmpiricalDpAudit(GaussianMechanism(1.0), OneRecord(0), OneRecord(0), 0, 10, 1),
               InvalidArgument);
}

TEST(AuditTest, IsDeterministicPerSeed) {
  const auto a = EmpiricalDpAudit(GaussianMechanism(1.0), OneRecord(0.0), OneRecord(1.0),
                                  5000, 20, 3);
  const auto b = EmpiricalDpAudit(GaussianMechanism(1.0), OneRecord(0.0), OneRecord(1.0),
                                  5000, 20, 3);
  EXPECT_EQ(a.max_log_ratio, b.max_log_ratio);
  EXPECT_EQ(a.argmax_bin, b.argmax_bin);
}

}  // namespace
}  // namespace dpgan
