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

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/data.h"
#include "core/errors.h"

namespace dpgan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
}

}  // namespace

void PrivacyBudget::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("epsilon must be positive and finite");
  }
  CheckDelta(delta);
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in (0, 1]");
  if (n_d < 1) throw InvalidArgument("n_d must be at least 1");
}

bool PrivacyBudget::DeltaTooLarge(std::size_t dataset_size) const {
  return dataset_size > 0 && delta >= 1.0 / static_cast<double>(dataset_size);
}

double CalibrateSigma(double eps, double delta, double q, int n_d) {
  PrivacyBudget{eps, delta, q, n_d}.Validate();
  return 2.0 * q * std::sqrt(n_d * std::log(1.0 / delta)) / eps;
}

double StepLogMgf(double q, double sigma_n, double lambda) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0, 1]");
  if (!(sigma_n >= 0.0)) throw InvalidArgument("sigma_n must be nonnegative");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (q == 0.0) return 0.0;
  if (sigma_n == 0.0) return kInf;
  return q * q * lambda * lambda / (sigma_n * sigma_n);
}

std::vector<double> DefaultLambdaGrid() {
  std::vector<double> grid;
  for (int l = 1; l <= 64; ++l) grid.push_back(l);
  return grid;
}

MomentsLedger::MomentsLedger(double q, double sigma_n)
    : MomentsLedger(q, sigma_n, DefaultLambdaGrid()) {}

MomentsLedger::MomentsLedger(double q, double sigma_n,
                             std::vector<double> lambda_grid)
    : q_(q), sigma_n_(sigma_n), lambda_grid_(std::move(lambda_grid)) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0, 1]");
  if (!(sigma_n >= 0.0)) throw InvalidArgument("sigma_n must be nonnegative");
  for (double l : lambda_grid_) {
    if (!(l > 0.0)) throw InvalidArgument("lambda grid entries must be positive");
  }
}

double MomentsLedger::LogMoment(double lambda) const {
  if (steps_taken_ == 0) return 0.0;
  return static_cast<double>(steps_taken_) * StepLogMgf(q_, sigma_n_, lambda);
}

double MomentsLedger::ClosedFormEpsilon(double delta) const {
  CheckDelta(delta);
  if (steps_taken_ == 0 || q_ == 0.0) return 0.0;
  if (sigma_n_ == 0.0) return kInf;
  return 2.0 * q_ *
         std::sqrt(static_cast<double>(steps_taken_) * std::log(1.0 / delta)) /
         sigma_n_;
}

double MomentsLedger::Epsilon(double delta) const {
  CheckDelta(delta);
  if (lambda_grid_.empty()) {
    throw InvalidArgument("moments accountant lambda grid is empty");
  }
  if (steps_taken_ == 0 || q_ == 0.0) return 0.0;
  if (sigma_n_ == 0.0) return kInf;
  const double log_inv_delta = std::log(1.0 / delta);
  auto bound = [&](double lambda) {
    return (LogMoment(lambda) + log_inv_delta) / lambda;
  };
  double best = kInf;
  for (double lambda : lambda_grid_) best = std::min(best, bound(lambda));
  // Minimizer of T q^2 lambda / sigma^2 + log(1/delta) / lambda.
  const double lambda_star =
      sigma_n_ * std::sqrt(log_inv_delta / static_cast<double>(steps_taken_)) / q_;
  if (std::isfinite(lambda_star) && lambda_star > 0.0) {
    best = std::min(best, bound(lambda_star));
  }
  return best;
}

double PrivacyLoss(double log_p_at_o, double log_q_at_o) {
  if (std::isnan(log_p_at_o) || std::isnan(log_q_at_o)) {
    throw InvalidArgument("privacy loss of NaN log-density");
  }
  if (log_q_at_o == -kInf) {
    throw PreconditionError(
        "outcome lies outside the support of the neighboring distribution; "
        "privacy loss is infinite");
  }
  return log_p_at_o - log_q_at_o;
}

AuditResult EmpiricalDpAudit(const AuditMechanism& mechanism,
                             const RecordMatrix& d, const RecordMatrix& d_prime,
                             int trials, int bins, std::uint64_t seed,
                             double mass_floor) {
  if (trials < 1) throw InvalidArgument("audit needs at least one trial");
  if (bins < 1) throw InvalidArgument("audit needs at least one bin");
  AuditResult result;
  if (trials < 1000) {
    result.warning = "fewer than 1000 trials; the estimate is unreliable";
  }
  std::vector<double> out_d(trials), out_dp(trials);
  for (int t = 0; t < trials; ++t) {
    Rng r1(DeriveSeed(seed, 2 * static_cast<std::uint64_t>(t)));
    Rng r2(DeriveSeed(seed, 2 * static_cast<std::uint64_t>(t) + 1));
    out_d[t] = mechanism(d, r1);
    out_dp[t] = mechanism(d_prime, r2);
  }
  double lo = std::min(*std::min_element(out_d.begin(), out_d.end()),
                       *std::min_element(out_dp.begin(), out_dp.end()));
  double hi = std::max(*std::max_element(out_d.begin(), out_d.end()),
                       *std::max_element(out_dp.begin(), out_dp.end()));
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  auto bin_of = [&](double v) {
    int b = static_cast<int>((v - lo) / width);
    return std::clamp(b, 0, bins - 1);
  };
  std::vector<double> c1(bins, 0.0), c2(bins, 0.0);
  for (double v : out_d) c1[bin_of(v)] += 1.0;
  for (double v : out_dp) c2[bin_of(v)] += 1.0;

  const double n = trials;
  for (int b = 0; b < bins; ++b) {
    const double p1 = c1[b] / n;
    const double p2 = c2[b] / n;
    if (std::max(p1, p2) < mass_floor) continue;
    ++result.bins_retained;
    double ratio;
    double se;
    if (p1 == 0.0 || p2 == 0.0) {
      ratio = kInf;
      se = kInf;
    } else {
      ratio = std::abs(std::log(p1 / p2));
      se = std::sqrt((1.0 - p1) / (n * p1) + (1.0 - p2) / (n * p2));
    }
    if (result.argmax_bin < 0 || ratio > result.max_log_ratio) {
      result.max_log_ratio = ratio;
      result.standard_error = se;
      result.argmax_bin = b;
    }
  }
  return result;
}

}  // namespace dpgan
