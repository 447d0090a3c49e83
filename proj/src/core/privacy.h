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

#ifndef DPGAN_CORE_PRIVACY_H_
#define DPGAN_CORE_PRIVACY_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/rng.h"

namespace dpgan {

class RecordMatrix;

// (epsilon, delta) target for one outer loop of n_d noisy critic steps at
// sampling ratio q.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  double q = 0.0;
  int n_d = 1;

  // Throws InvalidArgument for out-of-range fields.
  void Validate() const;
  // True when delta >= 1/M, i.e. the budget is weaker than recommended.
  bool DeltaTooLarge(std::size_t dataset_size) const;
};

// Noise scale guaranteeing (eps, delta)-DP for n_d critic steps at ratio q:
//   sigma_n = 2 q sqrt(n_d log(1/delta)) / eps.
double CalibrateSigma(double eps, double delta, double q, int n_d);
inline double CalibrateSigma(const PrivacyBudget& b) {
  return CalibrateSigma(b.epsilon, b.delta, b.q, b.n_d);
}

// Per-step log moment bound q^2 lambda^2 / sigma_n^2. Returns +infinity when
// sigma_n == 0 and q > 0 (no noise, unbounded privacy loss).
double StepLogMgf(double q, double sigma_n, double lambda);

// Accumulates the log moments of every noisy critic step and converts them to
// an epsilon through the tail bound exp(alpha(lambda) - lambda*eps) <= delta.
class MomentsLedger {
 public:
  MomentsLedger() = default;
  MomentsLedger(double q, double sigma_n);
  MomentsLedger(double q, double sigma_n, std::vector<double> lambda_grid);

  void RecordStep() { ++steps_taken_; }
  void RecordSteps(std::uint64_t n) { steps_taken_ += n; }

  std::uint64_t steps_taken() const { return steps_taken_; }
  double q() const { return q_; }
  double sigma_n() const { return sigma_n_; }
  const std::vector<double>& lambda_grid() const { return lambda_grid_; }

  // alpha(lambda) = steps_taken * StepLogMgf(q, sigma_n, lambda).
  double LogMoment(double lambda) const;

  // min over lambda of (alpha(lambda) + log(1/delta)) / lambda, over the grid
  // plus the analytic minimizer of the quadratic form. Zero before any step.
  double Epsilon(double delta) const;

  // Closed form 2 q sqrt(T log(1/delta)) / sigma_n for the quadratic bound.
  double ClosedFormEpsilon(double delta) const;

  // Restores a ledger read from a checkpoint.
  void set_steps_taken(std::uint64_t n) { steps_taken_ = n; }

  bool operator==(const MomentsLedger&) const = default;

 private:
  std::uint64_t steps_taken_ = 0;
  double q_ = 0.0;
  double sigma_n_ = 0.0;
  std::vector<double> lambda_grid_;
};

// Default grid {1, 2, ..., 64}.
std::vector<double> DefaultLambdaGrid();

// log P[M(D) = o] - log P[M(D') = o]. Throws PreconditionError when the
// second log-density is -infinity (o outside the support of M(D')).
double PrivacyLoss(double log_p_at_o, double log_q_at_o);

struct AuditResult {
  // Max over retained bins of |log(freq_D / freq_D')|; +infinity when some
  // retained bin is populated under one dataset only.
  double max_log_ratio = 0.0;
  // Delta-method standard error of the log-ratio at the maximizing bin.
  double standard_error = 0.0;
  int argmax_bin = -1;
  int bins_retained = 0;
  std::string warning;
};

// Runs `mechanism` `trials` times on each dataset (fresh seeds per trial),
// histograms the scalar outputs over a shared range and reports the largest
// log frequency ratio. Bins whose larger frequency is below `mass_floor` are
// ignored.
using AuditMechanism = std::function<double(const RecordMatrix& data, Rng& rng)>;
AuditResult EmpiricalDpAudit(const AuditMechanism& mechanism,
                             const RecordMatrix& d, const RecordMatrix& d_prime,
                             int trials, int bins, std::uint64_t seed,
                             double mass_floor = 0.01);

}  // namespace dpgan

#endif  // DPGAN_CORE_PRIVACY_H_
