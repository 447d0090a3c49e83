/* Copyright 2026 The DPGAN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Compiles the public header as C and drives a few calls. */

#include <math.h>
#include <stdio.h>

#include "dpgan/dpgan.h"

int main(void) {
  double sigma = 0.0;
  dpgan_ledger* ledger = NULL;
  double eps = 0.0;
  if (dpgan_calibrate_sigma(2.0, 1e-5, 0.01, 5, &sigma) != DPGAN_OK) {
    fprintf(stderr, "calibrate: %s\n", dpgan_last_error());
    return 1;
  }
  if (dpgan_ledger_create(0.01, sigma, &ledger) != DPGAN_OK) return 1;
  dpgan_ledger_record_steps(ledger, 5);
  dpgan_ledger_epsilon(ledger, 1e-5, &eps);
  dpgan_ledger_destroy(ledger);
  if (fabs(eps - 2.0) > 0.02) {
    fprintf(stderr, "epsilon after one outer loop: %g\n", eps);
    return 1;
  }
  if (dpgan_calibrate_sigma(0.0, 1e-5, 0.01, 5, &sigma) != DPGAN_INVALID_ARGUMENT) return 1;
  printf("ok\n");
  return 0;
}
