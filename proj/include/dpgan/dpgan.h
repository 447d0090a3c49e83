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


#ifndef DPGAN_DPGAN_H_
#define DPGAN_DPGAN_H_

// C interface to the DP-WGAN library. Functions return a dpgan_status; on
// anything but DPGAN_OK, dpgan_last_error() describes the failure on the
// calling thread. Strings returned through char** are owned by the caller and
// released with dpgan_string_free.

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DPGAN_API __declspec(dllexport)
#else
#define DPGAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpgan_status {
  DPGAN_OK = 0,
  DPGAN_INVALID_ARGUMENT = 1,
  DPGAN_IO_ERROR = 2,
  DPGAN_FORMAT_ERROR = 3,
  DPGAN_PRECONDITION_FAILED = 4,
  DPGAN_NUMERIC_ERROR = 5,
  // The operation ran but a check it reports on did not hold.
  DPGAN_CHECK_FAILED = 6,
  DPGAN_INTERNAL_ERROR = 7,
} dpgan_status;

DPGAN_API const char* dpgan_version(void);
DPGAN_API const char* dpgan_last_error(void);
DPGAN_API const char* dpgan_status_name(dpgan_status status);
DPGAN_API void dpgan_string_free(char* s);

// ---- Accountant ----

DPGAN_API dpgan_status dpgan_calibrate_sigma(double epsilon, double delta, double q,
                                             int n_d, double* sigma_n);

typedef struct dpgan_ledger dpgan_ledger;

DPGAN_API dpgan_status dpgan_ledger_create(double q, double sigma_n, dpgan_ledger** out);
DPGAN_API void dpgan_ledger_destroy(dpgan_ledger* ledger);
DPGAN_API dpgan_status dpgan_ledger_record_steps(dpgan_ledger* ledger, uint64_t steps);
DPGAN_API dpgan_status dpgan_ledger_steps(const dpgan_ledger* ledger, uint64_t* steps);
DPGAN_API dpgan_status dpgan_ledger_epsilon(const dpgan_ledger* ledger, double delta,
                                            double* epsilon);

// ---- Gradient bound ----

typedef struct dpgan_gradcheck_result {
  int precondition_pass;
  // 1-based layer index of the first violation, 0 on pass.
  size_t failing_layer;
  double limit;
  double c_g;
  // Norm-propagated bound, valid without the clip precondition.
  double propagated_bound;
  double empirical_max;
  uint64_t trials;
} dpgan_gradcheck_result;

// `activation` names one activation used by every layer. trials = 0 skips
// the empirical search. Returns DPGAN_PRECONDITION_FAILED (result filled)
// when c_p is too large.
DPGAN_API dpgan_status dpgan_gradcheck(const size_t* widths, size_t n_widths,
                                       const char* activation, double c_p,
                                       uint64_t trials, uint64_t seed,
                                       dpgan_gradcheck_result* result);

// ---- Matrices ----

typedef struct dpgan_matrix dpgan_matrix;

DPGAN_API dpgan_status dpgan_matrix_load_csv(const char* path, int has_header,
                                             dpgan_matrix** out);
DPGAN_API dpgan_status dpgan_matrix_from_data(const double* values, size_t rows,
                                              size_t cols, dpgan_matrix** out);
DPGAN_API void dpgan_matrix_destroy(dpgan_matrix* m);
DPGAN_API size_t dpgan_matrix_rows(const dpgan_matrix* m);
DPGAN_API size_t dpgan_matrix_cols(const dpgan_matrix* m);
// Row-major storage, valid until the matrix is destroyed.
DPGAN_API const double* dpgan_matrix_data(const dpgan_matrix* m);

// ---- Training runs ----

typedef struct dpgan_run dpgan_run;

// Parses the config text, loads its data and initializes the trainer.
DPGAN_API dpgan_status dpgan_run_create(const char* config_text, dpgan_run** out);
DPGAN_API dpgan_status dpgan_run_resume(const char* checkpoint_path, dpgan_run** out);
DPGAN_API void dpgan_run_destroy(dpgan_run* run);
// Runs up to `iterations` more generator iterations (stopping at n_g).
DPGAN_API dpgan_status dpgan_run_step(dpgan_run* run, uint64_t iterations);
DPGAN_API uint64_t dpgan_run_generator_iteration(const dpgan_run* run);
DPGAN_API uint64_t dpgan_run_critic_steps(const dpgan_run* run);
// Cumulative epsilon at the configured delta.
DPGAN_API dpgan_status dpgan_run_epsilon(const dpgan_run* run, double* epsilon);
DPGAN_API double dpgan_run_sigma_n(const dpgan_run* run);
DPGAN_API double dpgan_run_c_g(const dpgan_run* run);
// Metric rows logged so far; arrays are sized by dpgan_run_metric_count.
DPGAN_API size_t dpgan_run_metric_count(const dpgan_run* run);
DPGAN_API dpgan_status dpgan_run_metrics(const dpgan_run* run, uint64_t* iterations,
                                         double* wasserstein, double* epsilon);
DPGAN_API dpgan_status dpgan_run_save_checkpoint(const dpgan_run* run, const char* path);
// Draws n samples through the current generator; the accountant is untouched.
DPGAN_API dpgan_status dpgan_run_sample(const dpgan_run* run, size_t n, uint64_t seed,
                                        dpgan_matrix** out);

// ---- Commands (the operations behind the command-line tool) ----

DPGAN_API dpgan_status dpgan_cmd_calibrate(double epsilon, double delta, double q, int n_d,
                                           char** report);

typedef struct dpgan_accountant_args {
  double q;
  double delta;
  int n_d;
  // Exactly one of these is set (has_* nonzero).
  int has_sigma_n;
  double sigma_n;
  int has_epsilon;
  double epsilon;
  // Optional list of step counts to tabulate.
  const uint64_t* steps;
  size_t n_steps;
} dpgan_accountant_args;

DPGAN_API dpgan_status dpgan_cmd_accountant(const dpgan_accountant_args* args,
                                            char** report);

typedef struct dpgan_gradcheck_args {
  const size_t* widths;
  size_t n_widths;
  // Comma-separated activation names: one, or one per layer.
  const char* activations;
  double c_p;
  uint64_t trials;
  uint64_t seed;
  double b_x;
  int include_biases;
} dpgan_gradcheck_args;

// The report is filled even when the result is DPGAN_CHECK_FAILED.
DPGAN_API dpgan_status dpgan_cmd_gradcheck(const dpgan_gradcheck_args* args, char** report);

// out_dir and resume_path may be NULL or empty.
DPGAN_API dpgan_status dpgan_cmd_train(const char* config_path, const char* out_dir,
                                       const char* resume_path, char** report);

// threshold is ignored unless binarize is nonzero.
DPGAN_API dpgan_status dpgan_cmd_generate(const char* checkpoint_path, const char* out_path,
                                          uint64_t n, uint64_t seed, int binarize,
                                          double threshold, char** report);

typedef struct dpgan_evaluate_args {
  const char* real_path;
  const char* gen_path;
  // Optional (NULL or empty).
  const char* test_path;
  const char* gen_b_path;
  const char* test_b_path;
  int has_header;
  // Comma-separated subset of dwp, dwpre, nn, downstream.
  const char* metrics;
  const char* out_dir;
  uint64_t seed;
  size_t k;
  size_t n_samples;
  int repeats;
  double l2;
  int iters;
  unsigned threads;
} dpgan_evaluate_args;

// Fills args with the defaults (k = 3, repeats = 10, l2 = 1e-3, iters = 500,
// has_header = 1, threads = 1, out_dir ".").
DPGAN_API void dpgan_evaluate_args_init(dpgan_evaluate_args* args);
DPGAN_API dpgan_status dpgan_cmd_evaluate(const dpgan_evaluate_args* args, char** report);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // DPGAN_DPGAN_H_
