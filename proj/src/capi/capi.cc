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


#include "dpgan/dpgan.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "core/bounds.h"
#include "core/checkpoint.h"
#include "core/commands.h"
#include "core/config.h"
#include "core/data.h"
#include "core/errors.h"
#include "core/privacy.h"
#include "core/trainer.h"

struct dpgan_ledger {
  dpgan::MomentsLedger ledger;
};

struct dpgan_matrix {
  dpgan::Matrix values;
};

struct dpgan_run {
  dpgan::RunConfig config;
  dpgan::RecordMatrix data;
  dpgan::TrainConfig train;
  dpgan::TrainerState state;
};

namespace {

thread_local std::string g_last_error;

dpgan_status Fail(dpgan_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps the library's exception types onto status codes.
template <typename F>
dpgan_status Guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const dpgan::NumericError& e) {
    return Fail(DPGAN_NUMERIC_ERROR, e.what());
  } catch (const dpgan::PreconditionError& e) {
    return Fail(DPGAN_PRECONDITION_FAILED, e.what());
  } catch (const dpgan::FormatError& e) {
    return Fail(DPGAN_FORMAT_ERROR, e.what());
  } catch (const dpgan::IoError& e) {
    return Fail(DPGAN_IO_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return Fail(DPGAN_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DPGAN_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DPGAN_INTERNAL_ERROR, e.what());
  } catch (...) {
    return Fail(DPGAN_INTERNAL_ERROR, "unknown error");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string Str(const char* s) { return s == nullptr ? std::string() : std::string(s); }

void RequireOut(const void* p, const char* name) {
  if (p == nullptr) throw dpgan::InvalidArgument(std::string(name) + " must not be null");
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

extern "C" {

const char* dpgan_version(void) { return dpgan::kVersion; }

const char* dpgan_last_error(void) { return g_last_error.c_str(); }

const char* dpgan_status_name(dpgan_status status) {
  switch (status) {
    case DPGAN_OK: return "ok";
    case DPGAN_INVALID_ARGUMENT: return "invalid argument";
    case DPGAN_IO_ERROR: return "i/o error";
    case DPGAN_FORMAT_ERROR: return "format error";
    case DPGAN_PRECONDITION_FAILED: return "precondition failed";
    case DPGAN_NUMERIC_ERROR: return "numeric error";
    case DPGAN_CHECK_FAILED: return "check failed";
    case DPGAN_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void dpgan_string_free(char* s) { std::free(s); }

dpgan_status dpgan_calibrate_sigma(double epsilon, double delta, double q, int n_d,
                                   double* sigma_n) {
  return Guard([&] {
    RequireOut(sigma_n, "sigma_n");
    *sigma_n = dpgan::CalibrateSigma(epsilon, delta, q, n_d);
    return DPGAN_OK;
  });
}

dpgan_status dpgan_ledger_create(double q, double sigma_n, dpgan_ledger** out) {
  return Guard([&] {
    RequireOut(out, "out");
    *out = new dpgan_ledger{dpgan::MomentsLedger(q, sigma_n)};
    return DPGAN_OK;
  });
}

void dpgan_ledger_destroy(dpgan_ledger* ledger) { delete ledger; }

dpgan_status dpgan_ledger_record_steps(dpgan_ledger* ledger, uint64_t steps) {
  return Guard([&] {
    RequireOut(ledger, "ledger");
    ledger->ledger.RecordSteps(steps);
    return DPGAN_OK;
  });
}

dpgan_status dpgan_ledger_steps(const dpgan_ledger* ledger, uint64_t* steps) {
  return Guard([&] {
    RequireOut(ledger, "ledger");
    RequireOut(steps, "steps");
    *steps = ledger->ledger.steps_taken();
    return DPGAN_OK;
  });
}

dpgan_status dpgan_ledger_epsilon(const dpgan_ledger* ledger, double delta,
                                  double* epsilon) {
  return Guard([&] {
    RequireOut(ledger, "ledger");
    RequireOut(epsilon, "epsilon");
    if (!(delta > 0.0 && delta < 1.0)) throw dpgan::InvalidArgument("delta must be in (0, 1)");
    *epsilon = ledger->ledger.Epsilon(delta);
    return DPGAN_OK;
  });
}

dpgan_status dpgan_gradcheck(const size_t* widths, size_t n_widths, const char* activation,
                             double c_p, uint64_t trials, uint64_t seed,
                             dpgan_gradcheck_result* result) {
  return Guard([&] {
    RequireOut(widths, "widths");
    RequireOut(result, "result");
    dpgan::NetworkSpec spec;
    spec.layer_widths.assign(widths, widths + n_widths);
    if (n_widths < 2) throw dpgan::InvalidArgument("architecture needs two widths");
    spec.activations.assign(n_widths - 1, dpgan::ParseActivation(Str(activation)));
    spec.Validate();
    *result = dpgan_gradcheck_result{};
    const auto bounds = dpgan::NetworkBounds(spec);
    const auto pre = dpgan::CheckClipPrecondition(spec, c_p, bounds);
    result->precondition_pass = pre.pass ? 1 : 0;
    result->failing_layer = pre.failing_layer;
    result->limit = pre.limit;
    if (!pre.pass) {
      return Fail(DPGAN_PRECONDITION_FAILED,
                  "clip constant exceeds the limit at layer " +
                      std::to_string(pre.failing_layer));
    }
    const dpgan::DataBound data{std::sqrt(static_cast<double>(spec.input_width()))};
    result->c_g = dpgan::NetworkCg(spec, c_p, data);
    result->propagated_bound = dpgan::PropagatedGradientBound(spec, c_p, data);
    if (trials > 0) {
      dpgan::Rng rng(seed);
      const auto r = dpgan::EmpiricalGradBound(spec, c_p, trials, data, rng);
      result->empirical_max = r.max_norm;
      result->trials = r.trials;
    }
    return DPGAN_OK;
  });
}

dpgan_status dpgan_matrix_load_csv(const char* path, int has_header, dpgan_matrix** out) {
  return Guard([&] {
    RequireOut(out, "out");
    auto report = dpgan::LoadContinuousCsv(Str(path), has_header != 0);
    *out = new dpgan_matrix{report.data.values()};
    return DPGAN_OK;
  });
}

dpgan_status dpgan_matrix_from_data(const double* values, size_t rows, size_t cols,
                                    dpgan_matrix** out) {
  return Guard([&] {
    RequireOut(out, "out");
    if (rows * cols > 0) RequireOut(values, "values");
    dpgan::Matrix m(rows, cols);
    std::copy(values, values + rows * cols, m.values().begin());
    *out = new dpgan_matrix{std::move(m)};
    return DPGAN_OK;
  });
}

void dpgan_matrix_destroy(dpgan_matrix* m) { delete m; }
size_t dpgan_matrix_rows(const dpgan_matrix* m) { return m ? m->values.rows() : 0; }
size_t dpgan_matrix_cols(const dpgan_matrix* m) { return m ? m->values.cols() : 0; }
const double* dpgan_matrix_data(const dpgan_matrix* m) {
  return m ? m->values.values().data() : nullptr;
}

dpgan_status dpgan_run_create(const char* config_text, dpgan_run** out) {
  return Guard([&] {
    RequireOut(out, "out");
    auto run = std::make_unique<dpgan_run>();
    run->config = dpgan::ParseRunConfig(Str(config_text));
    run->data = dpgan::LoadRunData(run->config);
    run->train = dpgan::ResolveTrainConfig(run->config, run->data.rows());
    run->state = dpgan::InitTrainer(run->train, run->data, run->config.disc, run->config.gen);
    *out = run.release();
    return DPGAN_OK;
  });
}

dpgan_status dpgan_run_resume(const char* checkpoint_path, dpgan_run** out) {
  return Guard([&] {
    RequireOut(out, "out");
    dpgan::Checkpoint ckpt = dpgan::LoadCheckpoint(Str(checkpoint_path));
    auto run = std::make_unique<dpgan_run>();
    run->config = dpgan::ParseRunConfig(ckpt.config_text);
    run->data = dpgan::LoadRunData(run->config);
    run->train = dpgan::ResolveTrainConfig(run->config, run->data.rows());
    run->state = std::move(ckpt.state);
    *out = run.release();
    return DPGAN_OK;
  });
}

void dpgan_run_destroy(dpgan_run* run) { delete run; }

dpgan_status dpgan_run_step(dpgan_run* run, uint64_t iterations) {
  return Guard([&] {
    RequireOut(run, "run");
    dpgan::TrainConfig partial = run->train;
    partial.n_g = std::min(run->train.n_g, run->state.generator_iteration + iterations);
    dpgan::RunTraining(run->state, run->data, partial);
    return DPGAN_OK;
  });
}

uint64_t dpgan_run_generator_iteration(const dpgan_run* run) {
  return run ? run->state.generator_iteration : 0;
}

uint64_t dpgan_run_critic_steps(const dpgan_run* run) {
  return run ? run->state.critic_steps : 0;
}

dpgan_status dpgan_run_epsilon(const dpgan_run* run, double* epsilon) {
  return Guard([&] {
    RequireOut(run, "run");
    RequireOut(epsilon, "epsilon");
    *epsilon = run->state.ledger.Epsilon(run->train.delta);
    return DPGAN_OK;
  });
}

double dpgan_run_sigma_n(const dpgan_run* run) { return run ? run->train.sigma_n : 0.0; }
double dpgan_run_c_g(const dpgan_run* run) { return run ? run->state.c_g : 0.0; }

size_t dpgan_run_metric_count(const dpgan_run* run) {
  return run ? run->state.log.rows.size() : 0;
}

dpgan_status dpgan_run_metrics(const dpgan_run* run, uint64_t* iterations,
                               double* wasserstein, double* epsilon) {
  return Guard([&] {
    RequireOut(run, "run");
    const auto& rows = run->state.log.rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (iterations) iterations[i] = rows[i].generator_iteration;
      if (wasserstein) wasserstein[i] = rows[i].wasserstein_estimate;
      if (epsilon) epsilon[i] = rows[i].epsilon_spent;
    }
    return DPGAN_OK;
  });
}

dpgan_status dpgan_run_save_checkpoint(const dpgan_run* run, const char* path) {
  return Guard([&] {
    RequireOut(run, "run");
    dpgan::SaveCheckpoint(dpgan::Checkpoint{run->config.text, run->state}, Str(path));
    return DPGAN_OK;
  });
}

dpgan_status dpgan_run_sample(const dpgan_run* run, size_t n, uint64_t seed,
                              dpgan_matrix** out) {
  return Guard([&] {
    RequireOut(run, "run");
    RequireOut(out, "out");
    auto samples = dpgan::GenerateSamples(run->state.gen_spec, run->state.gen, n, seed);
    *out = new dpgan_matrix{samples.values()};
    return DPGAN_OK;
  });
}

dpgan_status dpgan_cmd_calibrate(double epsilon, double delta, double q, int n_d,
                                 char** report) {
  return Guard([&] {
    RequireOut(report, "report");
    *report = CopyString(dpgan::RunCalibrate({epsilon, delta, q, n_d}));
    return DPGAN_OK;
  });
}

dpgan_status dpgan_cmd_accountant(const dpgan_accountant_args* args, char** report) {
  return Guard([&] {
    RequireOut(args, "args");
    RequireOut(report, "report");
    dpgan::AccountantArgs a;
    a.q = args->q;
    a.delta = args->delta;
    a.n_d = args->n_d;
    if (args->has_sigma_n) a.sigma_n = args->sigma_n;
    if (args->has_epsilon) a.epsilon = args->epsilon;
    if (args->n_steps > 0) {
      RequireOut(args->steps, "steps");
      a.steps.assign(args->steps, args->steps + args->n_steps);
    }
    *report = CopyString(dpgan::RunAccountant(a));
    return DPGAN_OK;
  });
}

dpgan_status dpgan_cmd_gradcheck(const dpgan_gradcheck_args* args, char** report) {
  return Guard([&] {
    RequireOut(args, "args");
    RequireOut(report, "report");
    dpgan::GradcheckArgs a;
    if (args->n_widths > 0) RequireOut(args->widths, "widths");
    a.widths.assign(args->widths, args->widths + args->n_widths);
    a.activations = SplitCommas(Str(args->activations));
    a.c_p = args->c_p;
    a.trials = args->trials;
    a.seed = args->seed;
    a.b_x = args->b_x;
    a.include_biases = args->include_biases != 0;
    const auto r = dpgan::RunGradcheck(a);
    *report = CopyString(r.text);
    if (!r.pass) {
      return Fail(DPGAN_CHECK_FAILED, r.text.find("precondition: FAIL") != std::string::npos
                                          ? "clip precondition violated"
                                          : "empirical gradient norm exceeded c_g");
    }
    return DPGAN_OK;
  });
}

dpgan_status dpgan_cmd_train(const char* config_path, const char* out_dir,
                             const char* resume_path, char** report) {
  return Guard([&] {
    RequireOut(report, "report");
    const auto r = dpgan::RunTrain({Str(config_path), Str(out_dir), Str(resume_path)});
    *report = CopyString(r.text);
    return DPGAN_OK;
  });
}

dpgan_status dpgan_cmd_generate(const char* checkpoint_path, const char* out_path,
                                uint64_t n, uint64_t seed, int binarize, double threshold,
                                char** report) {
  return Guard([&] {
    RequireOut(report, "report");
    dpgan::GenerateArgs a;
    a.checkpoint_path = Str(checkpoint_path);
    a.out_path = Str(out_path);
    a.n = n;
    a.seed = seed;
    if (binarize) a.binarize_threshold = threshold;
    *report = CopyString(dpgan::RunGenerate(a));
    return DPGAN_OK;
  });
}

void dpgan_evaluate_args_init(dpgan_evaluate_args* args) {
  if (args == nullptr) return;
  *args = dpgan_evaluate_args{};
  args->has_header = 1;
  args->out_dir = ".";
  args->k = 3;
  args->repeats = 10;
  args->l2 = 1e-3;
  args->iters = 500;
  args->threads = 1;
}

dpgan_status dpgan_cmd_evaluate(const dpgan_evaluate_args* args, char** report) {
  return Guard([&] {
    RequireOut(args, "args");
    RequireOut(report, "report");
    dpgan::EvaluateArgs a;
    a.real_path = Str(args->real_path);
    a.gen_path = Str(args->gen_path);
    a.test_path = Str(args->test_path);
    a.gen_b_path = Str(args->gen_b_path);
    a.test_b_path = Str(args->test_b_path);
    a.has_header = args->has_header != 0;
    a.metrics = SplitCommas(Str(args->metrics));
    a.out_dir = args->out_dir && *args->out_dir ? args->out_dir : ".";
    a.seed = args->seed;
    a.k = args->k;
    a.n_samples = args->n_samples;
    a.repeats = args->repeats;
    a.l2 = args->l2;
    a.iters = args->iters;
    a.threads = args->threads;
    *report = CopyString(dpgan::RunEvaluate(a));
    return DPGAN_OK;
  });
}

}  // extern "C"
