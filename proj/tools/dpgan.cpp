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


// dpgan: command-line front end over the C interface.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpgan/dpgan.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Prints the report (if any) and maps the status to an exit code.
int Finish(dpgan_status status, char* report) {
  if (report != nullptr) {
    std::fputs(report, stdout);
    dpgan_string_free(report);
  }
  std::fflush(stdout);
  if (status == DPGAN_OK) return 0;
  std::fprintf(stderr, "error: %s: %s\n", dpgan_status_name(status), dpgan_last_error());
  return status == DPGAN_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private WGAN: training, privacy accounting and evaluation"};
  app.set_version_flag("--version", std::string(dpgan_version()));
  app.require_subcommand(1);

  // calibrate
  double cal_eps = 0.0, cal_delta = 0.0, cal_q = 0.0;
  int cal_nd = 0;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Noise multiplier for an (epsilon, delta) target per outer loop");
  calibrate->add_option("--epsilon", cal_eps, "Target epsilon")->required();
  calibrate->add_option("--delta", cal_delta, "Target delta")->required();
  calibrate->add_option("--q", cal_q, "Sampling ratio m/M")->required();
  calibrate->add_option("--n-d", cal_nd, "Critic iterations per outer loop")->required();

  // accountant
  dpgan_accountant_args acc{};
  acc.n_d = 5;
  std::optional<double> acc_sigma, acc_eps;
  std::vector<std::uint64_t> acc_steps;
  auto* accountant = app.add_subcommand(
      "accountant", "Tabulate the moments-accountant epsilon over step counts");
  accountant->add_option("--q", acc.q, "Sampling ratio m/M")->required();
  accountant->add_option("--delta", acc.delta, "Delta")->required();
  accountant->add_option("--n-d", acc.n_d, "Critic iterations per outer loop")
      ->capture_default_str();
  auto* sigma_opt = accountant->add_option("--sigma", acc_sigma, "Noise multiplier sigma_n");
  auto* eps_opt =
      accountant->add_option("--epsilon", acc_eps, "Calibrate sigma_n from this epsilon");
  sigma_opt->excludes(eps_opt);
  accountant->add_option("--steps", acc_steps, "Step counts (default n_d x 1,10,100,1000)")
      ->delimiter(',');

  // gradcheck
  std::vector<std::size_t> gc_widths;
  std::string gc_acts = "sigmoid";
  dpgan_gradcheck_args gc{};
  gc.b_x = 1.0;
  bool gc_biases = false;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Clip precondition, gradient bound c_g and an empirical check");
  gradcheck->add_option("--arch", gc_widths, "Layer widths, input first, e.g. 4,3,1")
      ->required()
      ->delimiter(',');
  gradcheck->add_option("--activation", gc_acts, "One activation, or one per layer")
      ->capture_default_str();
  gradcheck->add_option("--c-p", gc.c_p, "Weight clip constant")->required();
  gradcheck->add_option("--trials", gc.trials, "Random trials (0 skips the check)")
      ->capture_default_str();
  gradcheck->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
  gradcheck->add_option("--b-x", gc.b_x, "Record norm bound")->capture_default_str();
  gradcheck->add_flag("--biases", gc_biases, "Include bias gradients and bias terms");

  // train
  std::string tr_config, tr_out, tr_resume;
  auto* train = app.add_subcommand("train", "Train from a config file or a run manifest");
  train->add_option("config", tr_config, "Config file or manifest.json")->required();
  train->add_option("--out-dir", tr_out, "Output directory (overrides the config)");
  train->add_option("--resume", tr_resume, "Checkpoint to continue from");

  // generate
  std::string gen_ckpt, gen_out;
  std::uint64_t gen_n = 0, gen_seed = 0;
  std::optional<double> gen_threshold;
  auto* generate = app.add_subcommand("generate", "Sample records from a checkpoint");
  generate->add_option("--checkpoint", gen_ckpt, "Checkpoint file")->required();
  generate->add_option("--n", gen_n, "Number of samples")->required();
  generate->add_option("--out", gen_out, "Output CSV")->required();
  generate->add_option("--seed", gen_seed, "Latent sampling seed")->capture_default_str();
  generate->add_option("--binarize", gen_threshold,
                       "Map entries >= threshold to 1 and the rest to 0");

  // evaluate
  dpgan_evaluate_args ev;
  dpgan_evaluate_args_init(&ev);
  std::string ev_real, ev_gen, ev_test, ev_gen_b, ev_test_b, ev_metrics, ev_out = ".";
  bool ev_no_header = false;
  auto* evaluate = app.add_subcommand("evaluate", "Compare generated and real records");
  evaluate->add_option("--real", ev_real, "Real (training) records")->required();
  evaluate->add_option("--gen", ev_gen, "Generated records")->required();
  evaluate->add_option("--test", ev_test, "Held-out real records");
  evaluate->add_option("--gen-b", ev_gen_b, "Generated records of the second class");
  evaluate->add_option("--test-b", ev_test_b, "Held-out records of the second class");
  evaluate->add_option("--metrics", ev_metrics, "Comma list of dwp, dwpre, nn, downstream")
      ->required();
  evaluate->add_option("--out-dir", ev_out, "Directory for CSV and summary.json")
      ->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Seed for splits and resampling")
      ->capture_default_str();
  evaluate->add_option("--k", ev.k, "Neighbors per generated row")->capture_default_str();
  evaluate->add_option("--n-samples", ev.n_samples, "Downstream training size");
  evaluate->add_option("--repeats", ev.repeats, "Downstream repeats")->capture_default_str();
  evaluate->add_option("--threads", ev.threads, "Threads for per-column fits")
      ->capture_default_str();
  evaluate->add_flag("--no-header", ev_no_header, "Input files have no header row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  char* report = nullptr;
  dpgan_status status = DPGAN_OK;
  if (*calibrate) {
    status = dpgan_cmd_calibrate(cal_eps, cal_delta, cal_q, cal_nd, &report);
  } else if (*accountant) {
    if (acc_sigma) {
      acc.has_sigma_n = 1;
      acc.sigma_n = *acc_sigma;
    }
    if (acc_eps) {
      acc.has_epsilon = 1;
      acc.epsilon = *acc_eps;
    }
    acc.steps = acc_steps.data();
    acc.n_steps = acc_steps.size();
    status = dpgan_cmd_accountant(&acc, &report);
  } else if (*gradcheck) {
    gc.widths = gc_widths.data();
    gc.n_widths = gc_widths.size();
    gc.activations = gc_acts.c_str();
    gc.include_biases = gc_biases ? 1 : 0;
    status = dpgan_cmd_gradcheck(&gc, &report);
  } else if (*train) {
    status = dpgan_cmd_train(tr_config.c_str(), tr_out.c_str(), tr_resume.c_str(), &report);
  } else if (*generate) {
    status = dpgan_cmd_generate(gen_ckpt.c_str(), gen_out.c_str(), gen_n, gen_seed,
                                gen_threshold ? 1 : 0, gen_threshold.value_or(0.5), &report);
  } else if (*evaluate) {
    ev.real_path = ev_real.c_str();
    ev.gen_path = ev_gen.c_str();
    ev.test_path = ev_test.c_str();
    ev.gen_b_path = ev_gen_b.c_str();
    ev.test_b_path = ev_test_b.c_str();
    ev.metrics = ev_metrics.c_str();
    ev.out_dir = ev_out.c_str();
    ev.has_header = ev_no_header ? 0 : 1;
    status = dpgan_cmd_evaluate(&ev, &report);
  }
  return Finish(status, report);
}
