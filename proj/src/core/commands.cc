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


#include "core/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/bounds.h"
#include "core/checkpoint.h"
#include "core/config.h"
#include "core/data.h"
#include "core/errors.h"
#include "core/eval.h"
#include "core/privacy.h"
#include "core/trainer.h"

namespace dpgan {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string Sci(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9e", v);
  return buf;
}

std::string Exact(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// JSON has no infinity; such values are written as strings.
ordered_json JsonNumber(double v) {
  if (std::isfinite(v)) return v;
  return Exact(v);
}

std::string ReadText(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + what + ": " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string CheckpointName(std::uint64_t iteration) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "checkpoint_%08llu.ckpt",
                static_cast<unsigned long long>(iteration));
  return buf;
}

std::string MetricsCsv(const MetricLog& log) {
  std::string out = "iteration,wasserstein_estimate,epsilon_spent\n";
  for (const auto& row : log.rows) {
    out += std::to_string(row.generator_iteration) + "," +
           Exact(row.wasserstein_estimate) + "," + Exact(row.epsilon_spent) + "\n";
  }
  return out;
}

std::string TableRow(std::uint64_t steps, double eps, double closed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12llu %-18s %s\n",
                static_cast<unsigned long long>(steps), Sci(eps).c_str(),
                Sci(closed).c_str());
  return buf;
}

std::string EpsilonTable(double q, double sigma, double delta,
                         const std::vector<std::uint64_t>& steps) {
  std::string out = "steps        epsilon            closed_form\n";
  MomentsLedger ledger(q, sigma);
  for (auto n : steps) {
    ledger.set_steps_taken(n);
    out += TableRow(n, ledger.Epsilon(delta), ledger.ClosedFormEpsilon(delta));
  }
  return out;
}

RecordMatrix LoadForEvaluation(const std::string& path, bool has_header,
                               const std::string& role) {
  if (path.empty()) throw InvalidArgument("missing path for the " + role + " matrix");
  RecordMatrix m = LoadContinuousCsv(path, has_header).data;
  const auto& v = m.values().values();
  const bool binary =
      std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0 || x == 1.0; });
  if (binary) return RecordMatrix(m.values(), RecordKind::kBinary);
  return m;
}

void RequireBinaryInput(const RecordMatrix& m, const std::string& role,
                        const std::string& metric) {
  if (m.kind() != RecordKind::kBinary) {
    throw InvalidArgument(metric + " needs binary input but the " + role +
                          " matrix has entries outside {0, 1} (use generate --binarize)");
  }
}

void RequireSameColumns(const RecordMatrix& a, const std::string& a_role,
                        const RecordMatrix& b, const std::string& b_role) {
  if (a.cols() != b.cols()) {
    throw InvalidArgument("shape mismatch: " + a_role + " has " + std::to_string(a.cols()) +
                          " columns, " + b_role + " has " + std::to_string(b.cols()));
  }
}

RunConfig ConfigFromPath(const std::string& path) {
  const std::string text = ReadText(path, "config");
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    ordered_json manifest;
    try {
      manifest = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("cannot parse manifest " + path + ": " + e.what());
    }
    if (!manifest.contains("config_text") || !manifest["config_text"].is_string()) {
      throw FormatError("manifest " + path + " has no config_text");
    }
    return ParseRunConfig(manifest["config_text"].get<std::string>());
  }
  return ParseRunConfig(text);
}

}  // namespace

std::string ResolveOutDir(const std::string& explicit_dir, const std::string& fallback) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("DPGAN_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return fallback;
}

std::string RunCalibrate(const CalibrateArgs& args) {
  const double sigma = CalibrateSigma(args.epsilon, args.delta, args.q, args.n_d);
  const std::uint64_t n_d = static_cast<std::uint64_t>(args.n_d);
  std::string out = "sigma_n = " + Sci(sigma) + "\n";
  out += "epsilon = " + Short(args.epsilon) + "  delta = " + Short(args.delta) +
         "  q = " + Short(args.q) + "  n_d = " + std::to_string(args.n_d) + "\n";
  out += EpsilonTable(args.q, sigma, args.delta, {n_d, 10 * n_d, 100 * n_d});
  return out;
}

std::string RunAccountant(const AccountantArgs& args) {
  if (args.sigma_n.has_value() == args.epsilon.has_value()) {
    throw InvalidArgument("give exactly one of sigma_n and epsilon");
  }
  if (!(args.q > 0.0 && args.q <= 1.0)) throw InvalidArgument("q must be in (0, 1]");
  if (!(args.delta > 0.0 && args.delta < 1.0)) {
    throw InvalidArgument("delta must be in (0, 1)");
  }
  if (args.n_d < 1) throw InvalidArgument("n_d must be at least 1");
  double sigma = 0.0;
  if (args.epsilon) {
    sigma = CalibrateSigma(*args.epsilon, args.delta, args.q, args.n_d);
  } else {
    sigma = *args.sigma_n;
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw InvalidArgument("sigma_n must be finite and nonnegative");
    }
  }
  std::vector<std::uint64_t> steps = args.steps;
  if (steps.empty()) {
    const std::uint64_t n_d = static_cast<std::uint64_t>(args.n_d);
    steps = {n_d, 10 * n_d, 100 * n_d, 1000 * n_d};
  }
  std::string out = "sigma_n = " + Sci(sigma) + "  q = " + Short(args.q) +
                    "  delta = " + Short(args.delta) + "\n";
  out += EpsilonTable(args.q, sigma, args.delta, steps);
  return out;
}

GradcheckReport RunGradcheck(const GradcheckArgs& args) {
  if (args.activations.empty()) throw InvalidArgument("no activation given");
  if (args.widths.size() < 2) throw InvalidArgument("architecture needs two widths");
  NetworkSpec spec;
  spec.layer_widths = args.widths;
  const std::size_t depth = args.widths.size() - 1;
  if (args.activations.size() == 1) {
    spec.activations.assign(depth, ParseActivation(args.activations[0]));
  } else {
    for (const auto& a : args.activations) spec.activations.push_back(ParseActivation(a));
  }
  spec.Validate();
  if (spec.output_width() != 1) throw InvalidArgument("discriminator output width must be 1");
  if (!(args.c_p >= 0.0) || !std::isfinite(args.c_p)) {
    throw InvalidArgument("c_p must be finite and nonnegative");
  }

  GradcheckReport report;
  std::string arch;
  for (std::size_t i = 0; i < spec.layer_widths.size(); ++i) {
    arch += (i ? "," : "") + std::to_string(spec.layer_widths[i]);
  }
  std::string acts;
  for (std::size_t i = 0; i < spec.activations.size(); ++i) {
    acts += (i ? "," : "") + ActivationName(spec.activations[i]);
  }
  std::string& out = report.text;
  out = "architecture: [" + arch + "] " + acts + "\n";
  out += "c_p: " + Short(args.c_p) + "\n";

  const ActivationBounds bounds = NetworkBounds(spec);
  const PreconditionResult pre = CheckClipPrecondition(spec, args.c_p, bounds);
  if (!pre.pass) {
    out += "precondition: FAIL at layer " + std::to_string(pre.failing_layer) + " (width " +
           std::to_string(spec.layer_widths[pre.failing_layer]) + "): c_p " +
           Short(args.c_p) + " > " + Short(pre.limit) + "\n";
    out += "result: FAIL\n";
    return report;
  }
  out += "precondition: PASS (limit " + Short(pre.limit) + ")\n";
  // Fake records are sigmoid outputs in [0, 1]^m_0.
  const DataBound data{
      std::max(args.b_x, std::sqrt(static_cast<double>(spec.input_width())))};
  const double c_g = NetworkCg(spec, args.c_p, data, args.include_biases);
  out += "c_g: " + Sci(c_g) + (args.include_biases ? " (with bias terms)\n" : "\n");
  out += "propagated bound: " +
         Sci(PropagatedGradientBound(spec, args.c_p, data, args.include_biases)) + "\n";
  report.pass = true;
  if (args.trials == 0) return report;

  Rng rng(args.seed);
  GradBoundOptions options;
  options.include_biases = args.include_biases;
  const GradBoundResult r = EmpiricalGradBound(spec, args.c_p, args.trials, data, rng, options);
  report.pass = r.max_norm <= c_g;
  out += "empirical max: " + Sci(r.max_norm) + " over " + std::to_string(r.trials) +
         " trials (ratio " + Short(c_g > 0.0 ? r.max_norm / c_g : 0.0) + ")\n";
  out += std::string("result: ") + (report.pass ? "PASS" : "FAIL") + "\n";
  return report;
}

TrainReport RunTrain(const TrainArgs& args) {
  const RunConfig config = ConfigFromPath(args.config_path);
  TrainReport report;
  report.out_dir = ResolveOutDir(args.out_dir, config.out_dir);
  const RecordMatrix data = LoadRunData(config);
  const TrainConfig train = ResolveTrainConfig(config, data.rows());
  const std::string config_hash = Fnv1aHex(config.text);

  TrainerState state;
  if (!args.resume_path.empty()) {
    Checkpoint ckpt = LoadCheckpoint(args.resume_path);
    if (Fnv1aHex(ckpt.config_text) != config_hash) {
      throw InvalidArgument("checkpoint " + args.resume_path +
                            " was written by a different config");
    }
    state = std::move(ckpt.state);
    if (state.sampler.dataset_size() != data.rows()) {
      throw InvalidArgument("checkpoint was written for a dataset of " +
                            std::to_string(state.sampler.dataset_size()) + " rows");
    }
  } else {
    state = InitTrainer(train, data, config.disc, config.gen);
  }

  const fs::path dir(report.out_dir);
  EnsureDir(report.out_dir);
  const double q = train.SamplingRatio(data.rows());
  MomentsLedger outer(q, train.sigma_n);
  outer.RecordSteps(static_cast<std::uint64_t>(train.n_d));

  std::vector<std::string> checkpoints;
  auto manifest = [&](const std::string& status, const std::string& error) {
    ordered_json m;
    m["format"] = "dpgan-manifest";
    m["dpgan_version"] = kVersion;
    m["checkpoint_version"] = kCheckpointVersion;
    m["status"] = status;
    if (!error.empty()) m["error"] = error;
    m["partial"] = status != "complete";
    m["config_hash"] = config_hash;
    m["seed"] = train.seed;
    m["data_rows"] = data.rows();
    m["data_cols"] = data.cols();
    m["q"] = q;
    m["delta"] = train.delta;
    m["sigma_n"] = train.sigma_n;
    m["c_g"] = state.c_g;
    m["n_d"] = train.n_d;
    m["n_g"] = train.n_g;
    if (config.epsilon) m["epsilon_target"] = *config.epsilon;
    m["epsilon_per_outer_loop"] = JsonNumber(outer.Epsilon(train.delta));
    m["epsilon_cumulative"] = JsonNumber(state.ledger.Epsilon(train.delta));
    m["generator_iterations"] = state.generator_iteration;
    m["critic_steps"] = state.critic_steps;
    m["max_per_example_norm"] = state.max_per_example_norm;
    m["metrics"] = "metrics.csv";
    m["checkpoints"] = checkpoints;
    if (!args.resume_path.empty()) m["resumed_from"] = args.resume_path;
    m["config_text"] = config.text;
    WriteText((dir / "manifest.json").string(), m.dump(2) + "\n");
  };
  manifest("running", "");

  TrainHooks hooks;
  hooks.after_generator_iteration = [&](const TrainerState& s) {
    if (config.checkpoint_every > 0 && s.generator_iteration % config.checkpoint_every == 0 &&
        s.generator_iteration < train.n_g) {
      const std::string name = CheckpointName(s.generator_iteration);
      SaveCheckpoint(Checkpoint{config.text, s}, (dir / name).string());
      checkpoints.push_back(name);
    }
  };
  try {
    RunTraining(state, data, train, hooks);
  } catch (const std::exception& e) {
    WriteText((dir / "metrics.csv").string(), MetricsCsv(state.log));
    manifest("aborted", e.what());
    throw;
  }
  const std::string final_name = "final.ckpt";
  SaveCheckpoint(Checkpoint{config.text, state}, (dir / final_name).string());
  checkpoints.push_back(final_name);
  WriteText((dir / "metrics.csv").string(), MetricsCsv(state.log));
  manifest("complete", "");

  report.text = "trained " + std::to_string(state.generator_iteration) +
                " generator iterations (" + std::to_string(state.critic_steps) +
                " critic steps)\n";
  report.text += "sigma_n = " + Sci(train.sigma_n) + "  c_g = " + Sci(state.c_g) +
                 "  q = " + Exact(q) + "\n";
  report.text += "epsilon per outer loop = " + Sci(outer.Epsilon(train.delta)) +
                 "  cumulative = " + Sci(state.ledger.Epsilon(train.delta)) +
                 "  (delta = " + Exact(train.delta) + ")\n";
  report.text += "artifacts in " + report.out_dir + "\n";
  return report;
}

std::string RunGenerate(const GenerateArgs& args) {
  if (args.out_path.empty()) throw InvalidArgument("missing output path");
  const GeneratorSnapshot g = LoadGenerator(args.checkpoint_path);
  RecordMatrix samples = GenerateSamples(g.spec, g.params, args.n, args.seed);
  if (args.binarize_threshold) samples = Binarize(samples, *args.binarize_threshold);
  std::vector<std::string> header;
  for (std::size_t c = 0; c < g.spec.output_width(); ++c) {
    header.push_back("x" + std::to_string(c));
  }
  SaveCsv(samples, args.out_path, header);
  return "wrote " + std::to_string(args.n) + " samples to " + args.out_path + "\n";
}

std::vector<std::string> EvaluateMetricNames() { return {"dwp", "dwpre", "nn", "downstream"}; }

std::string RunEvaluate(const EvaluateArgs& args) {
  const auto names = EvaluateMetricNames();
  if (args.metrics.empty()) throw InvalidArgument("no metric requested");
  for (const auto& m : args.metrics) {
    if (std::find(names.begin(), names.end(), m) == names.end()) {
      throw InvalidArgument("unknown metric '" + m + "'; valid: dwp, dwpre, nn, downstream");
    }
  }
  auto wants = [&](const std::string& name) {
    return std::find(args.metrics.begin(), args.metrics.end(), name) != args.metrics.end();
  };

  const RecordMatrix real = LoadForEvaluation(args.real_path, args.has_header, "real");
  const RecordMatrix gen = LoadForEvaluation(args.gen_path, args.has_header, "generated");
  RequireSameColumns(real, "real", gen, "generated");
  std::optional<RecordMatrix> test;
  if (!args.test_path.empty()) {
    test = LoadForEvaluation(args.test_path, args.has_header, "test");
    RequireSameColumns(real, "real", *test, "test");
  }

  EnsureDir(args.out_dir);
  const fs::path dir(args.out_dir);
  ordered_json summary;
  std::string text;

  if (wants("dwp")) {
    RequireBinaryInput(real, "real", "dwp");
    RequireBinaryInput(gen, "generated", "dwp");
    const auto pairs = Dwp(real, gen);
    WriteDwpCsv(pairs, (dir / "dwp.csv").string());
    const double gap = MeanAbsDwpGap(pairs);
    const double corr = DwpCorrelation(pairs);
    summary["dwp"] = {{"dims", pairs.size()},
                      {"mean_abs_gap", JsonNumber(gap)},
                      {"correlation", JsonNumber(corr)},
                      {"csv", "dwp.csv"}};
    text += "dwp: " + std::to_string(pairs.size()) + " dims, mean |gap| " + Exact(gap) +
            ", correlation " + Exact(corr) + "\n";
  }
  if (wants("dwpre")) {
    RequireBinaryInput(real, "real", "dwpre");
    RequireBinaryInput(gen, "generated", "dwpre");
    RecordMatrix real_train = real;
    RecordMatrix held_out;
    if (test) {
      RequireBinaryInput(*test, "test", "dwpre");
      held_out = *test;
    } else {
      SplitResult split = TrainTestSplit(real, 0.8, args.seed);
      real_train = std::move(split.train);
      held_out = std::move(split.test);
    }
    DwpreOptions options;
    options.l2 = args.l2;
    options.iters = args.iters;
    options.threads = args.threads;
    const auto results = Dwpre(real_train, gen, held_out, options);
    WriteDwpreCsv(results, (dir / "dwpre.csv").string());
    const DwpreSummary s = SummarizeDwpre(results);
    summary["dwpre"] = {{"dims", results.size()},
                        {"evaluated", s.evaluated},
                        {"skipped", s.skipped},
                        {"mean_auc_real", JsonNumber(s.mean_auc_real)},
                        {"mean_auc_gen", JsonNumber(s.mean_auc_gen)},
                        {"test_source", test ? "test file" : "80/20 split of real"},
                        {"csv", "dwpre.csv"}};
    text += "dwpre: " + std::to_string(s.evaluated) + " evaluated, " +
            std::to_string(s.skipped) + " skipped, mean AUC real " +
            Exact(s.mean_auc_real) + ", generated " + Exact(s.mean_auc_gen) + "\n";
  }
  if (wants("nn")) {
    if (args.k == 0 || args.k > real.rows()) {
      throw InvalidArgument("k must be between 1 and the number of real rows");
    }
    const auto neighbors = NearestNeighbors(gen, real, args.k);
    WriteNeighborsCsv(neighbors, (dir / "nn.csv").string());
    double mean_first = 0.0;
    for (const auto& list : neighbors) mean_first += list.front().distance;
    if (!neighbors.empty()) mean_first /= static_cast<double>(neighbors.size());
    summary["nn"] = {{"k", args.k},
                     {"generated_rows", neighbors.size()},
                     {"mean_nearest_distance", JsonNumber(mean_first)},
                     {"csv", "nn.csv"}};
    text += "nn: k = " + std::to_string(args.k) + ", mean nearest distance " +
            Exact(mean_first) + "\n";
  }
  if (wants("downstream")) {
    if (!test || args.gen_b_path.empty() || args.test_b_path.empty()) {
      throw InvalidArgument(
          "downstream needs --test, --gen-b and --test-b (generated and test rows of "
          "the second class)");
    }
    const RecordMatrix gen_b = LoadForEvaluation(args.gen_b_path, args.has_header,
                                                 "second generated");
    const RecordMatrix test_b = LoadForEvaluation(args.test_b_path, args.has_header,
                                                  "second test");
    RequireSameColumns(gen, "generated", gen_b, "second generated");
    RequireSameColumns(gen, "generated", test_b, "second test");
    const std::size_t n_samples =
        args.n_samples > 0 ? args.n_samples : 2 * std::min(gen.rows(), gen_b.rows());
    const auto acc = DownstreamClassify(gen, gen_b, *test, test_b, n_samples, args.repeats,
                                        args.seed);
    WriteAccuracyCsv(acc, (dir / "downstream.csv").string());
    double mean = 0.0;
    for (double a : acc) mean += a;
    if (!acc.empty()) mean /= static_cast<double>(acc.size());
    summary["downstream"] = {{"repeats", acc.size()},
                             {"n_samples", n_samples},
                             {"mean_accuracy", JsonNumber(mean)},
                             {"csv", "downstream.csv"}};
    text += "downstream: mean accuracy " + Exact(mean) + " over " +
            std::to_string(acc.size()) + " repeats\n";
  }
  WriteText((dir / "summary.json").string(), summary.dump(2) + "\n");
  text += "wrote " + (dir / "summary.json").string() + "\n";
  return text;
}

}  // namespace dpgan
