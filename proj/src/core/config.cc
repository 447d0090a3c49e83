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

#include "core/config.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.h"
#include "core/privacy.h"

namespace dpgan {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(Trim(cur));
  return out;
}

using Table = std::map<std::string, std::map<std::string, std::pair<std::string, int>>>;

Table Tokenize(const std::string& text) {
  Table table;
  std::string section = "run";
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw FormatError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) {
      throw FormatError("config line " + std::to_string(line_no) + ": empty key");
    }
    auto& sec = table[section];
    if (sec.count(key)) {
      throw FormatError("config line " + std::to_string(line_no) + ": duplicate key " +
                        section + "." + key);
    }
    sec[key] = {Trim(line.substr(eq + 1)), line_no};
  }
  return table;
}

class Reader {
 public:
  explicit Reader(Table table) : table_(std::move(table)) {}

  std::optional<std::string> Get(const std::string& section, const std::string& key) {
    auto s = table_.find(section);
    if (s == table_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    used_.insert(section + "." + key);
    return k->second.first;
  }

  double Double(const std::string& section, const std::string& key, double fallback) {
    auto v = Get(section, key);
    return v ? ParseDouble(section + "." + key, *v) : fallback;
  }
  std::optional<double> OptDouble(const std::string& section, const std::string& key) {
    auto v = Get(section, key);
    if (!v) return std::nullopt;
    return ParseDouble(section + "." + key, *v);
  }
  std::uint64_t Uint(const std::string& section, const std::string& key,
                     std::uint64_t fallback) {
    auto v = Get(section, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) {
      throw FormatError(section + "." + key + ": expected a nonnegative integer, got '" +
                        *v + "'");
    }
    return out;
  }
  bool Bool(const std::string& section, const std::string& key, bool fallback) {
    auto v = Get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw FormatError(section + "." + key + ": expected true/false, got '" + *v + "'");
  }

  static double ParseDouble(const std::string& name, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    if (!v.empty() && v.front() == '+') ++first;
    auto [p, ec] = std::from_chars(first, v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
      throw FormatError(name + ": expected a number, got '" + v + "'");
    }
    return out;
  }

  void RejectUnused() const {
    for (const auto& [section, keys] : table_) {
      for (const auto& [key, value] : keys) {
        if (!used_.count(section + "." + key)) {
          throw FormatError("config line " + std::to_string(value.second) +
                            ": unknown key " + section + "." + key);
        }
      }
    }
  }

 private:
  Table table_;
  std::set<std::string> used_;
};

std::vector<double> ParseList(const std::string& name, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : Split(text, ',')) out.push_back(Reader::ParseDouble(name, item));
  return out;
}

NetworkSpec ParseNetwork(Reader& r, const std::string& section) {
  auto widths_text = r.Get(section, "widths");
  if (!widths_text) throw FormatError(section + ".widths is required");
  NetworkSpec spec;
  for (double w : ParseList(section + ".widths", *widths_text)) {
    if (w < 1 || w != static_cast<double>(static_cast<std::size_t>(w))) {
      throw InvalidArgument(section + ".widths entries must be positive integers");
    }
    spec.layer_widths.push_back(static_cast<std::size_t>(w));
  }
  if (spec.layer_widths.size() < 2) {
    throw InvalidArgument(section + ".widths needs at least two entries");
  }
  const std::size_t depth = spec.layer_widths.size() - 1;
  if (auto acts = r.Get(section, "activations")) {
    for (const auto& a : Split(*acts, ',')) spec.activations.push_back(ParseActivation(a));
  } else {
    const auto hidden = r.Get(section, "hidden");
    const auto output = r.Get(section, "output");
    if (!hidden && !output) {
      throw FormatError(section + ": give activations, or hidden and output");
    }
    const Activation h = ParseActivation(hidden.value_or(output.value_or("")));
    const Activation o = ParseActivation(output.value_or(hidden.value_or("")));
    for (std::size_t l = 0; l + 1 < depth; ++l) spec.activations.push_back(h);
    spec.activations.push_back(o);
  }
  spec.Validate();
  return spec;
}

}  // namespace

std::string Fnv1aHex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig ParseRunConfig(const std::string& text) {
  Reader r(Tokenize(text));
  RunConfig c;
  c.text = text;

  c.train.seed = r.Uint("run", "seed", 0);
  if (auto v = r.Get("run", "out_dir")) c.out_dir = *v;

  // [data]
  const std::string source = r.Get("data", "source").value_or("mixture");
  if (source == "csv") {
    c.data.source = DataSource::kCsv;
    auto path = r.Get("data", "path");
    if (!path) throw FormatError("data.path is required for source = csv");
    c.data.path = *path;
    const std::string kind = r.Get("data", "kind").value_or("continuous");
    if (kind == "binary") {
      c.data.kind = RecordKind::kBinary;
    } else if (kind != "continuous") {
      throw FormatError("data.kind must be continuous or binary");
    }
    c.data.has_header = r.Bool("data", "has_header", false);
  } else if (source == "mixture") {
    c.data.source = DataSource::kGaussianMixture;
    c.data.n = r.Uint("data", "n", 4096);
    c.data.std_dev = r.Double("data", "std", 0.05);
    const std::string centers =
        r.Get("data", "centers").value_or("0.25,0.25; 0.25,0.75; 0.75,0.25; 0.75,0.75");
    for (const auto& pt : Split(centers, ';')) {
      const auto xy = ParseList("data.centers", pt);
      if (xy.size() != 2) throw FormatError("data.centers entries must be x,y pairs");
      c.data.centers.push_back({xy[0], xy[1]});
    }
  } else if (source == "binary") {
    c.data.source = DataSource::kCorrelatedBinary;
    c.data.kind = RecordKind::kBinary;
    c.data.n = r.Uint("data", "n", 4000);
    c.data.dims = r.Uint("data", "dims", 64);
    if (auto probs = r.Get("data", "base_probs")) {
      c.data.base_probs = ParseList("data.base_probs", *probs);
      if (c.data.base_probs.size() == 1) {
        c.data.base_probs.assign(c.data.dims, c.data.base_probs[0]);
      }
    } else {
      const double lo = r.Double("data", "base_prob_min", 0.05);
      const double hi = r.Double("data", "base_prob_max", 0.5);
      for (std::size_t d = 0; d < c.data.dims; ++d) {
        const double t = c.data.dims > 1 ? static_cast<double>(d) / (c.data.dims - 1) : 0.0;
        c.data.base_probs.push_back(lo + t * (hi - lo));
      }
    }
    if (auto couplings = r.Get("data", "couplings")) {
      // "i-j:strength, ..."
      for (const auto& item : Split(*couplings, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        const auto dash = item.find('-');
        if (colon == std::string::npos || dash == std::string::npos || dash > colon) {
          throw FormatError("data.couplings entries look like i-j:strength");
        }
        PairCoupling pc;
        pc.i = static_cast<std::size_t>(
            Reader::ParseDouble("data.couplings", Trim(item.substr(0, dash))));
        pc.j = static_cast<std::size_t>(Reader::ParseDouble(
            "data.couplings", Trim(item.substr(dash + 1, colon - dash - 1))));
        pc.strength = Reader::ParseDouble("data.couplings", Trim(item.substr(colon + 1)));
        c.data.couplings.push_back(pc);
      }
    }
  } else {
    throw FormatError("data.source must be csv, mixture or binary");
  }
  c.data.data_seed = r.Uint("data", "seed", c.train.seed);
  c.data.norm_bound = r.Double("data", "norm_bound", 0.0);

  // [train]
  TrainConfig& t = c.train;
  t.alpha_d = r.Double("train", "alpha_d", t.alpha_d);
  t.alpha_g = r.Double("train", "alpha_g", t.alpha_g);
  t.c_p = r.Double("train", "c_p", t.c_p);
  t.batch_size = r.Uint("train", "batch_size", t.batch_size);
  t.n_d = static_cast<int>(r.Uint("train", "n_d", static_cast<std::uint64_t>(t.n_d)));
  t.n_g = r.Uint("train", "n_g", t.n_g);
  t.latent_dim = r.Uint("train", "latent_dim", t.latent_dim);
  t.rmsprop_decay = r.Double("train", "rmsprop_decay", t.rmsprop_decay);
  t.rmsprop_epsilon = r.Double("train", "rmsprop_epsilon", t.rmsprop_epsilon);
  t.log_every = r.Uint("train", "log_every", t.log_every);
  t.eval_batch = r.Uint("train", "eval_batch", t.eval_batch);
  t.l2 = r.Double("train", "l2", t.l2);
  t.c_g = r.Double("train", "c_g", 0.0);
  t.check_grad_bound = r.Bool("train", "check_grad_bound", false);
  c.checkpoint_every = r.Uint("train", "checkpoint_every", 0);
  const std::string loss = r.Get("train", "loss").value_or("wasserstein");
  if (loss == "wasserstein") {
    t.loss = LossKind::kWasserstein;
  } else if (loss == "minimax") {
    t.loss = LossKind::kMinimax;
  } else {
    throw FormatError("train.loss must be wasserstein or minimax");
  }

  // [privacy]
  c.epsilon = r.OptDouble("privacy", "epsilon");
  c.sigma_n = r.OptDouble("privacy", "sigma_n");
  t.delta = r.Double("privacy", "delta", t.delta);
  if (c.epsilon.has_value() == c.sigma_n.has_value()) {
    throw InvalidArgument("privacy: set exactly one of epsilon or sigma_n");
  }
  if (c.epsilon && !(*c.epsilon > 0.0)) throw InvalidArgument("privacy.epsilon must be positive");
  if (c.sigma_n && !(*c.sigma_n >= 0.0)) {
    throw InvalidArgument("privacy.sigma_n must be nonnegative");
  }

  c.disc = ParseNetwork(r, "discriminator");
  c.gen = ParseNetwork(r, "generator");
  r.RejectUnused();

  // Contracts that do not depend on the data size.
  t.sigma_n = c.sigma_n.value_or(0.0);
  t.Validate(c.disc, c.gen, std::max<std::size_t>(t.batch_size, 1));
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return ParseRunConfig(os.str());
}

RecordMatrix LoadRunData(const RunConfig& config) {
  const DataSpec& d = config.data;
  RecordMatrix data;
  switch (d.source) {
    case DataSource::kCsv:
      data = d.kind == RecordKind::kBinary ? LoadBinaryCsv(d.path, d.has_header).data
                                           : LoadContinuousCsv(d.path, d.has_header).data;
      break;
    case DataSource::kGaussianMixture:
      data = GenGaussianMixture(d.n, d.centers, d.std_dev, d.data_seed);
      break;
    case DataSource::kCorrelatedBinary:
      data = GenCorrelatedBinary(d.n, d.dims, d.base_probs, d.couplings, d.data_seed);
      break;
  }
  if (d.norm_bound > 0.0) data = EnforceNormBound(data, d.norm_bound);
  return data;
}

TrainConfig ResolveTrainConfig(const RunConfig& config, std::size_t dataset_size) {
  TrainConfig t = config.train;
  if (config.epsilon) {
    t.sigma_n = CalibrateSigma(*config.epsilon, t.delta, t.SamplingRatio(dataset_size),
                               t.n_d);
  } else {
    t.sigma_n = *config.sigma_n;
  }
  t.Validate(config.disc, config.gen, dataset_size);
  return t;
}

}  // namespace dpgan
