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


#include "core/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.h"

namespace dpgan {

namespace {

constexpr char kMagic[8] = {'D', 'P', 'G', 'A', 'N', 'C', 'K', 'P'};
// Guards against absurd lengths in corrupt files.
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 34;

std::uint64_t Fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Str(const std::string& s) {
    U64(s.size());
    out_.append(s);
  }
  void Vec(const std::vector<double>& v) {
    U64(v.size());
    for (double x : v) F64(x);
  }
  void Spec(const NetworkSpec& spec) {
    U64(spec.layer_widths.size());
    for (auto w : spec.layer_widths) U64(w);
    U64(spec.activations.size());
    for (const auto& a : spec.activations) {
      U32(static_cast<std::uint32_t>(a.kind));
      F64(a.slope);
    }
  }
  void Params(const ParameterSet& p) {
    U64(p.weights.size());
    for (const auto& w : p.weights) {
      U64(w.rows());
      U64(w.cols());
      for (double x : w.values()) F64(x);
    }
    U64(p.biases.size());
    for (const auto& b : p.biases) Vec(b);
  }
  void Opt(const RmspropState& s) {
    Vec(s.running_sq_avg);
    F64(s.decay);
    F64(s.epsilon_stabilizer);
  }
  void Raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  void Need(std::size_t n) const {
    if (n > end_ - pos_) throw FormatError("checkpoint truncated");
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::uint64_t Count() {
    const std::uint64_t n = U64();
    if (n > kMaxCount) throw FormatError("checkpoint field length out of range");
    return n;
  }
  std::string Str() {
    const std::uint64_t n = Count();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> Vec() {
    const std::uint64_t n = Count();
    Need(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = F64();
    return v;
  }
  NetworkSpec Spec() {
    NetworkSpec spec;
    spec.layer_widths.resize(Count());
    for (auto& w : spec.layer_widths) w = U64();
    spec.activations.resize(Count());
    for (auto& a : spec.activations) {
      const std::uint32_t kind = U32();
      if (kind > static_cast<std::uint32_t>(ActivationKind::kIdentity)) {
        throw FormatError("checkpoint has an unknown activation");
      }
      a.kind = static_cast<ActivationKind>(kind);
      a.slope = F64();
    }
    try {
      spec.Validate();
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("checkpoint network spec invalid: ") + e.what());
    }
    return spec;
  }
  ParameterSet Params(const NetworkSpec& spec) {
    ParameterSet p;
    p.weights.resize(Count());
    for (auto& w : p.weights) {
      const std::uint64_t r = Count();
      const std::uint64_t c = Count();
      Need(r * c * 8);
      w = Matrix(r, c);
      for (auto& x : w.values()) x = F64();
    }
    p.biases.resize(Count());
    for (auto& b : p.biases) b = Vec();
    if (p.weights.size() != spec.depth() || p.biases.size() != spec.depth()) {
      throw FormatError("checkpoint parameters do not match the network spec");
    }
    for (std::size_t l = 0; l < spec.depth(); ++l) {
      if (p.weights[l].rows() != spec.layer_widths[l + 1] ||
          p.weights[l].cols() != spec.layer_widths[l] ||
          p.biases[l].size() != spec.layer_widths[l + 1]) {
        throw FormatError("checkpoint parameters do not match the network spec");
      }
    }
    return p;
  }
  RmspropState Opt() {
    RmspropState s;
    s.running_sq_avg = Vec();
    s.decay = F64();
    s.epsilon_stabilizer = F64();
    return s;
  }
  void Skip(std::size_t n) {
    Need(n);
    pos_ += n;
  }
  bool AtEnd() const { return pos_ == end_; }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

// Checks magic, version and checksum; returns a reader over the payload
// positioned after the header.
Reader OpenPayload(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  Reader r(bytes, body);
  r.Skip(sizeof(kMagic));
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Reader tail(bytes, bytes.size());
  tail.Skip(body);
  if (tail.U64() != Fnv1a(bytes.data(), body)) {
    throw FormatError("checkpoint checksum mismatch");
  }
  return r;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string EncodeCheckpoint(const Checkpoint& checkpoint) {
  const TrainerState& s = checkpoint.state;
  Writer w;
  w.Raw(kMagic, sizeof(kMagic));
  w.U32(kCheckpointVersion);
  w.Str(checkpoint.config_text);
  w.Spec(s.gen_spec);
  w.Params(s.gen);
  w.Spec(s.disc_spec);
  w.Params(s.disc);
  w.Opt(s.disc_opt);
  w.Opt(s.gen_opt);
  w.F64(s.ledger.q());
  w.F64(s.ledger.sigma_n());
  w.Vec(s.ledger.lambda_grid());
  w.U64(s.ledger.steps_taken());
  w.Str(s.rng.SerializeState());
  w.U64(s.sampler.dataset_size());
  w.U64(s.sampler.permutation().size());
  for (auto i : s.sampler.permutation()) w.U64(i);
  w.U64(s.sampler.position());
  w.U64(s.generator_iteration);
  w.U64(s.critic_steps);
  w.F64(s.c_g);
  w.F64(s.max_per_example_norm);
  w.U64(s.log.rows.size());
  for (const auto& row : s.log.rows) {
    w.U64(row.generator_iteration);
    w.F64(row.wasserstein_estimate);
    w.F64(row.epsilon_spent);
  }
  std::string& bytes = w.bytes();
  const std::uint64_t sum = Fnv1a(bytes.data(), bytes.size());
  w.U64(sum);
  return bytes;
}

Checkpoint DecodeCheckpoint(const std::string& bytes) {
  Reader r = OpenPayload(bytes);
  Checkpoint c;
  TrainerState& s = c.state;
  c.config_text = r.Str();
  s.gen_spec = r.Spec();
  s.gen = r.Params(s.gen_spec);
  s.disc_spec = r.Spec();
  s.disc = r.Params(s.disc_spec);
  s.disc_opt = r.Opt();
  s.gen_opt = r.Opt();
  if (s.disc_opt.running_sq_avg.size() != s.disc.NumParameters() ||
      s.gen_opt.running_sq_avg.size() != s.gen.NumParameters()) {
    throw FormatError("checkpoint optimizer state does not match the parameters");
  }
  const double q = r.F64();
  const double sigma = r.F64();
  auto grid = r.Vec();
  s.ledger = MomentsLedger(q, sigma, std::move(grid));
  s.ledger.set_steps_taken(r.U64());
  s.rng.RestoreState(r.Str());
  const std::uint64_t size = r.U64();
  std::vector<std::size_t> perm(r.Count());
  for (auto& i : perm) {
    i = r.U64();
    if (i >= size) throw FormatError("checkpoint sampler index out of range");
  }
  const std::uint64_t pos = r.U64();
  if (pos > perm.size()) throw FormatError("checkpoint sampler position out of range");
  s.sampler.Restore(size, std::move(perm), pos);
  s.generator_iteration = r.U64();
  s.critic_steps = r.U64();
  s.c_g = r.F64();
  s.max_per_example_norm = r.F64();
  const std::uint64_t rows = r.Count();
  for (std::uint64_t i = 0; i < rows; ++i) {
    MetricRow row;
    row.generator_iteration = r.U64();
    row.wasserstein_estimate = r.F64();
    row.epsilon_spent = r.F64();
    s.log.rows.push_back(row);
  }
  if (!r.AtEnd()) throw FormatError("checkpoint has trailing bytes");
  return c;
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path) {
  const std::string bytes = EncodeCheckpoint(checkpoint);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write checkpoint: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  return DecodeCheckpoint(ReadFile(path));
}

GeneratorSnapshot LoadGenerator(const std::string& path) {
  const std::string bytes = ReadFile(path);
  Reader r = OpenPayload(bytes);
  r.Str();
  GeneratorSnapshot g;
  g.spec = r.Spec();
  g.params = r.Params(g.spec);
  return g;
}

}  // namespace dpgan
