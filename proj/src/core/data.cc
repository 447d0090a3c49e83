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

#include "core/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "core/errors.h"
#include "core/rng.h"

namespace dpgan {

RecordMatrix::RecordMatrix(Matrix values, RecordKind kind)
    : values_(std::move(values)), kind_(kind) {
  for (double v : values_.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("record matrix has non-finite entry");
    if (kind_ == RecordKind::kBinary && v != 0.0 && v != 1.0) {
      throw InvalidArgument("binary record matrix has entry outside {0, 1}");
    }
  }
}

double RecordMatrix::MaxRowNorm() const {
  double m = 0.0;
  for (std::size_t r = 0; r < rows(); ++r) {
    double s = 0.0;
    for (double v : row(r)) s += v * v;
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

RecordMatrix RecordMatrix::Select(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows()) throw InvalidArgument("row index out of range");
    const auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  RecordMatrix r;
  r.values_ = std::move(out);
  r.kind_ = kind_;
  r.norm_bound_ = norm_bound_;
  return r;
}

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> ParseCell(const std::string& raw) {
  std::size_t b = raw.find_first_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  std::size_t e = raw.find_last_not_of(" \t");
  const char* first = raw.data() + b;
  const char* last = raw.data() + e + 1;
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

LoadReport LoadCsv(const std::string& path, bool has_header, RecordKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<double> cells;
  std::size_t rows = 0;
  LoadReport report;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = SplitFields(line);
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw FormatError(path + ": ragged row at line " + std::to_string(line_no) +
                        " (" + std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(width) + ")");
    }
    std::vector<double> parsed;
    parsed.reserve(width);
    bool ok = true;
    for (const auto& f : fields) {
      auto v = ParseCell(f);
      if (!v) {
        ok = false;
        break;
      }
      double x = *v;
      if (kind == RecordKind::kBinary) x = (x != 0.0) ? 1.0 : 0.0;
      parsed.push_back(x);
    }
    if (!ok) {
      ++report.dropped_rows;
      continue;
    }
    cells.insert(cells.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (width == 0) throw FormatError(path + ": file contains no records");
  Matrix m(rows, width);
  m.values() = std::move(cells);
  report.data = RecordMatrix(std::move(m), kind);
  return report;
}

}  // namespace

LoadReport LoadBinaryCsv(const std::string& path, bool has_header) {
  return LoadCsv(path, has_header, RecordKind::kBinary);
}

LoadReport LoadContinuousCsv(const std::string& path, bool has_header) {
  return LoadCsv(path, has_header, RecordKind::kContinuous);
}

void SaveCsv(const RecordMatrix& data, const std::string& path,
             const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write data file: " + path);
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      out << (c ? "," : "") << header[c];
    }
    out << '\n';
  }
  out.precision(17);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (data.kind() == RecordKind::kBinary) {
        out << static_cast<int>(row[c]);
      } else {
        out << row[c];
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing data file: " + path);
}

RecordMatrix EnforceNormBound(const RecordMatrix& data, double b_x) {
  if (!(b_x > 0.0)) throw InvalidArgument("norm bound must be positive");
  Matrix m = data.values();
  auto row_norm = [](std::span<const double> row) {
    double s = 0.0;
    for (double v : row) s += v * v;
    return std::sqrt(s);
  };
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const double norm = row_norm(row);
    if (norm > b_x) {
      double scale = b_x / norm;
      // Rounding can leave the rescaled norm an ulp above b_x.
      do {
        for (double& v : row) v = data.row(r)[&v - row.data()] * scale;
        scale = std::nextafter(scale, 0.0);
      } while (row_norm(row) > b_x);
    }
  }
  // Scaling can leave a binary matrix with fractional entries.
  const bool still_binary =
      data.kind() == RecordKind::kBinary &&
      std::all_of(m.values().begin(), m.values().end(),
                  [](double v) { return v == 0.0 || v == 1.0; });
  RecordMatrix out(std::move(m),
                   still_binary ? RecordKind::kBinary : RecordKind::kContinuous);
  out.norm_bound_ = b_x;
  return out;
}

RecordMatrix GenGaussianMixture(std::size_t n, const std::vector<Point2>& centers,
                                double std_dev, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("mixture needs at least one point");
  if (centers.empty()) throw InvalidArgument("mixture needs at least one center");
  if (!(std_dev >= 0.0)) throw InvalidArgument("mixture std must be nonnegative");
  Matrix m(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(seed, i));
    const Point2& c = centers[rng.Index(centers.size())];
    m(i, 0) = c.x + std_dev * rng.NextGaussian();
    m(i, 1) = c.y + std_dev * rng.NextGaussian();
  }
  return RecordMatrix(std::move(m), RecordKind::kContinuous);
}

RecordMatrix GenCorrelatedBinary(std::size_t n, std::size_t dims,
                                 const std::vector<double>& base_probs,
                                 const std::vector<PairCoupling>& couplings,
                                 std::uint64_t seed) {
  if (dims == 0) throw InvalidArgument("binary generator needs dims >= 1");
  if (base_probs.size() != dims) {
    throw InvalidArgument("base_probs has " + std::to_string(base_probs.size()) +
                          " entries for " + std::to_string(dims) + " dims");
  }
  for (double p : base_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("base_probs must lie in [0, 1]");
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(dims, dims);
  for (const auto& c : couplings) {
    const std::string pair =
        "(" + std::to_string(c.i) + ", " + std::to_string(c.j) + ")";
    if (c.i >= dims || c.j >= dims || c.i == c.j) {
      throw InvalidArgument("invalid coupling pair " + pair);
    }
    cov(c.i, c.j) = c.strength;
    cov(c.j, c.i) = c.strength;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw PreconditionError("coupling " + pair +
                              " makes the latent covariance non positive definite");
    }
  }
  const Eigen::MatrixXd lower = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

  // x_i = 1 iff latent_i > Phi^{-1}(1 - p_i).
  const boost::math::normal_distribution<double> std_normal;
  std::vector<double> thresholds(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double p = base_probs[d];
    if (p <= 0.0) {
      thresholds[d] = std::numeric_limits<double>::infinity();
    } else if (p >= 1.0) {
      thresholds[d] = -std::numeric_limits<double>::infinity();
    } else {
      thresholds[d] = boost::math::quantile(std_normal, 1.0 - p);
    }
  }

  Matrix m(n, dims);
  Eigen::VectorXd e(dims);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(seed, i));
    for (std::size_t d = 0; d < dims; ++d) e(d) = rng.NextGaussian();
    const Eigen::VectorXd latent = lower * e;
    for (std::size_t d = 0; d < dims; ++d) {
      m(i, d) = latent(d) > thresholds[d] ? 1.0 : 0.0;
    }
  }
  return RecordMatrix(std::move(m), RecordKind::kBinary);
}

}  // namespace dpgan
