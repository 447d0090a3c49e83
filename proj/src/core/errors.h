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

#ifndef DPGAN_CORE_ERRORS_H_
#define DPGAN_CORE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpgan {

// Bad caller input: dimension mismatch, out-of-range hyperparameter, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Files that cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CSV, config or checkpoint contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf encountered during training.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, long long iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  long long iteration() const { return iteration_; }

 private:
  long long iteration_;
};

// A mathematical precondition (clip constant, support) does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dpgan

#endif  // DPGAN_CORE_ERRORS_H_
