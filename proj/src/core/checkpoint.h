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

#ifndef DPGAN_CORE_CHECKPOINT_H_
#define DPGAN_CORE_CHECKPOINT_H_

// Binary checkpoint: the 8-byte magic "DPGANCKP", a u32 format version, then
// little-endian fields (config text, network specs, parameters, RMSProp
// state, accountant, RNG state, batch sampler, counters, metric rows) and a
// trailing 64-bit FNV-1a checksum over everything before it.

#include <cstdint>
#include <string>

#include "core/tensor.h"
#include "core/trainer.h"

namespace dpgan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  // Raw config text of the run that produced the checkpoint.
  std::string config_text;
  TrainerState state;
};

std::string EncodeCheckpoint(const Checkpoint& checkpoint);
// Throws FormatError on a bad magic, unknown version, checksum mismatch or
// truncated input.
Checkpoint DecodeCheckpoint(const std::string& bytes);

// Writes through a temporary file and a rename.
void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path);
// Throws IoError when the file is unreadable, FormatError when corrupt.
Checkpoint LoadCheckpoint(const std::string& path);

struct GeneratorSnapshot {
  NetworkSpec spec;
  ParameterSet params;
};

// Generator-only view of a checkpoint file.
GeneratorSnapshot LoadGenerator(const std::string& path);

}  // namespace dpgan

#endif  // DPGAN_CORE_CHECKPOINT_H_
