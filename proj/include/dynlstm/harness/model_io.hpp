// Copyright 2026 The dynlstm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// On-disk formats.
//
// Model: a text manifest plus a raw blob of little-endian FP32 values.
//
//   format = dynlstm-model
//   version = 1
//   blob = toy.bin
//   blob_bytes = 4352
//   layers = 1
//   layer.0.input_size = 8
//   layer.0.cell_size = 8
//   layer.0.input.w_x = <offset> <bytes>
//   layer.0.input.w_h = <offset> <bytes>
//   layer.0.input.b = <offset> <bytes>
//   ... forget, updater, output ...
//
// Matrices are row-major. The blob path is relative to the manifest. The
// declared regions must tile the blob exactly.
//
// Sequence: 16-byte header ("DLSQ", u32 version, u32 steps, u32 width, all
// little-endian) followed by steps * width FP32 values, step-major.

#ifndef DYNLSTM_HARNESS_MODEL_IO_HPP_
#define DYNLSTM_HARNESS_MODEL_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dynlstm/lstm_ref.hpp"

namespace dynlstm::harness {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kSequenceFormatVersion = 1;

// Writes `manifest_path` and the blob next to it (named `blob_name`, or the
// manifest's file name with ".bin" appended).
void write_model(const LstmModel& model, const std::string& manifest_path,
                 const std::string& blob_name = "");
LstmModel load_model(const std::string& manifest_path);

// In-memory forms, used by the file functions and by tests.
struct ModelFiles {
  std::string manifest;
  std::vector<std::uint8_t> blob;
};
ModelFiles encode_model(const LstmModel& model, const std::string& blob_name);
LstmModel decode_model(const std::string& manifest,
                       const std::vector<std::uint8_t>& blob);

void write_sequence(const InputSequence& seq, const std::string& path);
InputSequence load_sequence(const std::string& path);
std::vector<std::uint8_t> encode_sequence(const InputSequence& seq);
InputSequence decode_sequence(const std::vector<std::uint8_t>& bytes);

}  // namespace dynlstm::harness

#endif  // DYNLSTM_HARNESS_MODEL_IO_HPP_
