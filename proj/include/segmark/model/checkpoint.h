// Copyright 2026 The segmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "segmark/model/segmenter.h"

namespace segmark::model {

// Binary layout, little-endian:
//   "SGMKCKPT"  u32 version  u64 header_bytes  header JSON
//   u64 count   count x f64 (embedding row-major, then dense tensors in
//               the order listed by the header)
inline constexpr char kCheckpointMagic[8] = {'S', 'G', 'M', 'K', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_checkpoint(const Segmenter& model,
                                 const nlohmann::json& meta = nullptr);
Segmenter deserialize_checkpoint(const std::string& bytes,
                                 nlohmann::json* meta = nullptr);

void save_checkpoint(const std::string& path, const Segmenter& model,
                     const nlohmann::json& meta = nullptr);
Segmenter load_checkpoint(const std::string& path, nlohmann::json* meta = nullptr);

// Hex FNV-1a of the checkpoint bytes; identifies cached artifacts.
std::string checkpoint_hash(const std::string& bytes);
std::string checkpoint_file_hash(const std::string& path);

}  // namespace segmark::model
