// Copyright 2026 The DGANN Authors.
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
#include <filesystem>
#include <string>

#include "dgann/train.h"

namespace dgann {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers and scalars little-endian:
///   "DGNN", u32 version,
///   model config: u64 d_model, n_heads, n_interaction, n_transformer,
///     ffn_multiplier,
///   transform: string target, u8 has_lsm, f64 theta[6], f64 mean, f64 std,
///   u64 seed, u64 best_epoch, f64 best_val_mae,
///   u64 parameter count, then per parameter: string name, u32 rank,
///     u64 dims[rank], f64 values[product(dims)].
/// Strings are a u32 byte length followed by the bytes.
std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws std::runtime_error on bad magic, unsupported version, truncation
/// or trailing bytes.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dgann
