// Copyright 2026 The LFDG Authors
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

#ifndef LFDG_CHECKPOINT_HPP_
#define LFDG_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lfdg/params.hpp"

namespace lfdg {

// Binary container, all integers little-endian:
//   "LFDG" | version u32 | entry count u32 |
//   per entry: name length u32, UTF-8 name, rank u32, dims u32[rank],
//              f64 payload (little-endian IEEE-754), product(dims) values.
// Entries are written in ParamSet (lexicographic) order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const ParamSet& params);
// Throws Error(kCorruptCheckpoint) on any structural problem.
ParamSet decode_checkpoint(std::span<const std::uint8_t> bytes);

// Writes via a temporary file and rename. Throws Error(kIo).
void save_checkpoint(const std::filesystem::path& path, const ParamSet& params);
// Throws Error(kIo) if unreadable, Error(kCorruptCheckpoint) if malformed.
ParamSet load_checkpoint(const std::filesystem::path& path);

}  // namespace lfdg

#endif  // LFDG_CHECKPOINT_HPP_
