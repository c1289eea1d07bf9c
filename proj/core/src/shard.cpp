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

#include "lfdg/shard.hpp"

#include <string>

#include "lfdg/error.hpp"

namespace lfdg {
namespace {

thread_local std::optional<std::size_t> t_active_client;

}  // namespace

ShardAccessScope::ShardAccessScope(std::size_t client_id)
    : previous_(t_active_client) {
  t_active_client = client_id;
}

ShardAccessScope::~ShardAccessScope() { t_active_client = previous_; }

std::optional<std::size_t> ShardAccessScope::active_client() {
  return t_active_client;
}

UnlabeledShard::UnlabeledShard(std::size_t owner, std::vector<Image> images,
                               std::vector<std::size_t> ids)
    : owner_(owner), images_(std::move(images)), ids_(std::move(ids)) {
  if (images_.size() != ids_.size()) {
    throw Error(ErrorCode::kDimMismatch, "shard image/id count mismatch");
  }
}

std::optional<std::size_t> UnlabeledShard::find(std::size_t id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

void UnlabeledShard::check_access() const {
  const auto active = t_active_client;
  if (active && *active != owner_) {
    throw Error(ErrorCode::kPrivacyViolation,
                "client " + std::to_string(*active) + " read the shard of client " +
                    std::to_string(owner_));
  }
}

const Image& UnlabeledShard::image(std::size_t index) const {
  check_access();
  ++reads_;
  return images_.at(index);
}

std::vector<const Image*> UnlabeledShard::all() const {
  check_access();
  reads_ += images_.size();
  std::vector<const Image*> out;
  out.reserve(images_.size());
  for (const Image& img : images_) out.push_back(&img);
  return out;
}

}  // namespace lfdg
