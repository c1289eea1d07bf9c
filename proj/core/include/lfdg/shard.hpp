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

#ifndef LFDG_SHARD_HPP_
#define LFDG_SHARD_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "lfdg/image.hpp"

namespace lfdg {

// Marks the calling thread as acting on behalf of one client for the
// lifetime of the scope. UnlabeledShard reads are only legal inside a scope
// of the owning client (or outside every scope, for setup code).
class ShardAccessScope {
 public:
  explicit ShardAccessScope(std::size_t client_id);
  ~ShardAccessScope();
  ShardAccessScope(const ShardAccessScope&) = delete;
  ShardAccessScope& operator=(const ShardAccessScope&) = delete;

  static std::optional<std::size_t> active_client();

 private:
  std::optional<std::size_t> previous_;
};

// A client's private, label-free image shard. There is deliberately no
// accessor for masks and no way to hand images to another owner.
class UnlabeledShard {
 public:
  UnlabeledShard() = default;
  UnlabeledShard(std::size_t owner, std::vector<Image> images,
                 std::vector<std::size_t> ids);

  std::size_t owner() const { return owner_; }
  std::size_t size() const { return images_.size(); }
  std::size_t id(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::size_t>& ids() const { return ids_; }
  // Index of an image id, if present.
  std::optional<std::size_t> find(std::size_t id) const;

  // Throws Error(kPrivacyViolation) when called inside another client's
  // ShardAccessScope.
  const Image& image(std::size_t index) const;
  std::vector<const Image*> all() const;

  // Number of image() reads served so far.
  std::size_t reads() const { return reads_; }

 private:
  void check_access() const;

  std::size_t owner_ = 0;
  std::vector<Image> images_;
  std::vector<std::size_t> ids_;
  mutable std::size_t reads_ = 0;
};

}  // namespace lfdg

#endif  // LFDG_SHARD_HPP_
