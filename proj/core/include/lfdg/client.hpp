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

#ifndef LFDG_CLIENT_HPP_
#define LFDG_CLIENT_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>

#include "lfdg/image.hpp"
#include "lfdg/params.hpp"
#include "lfdg/shard.hpp"

namespace lfdg {

// Adversarially perturbed copy of one of the client's own images.
struct AugmentedSample {
  Image x_aug;  // pixels clamped to [0, 1]
  std::size_t source_id = 0;
  std::size_t stage = 0;
  double initial_objective = 0.0;  // ascent objective right after init noise
  double final_objective = 0.0;    // ascent objective at termination
  bool non_finite = false;         // ascent aborted on a non-finite objective
};

// One simulated client. Only `params` ever leaves the client.
struct ClientState {
  std::size_t client_id = 0;
  UnlabeledShard shard;
  ParamSet params;
  std::deque<AugmentedSample> buffer;
  std::uint64_t seed = 0;
};

}  // namespace lfdg

#endif  // LFDG_CLIENT_HPP_
