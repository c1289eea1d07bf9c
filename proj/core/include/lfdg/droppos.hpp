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

#ifndef LFDG_DROPPOS_HPP_
#define LFDG_DROPPOS_HPP_

#include <span>
#include <vector>

#include "lfdg/mask_plan.hpp"
#include "lfdg/model.hpp"
#include "lfdg/tensor.hpp"

namespace lfdg {

struct DropPosConfig {
  double gamma_img = 0.25;  // fraction of patches hidden from the encoder
  double gamma_pos = 0.75;  // fraction of visible patches without position
};

// Position-prediction loss over a batch.
//
// `position_logits` is [B*V, N]; row i of image b predicts the absolute
// position of that image's i-th visible patch. The softmax of each row is
// restricted to the image's visible positions and only rows with
// pos_keep == 0 contribute. The sum is divided by the number of such rows,
// so the loss equals ln(V) under uniform logits regardless of gamma_pos.
// Returns 0 (with zero gradients) if no row has a dropped position.
Tensor droppos_loss(const Tensor& position_logits,
                    std::span<const MaskPlan> plans);
Tensor droppos_loss(const Tensor& position_logits, const MaskPlan& plan);

struct DropPosForward {
  Tensor loss;
  Encoded encoded;
};

// patchify -> encode -> position_head -> droppos_loss for [B, H, W, C].
DropPosForward droppos_forward(const Tensor& images,
                               std::span<const MaskPlan> plans,
                               const ParamSet& params, const ModelConfig& cfg);

std::vector<MaskPlan> sample_droppos_plans(std::size_t batch,
                                           const ModelConfig& model,
                                           const DropPosConfig& cfg, Rng& rng);

}  // namespace lfdg

#endif  // LFDG_DROPPOS_HPP_
