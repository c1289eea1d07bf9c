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

#include "lfdg/droppos.hpp"

#include <string>

#include "lfdg/error.hpp"
#include "lfdg/ops.hpp"

namespace lfdg {

Tensor droppos_loss(const Tensor& position_logits,
                    std::span<const MaskPlan> plans) {
  if (plans.empty()) throw Error(ErrorCode::kPlanMismatch, "no plans");
  const std::size_t n = plans[0].n_patches;
  const std::size_t v = plans[0].visible_count();
  if (position_logits.rank() != 2 || position_logits.dim(1) != n ||
      position_logits.dim(0) != plans.size() * v) {
    throw Error(ErrorCode::kShapeMismatch,
                "position logits " + shape_to_string(position_logits.shape()) +
                    " vs " + std::to_string(plans.size()) + " plans of V=" +
                    std::to_string(v) + ", N=" + std::to_string(n));
  }
  const std::size_t rows = plans.size() * v;
  std::vector<std::size_t> targets(rows);
  std::vector<std::uint8_t> active(rows);
  std::vector<std::uint8_t> allowed(rows * n, 0);
  for (std::size_t b = 0; b < plans.size(); ++b) {
    const MaskPlan& plan = plans[b];
    if (plan.n_patches != n || plan.visible_count() != v) {
      throw Error(ErrorCode::kPlanMismatch, "plans in a batch must share N and V");
    }
    for (std::size_t i = 0; i < v; ++i) {
      const std::size_t r = b * v + i;
      targets[r] = plan.visible_idx[i];
      active[r] = plan.pos_keep[i] ? 0 : 1;
      for (std::size_t p : plan.visible_idx) allowed[r * n + p] = 1;
    }
  }
  return cross_entropy_masked(position_logits, targets, active, allowed);
}

Tensor droppos_loss(const Tensor& position_logits, const MaskPlan& plan) {
  return droppos_loss(position_logits, std::span<const MaskPlan>(&plan, 1));
}

DropPosForward droppos_forward(const Tensor& images,
                               std::span<const MaskPlan> plans,
                               const ParamSet& params, const ModelConfig& cfg) {
  Encoded enc = encode(patchify(images, cfg), plans, params, cfg);
  Tensor loss = droppos_loss(position_head(enc, params), plans);
  return {std::move(loss), std::move(enc)};
}

std::vector<MaskPlan> sample_droppos_plans(std::size_t batch,
                                           const ModelConfig& model,
                                           const DropPosConfig& cfg, Rng& rng) {
  std::vector<MaskPlan> plans;
  plans.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    plans.push_back(sample_mask_plan(model.n_patches(), cfg.gamma_img, cfg.gamma_pos, rng));
  }
  return plans;
}

}  // namespace lfdg
