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

#include "lfdg/sram.hpp"

#include "lfdg/error.hpp"
#include "lfdg/ops.hpp"

namespace lfdg {

std::vector<MaskPlan> sample_sram_plans(std::size_t batch,
                                        const ModelConfig& model,
                                        double mask_ratio, Rng& rng) {
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) {
    throw Error(ErrorCode::kDegenerateMask, "SRAM mask ratio must lie in (0, 1)");
  }
  std::vector<MaskPlan> plans;
  plans.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    MaskPlan plan = sample_mask_plan(model.n_patches(), mask_ratio, 0.0, rng);
    if (plan.visible_count() == plan.n_patches) {
      throw Error(ErrorCode::kDegenerateMask, "SRAM mask ratio masks no patch");
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

Tensor sram_loss(const Tensor& x_src, const Tensor& x_aug,
                 std::span<const MaskPlan> plans, const ParamSet& params,
                 const ModelConfig& model) {
  if (x_src.shape() != x_aug.shape()) {
    throw Error(ErrorCode::kDimMismatch,
                "source " + shape_to_string(x_src.shape()) + " vs augmented " +
                    shape_to_string(x_aug.shape()));
  }
  const Tensor aug_rows = patchify(x_aug, model);
  const Encoded enc = encode(aug_rows, plans, params, model);
  const Tensor reconstructed = recon_head(enc, plans, params, model);

  const std::size_t n = model.n_patches();
  std::vector<std::size_t> target_rows;
  for (std::size_t b = 0; b < plans.size(); ++b) {
    for (std::size_t p : plans[b].masked_idx()) target_rows.push_back(b * n + p);
  }
  const Tensor target = gather_rows(patchify(x_src, model), target_rows);
  return mse(reconstructed, target);
}

Tensor sram_loss(const Tensor& x_src, const Tensor& x_aug,
                 const ParamSet& params, const ModelConfig& model,
                 const SramConfig& cfg, Rng& rng) {
  if (x_aug.rank() != 4) {
    throw Error(ErrorCode::kDimMismatch, "expected a [B, H, W, C] batch");
  }
  const auto plans = sample_sram_plans(x_aug.dim(0), model, cfg.mask_ratio, rng);
  return sram_loss(x_src, x_aug, plans, params, model);
}

}  // namespace lfdg
