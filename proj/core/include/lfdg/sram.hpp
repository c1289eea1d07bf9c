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

#ifndef LFDG_SRAM_HPP_
#define LFDG_SRAM_HPP_

#include <span>
#include <vector>

#include "lfdg/mask_plan.hpp"
#include "lfdg/model.hpp"
#include "lfdg/rng.hpp"
#include "lfdg/tensor.hpp"

namespace lfdg {

struct SramConfig {
  double mask_ratio = 0.5;    // fraction of augmented patches hidden
  double beta = 2.0;          // weight of the term in the ascent objective
  double lambda_train = 1.0;  // weight of clean self-reconstruction in training
};

// Image-mask plans for reconstruction: ratio `mask_ratio`, positions kept.
// Throws DegenerateMask unless at least one patch is masked and two remain.
std::vector<MaskPlan> sample_sram_plans(std::size_t batch,
                                        const ModelConfig& model,
                                        double mask_ratio, Rng& rng);

// Source-reconstruction loss with augmentation masking.
//
// The encoder sees only the unmasked patches of `x_aug`; the decoder
// reconstructs the masked slots, which are scored by mean squared error
// against the patches of `x_src` at the same indices. Both images are
// [B, H, W, C].
Tensor sram_loss(const Tensor& x_src, const Tensor& x_aug,
                 std::span<const MaskPlan> plans, const ParamSet& params,
                 const ModelConfig& model);
// Same, drawing fresh plans from `rng`.
Tensor sram_loss(const Tensor& x_src, const Tensor& x_aug,
                 const ParamSet& params, const ModelConfig& model,
                 const SramConfig& cfg, Rng& rng);

}  // namespace lfdg

#endif  // LFDG_SRAM_HPP_
