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

#ifndef LFDG_MODEL_HPP_
#define LFDG_MODEL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lfdg/image.hpp"
#include "lfdg/mask_plan.hpp"
#include "lfdg/params.hpp"
#include "lfdg/rng.hpp"
#include "lfdg/tensor.hpp"

namespace lfdg {

// Tiny Vision Transformer shared by the pretext heads and the segmentation
// head. Square images only.
struct ModelConfig {
  std::size_t image_size = 32;
  std::size_t channels = 3;
  std::size_t patch_size = 8;
  std::size_t embed_dim = 64;
  std::size_t depth = 2;
  std::size_t heads = 4;
  std::size_t mlp_ratio = 2;
  std::size_t decoder_depth = 1;

  std::size_t grid() const { return image_size / patch_size; }
  std::size_t n_patches() const { return grid() * grid(); }
  std::size_t patch_dim() const { return patch_size * patch_size * channels; }
  // Throws Error(kInvalidConfig).
  void validate() const;
};

// Parameters of the backbone plus the position head and the reconstruction
// decoder; everything that pretraining learns.
ParamSet init_params(const ModelConfig& cfg, Rng& rng);
// Segmentation head ("seg.w", "seg.b"), trained only during fine-tuning.
ParamSet init_seg_head(const ModelConfig& cfg, Rng& rng);
bool is_seg_head_param(const std::string& name);

// Patch extraction in raster order over the patch grid. Within a patch the
// layout is (dy, dx, c).
std::vector<double> patchify(const Image& image, const ModelConfig& cfg);
Image unpatchify(std::span<const double> patches, const ModelConfig& cfg);
// Differentiable: [B, H, W, C] -> [B*N, S*S*C].
Tensor patchify(const Tensor& images, const ModelConfig& cfg);

struct Encoded {
  Tensor latents;  // [B*V, D], visible patches in visible_idx order
  Tensor pooled;   // [B, D], z = mean of the visible latents per image
  std::size_t batch = 0;
  std::size_t tokens = 0;
};

// Embeds the visible patches of each image, adds the positional embedding
// (or the shared position-mask token where pos_keep == 0) and runs the
// transformer blocks. `patch_rows` is [B*N, P] from patchify().
Encoded encode(const Tensor& patch_rows, std::span<const MaskPlan> plans,
               const ParamSet& params, const ModelConfig& cfg);

// [B*V, N] logits over absolute patch positions.
Tensor position_head(const Encoded& enc, const ParamSet& params);
// [B*M, P] reconstructed pixels, one row per image-masked patch in
// masked_idx() order of each plan.
Tensor recon_head(const Encoded& enc, std::span<const MaskPlan> plans,
                  const ParamSet& params, const ModelConfig& cfg);
// 2-class logits for every pixel, [B, H, W, 2]: a linear map from each
// patch token to the logits of that patch's pixels. The encoding must come
// from full_mask_plan().
Tensor seg_head(const Encoded& enc, const ParamSet& head,
                const ModelConfig& cfg);

}  // namespace lfdg

#endif  // LFDG_MODEL_HPP_
