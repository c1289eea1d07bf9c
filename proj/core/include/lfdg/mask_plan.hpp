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

#ifndef LFDG_MASK_PLAN_HPP_
#define LFDG_MASK_PLAN_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lfdg/rng.hpp"

namespace lfdg {

// Two-level masking plan for one image.
//
// Image-masked patches never reach the encoder. Of the visible patches,
// those with pos_keep == 0 lose their positional embedding and become
// targets of the position-prediction loss.
struct MaskPlan {
  std::size_t n_patches = 0;
  double gamma_img = 0.0;
  double gamma_pos = 0.0;
  // Sorted ascending, |visible_idx| = round((1 - gamma_img) * n_patches).
  std::vector<std::size_t> visible_idx;
  // One flag per visible patch (same order as visible_idx).
  std::vector<std::uint8_t> pos_keep;

  std::size_t visible_count() const { return visible_idx.size(); }
  std::size_t dropped_count() const;
  // Complement of visible_idx, sorted ascending.
  std::vector<std::size_t> masked_idx() const;
  // Throws Error(kPlanMismatch) if internally inconsistent.
  void validate() const;
};

// Samples a plan uniformly without replacement.
//
// round((1 - gamma_img) * n) patches stay visible (DegenerateMask if < 2).
// round(gamma_pos * V) of them, but at least one when gamma_pos > 0, lose
// their position.
MaskPlan sample_mask_plan(std::size_t n_patches, double gamma_img,
                          double gamma_pos, Rng& rng);

// All patches visible, all positions kept.
MaskPlan full_mask_plan(std::size_t n_patches);

}  // namespace lfdg

#endif  // LFDG_MASK_PLAN_HPP_
