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

#include "lfdg/mask_plan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfdg/error.hpp"

namespace lfdg {

std::size_t MaskPlan::dropped_count() const {
  return static_cast<std::size_t>(
      std::count(pos_keep.begin(), pos_keep.end(), std::uint8_t{0}));
}

std::vector<std::size_t> MaskPlan::masked_idx() const {
  std::vector<std::size_t> out;
  out.reserve(n_patches - visible_idx.size());
  std::size_t v = 0;
  for (std::size_t p = 0; p < n_patches; ++p) {
    if (v < visible_idx.size() && visible_idx[v] == p) {
      ++v;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

void MaskPlan::validate() const {
  if (pos_keep.size() != visible_idx.size()) {
    throw Error(ErrorCode::kPlanMismatch, "pos_keep size differs from visible_idx");
  }
  for (std::size_t i = 0; i < visible_idx.size(); ++i) {
    if (visible_idx[i] >= n_patches || (i > 0 && visible_idx[i] <= visible_idx[i - 1])) {
      throw Error(ErrorCode::kPlanMismatch,
                  "visible_idx must be strictly increasing and < n_patches");
    }
  }
}

MaskPlan sample_mask_plan(std::size_t n_patches, double gamma_img,
                          double gamma_pos, Rng& rng) {
  if (!(gamma_img >= 0.0 && gamma_img < 1.0)) {
    throw Error(ErrorCode::kDegenerateMask, "gamma_img must lie in [0, 1)");
  }
  if (!(gamma_pos >= 0.0 && gamma_pos <= 1.0)) {
    throw Error(ErrorCode::kDegenerateMask, "gamma_pos must lie in [0, 1]");
  }
  const auto visible = static_cast<std::size_t>(
      std::lround((1.0 - gamma_img) * static_cast<double>(n_patches)));
  if (visible < 2) {
    throw Error(ErrorCode::kDegenerateMask,
                "only " + std::to_string(visible) + " visible patches of " +
                    std::to_string(n_patches));
  }
  std::size_t dropped = static_cast<std::size_t>(
      std::lround(gamma_pos * static_cast<double>(visible)));
  if (gamma_pos > 0.0) dropped = std::max<std::size_t>(dropped, 1);
  dropped = std::min(dropped, visible);

  MaskPlan plan;
  plan.n_patches = n_patches;
  plan.gamma_img = gamma_img;
  plan.gamma_pos = gamma_pos;
  plan.visible_idx = rng.sample_without_replacement(n_patches, visible);
  std::sort(plan.visible_idx.begin(), plan.visible_idx.end());
  plan.pos_keep.assign(visible, 1);
  for (std::size_t slot : rng.sample_without_replacement(visible, dropped)) {
    plan.pos_keep[slot] = 0;
  }
  return plan;
}

MaskPlan full_mask_plan(std::size_t n_patches) {
  MaskPlan plan;
  plan.n_patches = n_patches;
  plan.visible_idx.resize(n_patches);
  for (std::size_t i = 0; i < n_patches; ++i) plan.visible_idx[i] = i;
  plan.pos_keep.assign(n_patches, 1);
  return plan;
}

}  // namespace lfdg
