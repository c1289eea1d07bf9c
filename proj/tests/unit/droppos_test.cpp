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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "grad_check.hpp"
#include "lfdg/droppos.hpp"
#include "lfdg/error.hpp"
#include "lfdg/mask_plan.hpp"
#include "lfdg/ops.hpp"

namespace lfdg {
namespace {

// Plan over n patches with the first v visible and the first k of those
// position-dropped.
MaskPlan plan_with(std::size_t n, std::size_t v, std::size_t k) {
  MaskPlan p;
  p.n_patches = n;
  for (std::size_t i = 0; i < v; ++i) {
    p.visible_idx.push_back(i);
    p.pos_keep.push_back(i < k ? 0 : 1);
  }
  return p;
}

// Softmax cross-entropy restricted to visible columns, averaged over the
// dropped rows, computed directly.
double reference_loss(const std::vector<double>& logits, const MaskPlan& plan) {
  const std::size_t n = plan.n_patches, v = plan.visible_count();
  double total = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < v; ++i) {
    if (plan.pos_keep[i]) continue;
    double denom = 0.0;
    for (std::size_t c : plan.visible_idx) denom += std::exp(logits[i * n + c]);
    total += -(logits[i * n + plan.visible_idx[i]] - std::log(denom));
    ++rows;
  }
  return rows ? total / static_cast<double>(rows) : 0.0;
}

TEST(MaskPlanTest, NoMasking) {
  Rng rng(1);
  const MaskPlan p = sample_mask_plan(16, 0.0, 0.0, rng);
  EXPECT_EQ(p.visible_count(), 16u);
  for (auto k : p.pos_keep) EXPECT_EQ(k, 1);
  EXPECT_TRUE(p.masked_idx().empty());
}

TEST(MaskPlanTest, CountsAndDistinctness) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const MaskPlan p = sample_mask_plan(16, 0.25, 0.75, rng);
    ASSERT_EQ(p.visible_count(), 12u);
    EXPECT_EQ(std::set<std::size_t>(p.visible_idx.begin(), p.visible_idx.end()).size(), 12u);
    EXPECT_TRUE(std::is_sorted(p.visible_idx.begin(), p.visible_idx.end()));
    EXPECT_EQ(p.dropped_count(), 9u);
    EXPECT_EQ(p.masked_idx().size(), 4u);
  }
}

TEST(MaskPlanTest, AtLeastOneDroppedWhenGammaPosPositive) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    EXPECT_GE(sample_mask_plan(4, 0.5, 0.01, rng).dropped_count(), 1u);
  }
}

TEST(MaskPlanTest, DeterministicGivenSeed) {
  Rng a(4), b(4);
  for (int t = 0; t < 20; ++t) {
    const MaskPlan p = sample_mask_plan(16, 0.25, 0.5, a);
    const MaskPlan q = sample_mask_plan(16, 0.25, 0.5, b);
    EXPECT_EQ(p.visible_idx, q.visible_idx);
    EXPECT_EQ(p.pos_keep, q.pos_keep);
  }
}

TEST(MaskPlanTest, DegenerateMaskRejected) {
  Rng rng(5);
  try {
    sample_mask_plan(4, 0.8, 0.5, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateMask);
  }
  EXPECT_THROW(sample_mask_plan(16, 1.0, 0.5, rng), Error);
  EXPECT_THROW(sample_mask_plan(16, 0.2, 1.5, rng), Error);
}

TEST(MaskPlanTest, PositionDropFrequencyMonteCarlo) {
  Rng rng(6);
  const int samples = 10000;
  std::vector<double> dropped(16, 0.0), visible(16, 0.0);
  for (int s = 0; s < samples; ++s) {
    const MaskPlan p = sample_mask_plan(16, 0.25, 0.5, rng);
    for (std::size_t i = 0; i < p.visible_count(); ++i) {
      visible[p.visible_idx[i]] += 1.0;
      if (!p.pos_keep[i]) dropped[p.visible_idx[i]] += 1.0;
    }
  }
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(dropped[i] / visible[i], 0.5, 0.02) << "patch " << i;
    EXPECT_NEAR(visible[i] / samples, 0.75, 0.02) << "patch " << i;
  }
}

TEST(DropPosLossTest, AllPositionsKeptGivesZero) {
  const MaskPlan plan = plan_with(16, 12, 0);
  Rng rng(7);
  Tensor logits = testing::random_tensor({12, 16}, rng);
  EXPECT_EQ(droppos_loss(logits, plan).item(), 0.0);
}

TEST(DropPosLossTest, UniformLogitsGiveLogV) {
  for (std::size_t v : {2u, 4u, 12u, 16u}) {
    for (std::size_t k : {std::size_t{1}, v / 2, v}) {
      const MaskPlan plan = plan_with(16, v, k);
      const Tensor logits = Tensor::full({v, 16}, 0.3);
      EXPECT_NEAR(droppos_loss(logits, plan).item(), std::log(static_cast<double>(v)), 1e-12)
          << "V=" << v << " k=" << k;
    }
  }
  EXPECT_NEAR(std::log(12.0), 2.4849, 1e-4);
}

TEST(DropPosLossTest, LargeMarginOnTrueColumn) {
  const MaskPlan plan = plan_with(16, 12, 12);
  std::vector<double> v(12 * 16, 0.0);
  for (std::size_t i = 0; i < 12; ++i) v[i * 16 + plan.visible_idx[i]] = 10.0;
  const double loss = droppos_loss(Tensor::from_values({12, 16}, v), plan).item();
  EXPECT_NEAR(loss, std::log1p(11.0 * std::exp(-10.0)), 1e-12);
  EXPECT_NEAR(loss, 4.99e-4, 1e-6);
}

TEST(DropPosLossTest, MatchesDirectComputation) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const MaskPlan plan = sample_mask_plan(16, 0.25, 0.6, rng);
    std::vector<double> v(plan.visible_count() * 16);
    for (double& x : v) x = rng.uniform(-4, 4);
    const double got = droppos_loss(Tensor::from_values({plan.visible_count(), 16}, v), plan).item();
    EXPECT_NEAR(got, reference_loss(v, plan), 1e-12);
    EXPECT_GE(got, 0.0);
  }
}

TEST(DropPosLossTest, RowShiftInvariance) {
  Rng rng(9);
  const MaskPlan plan = sample_mask_plan(16, 0.25, 0.75, rng);
  std::vector<double> v(12 * 16);
  for (double& x : v) x = rng.uniform(-2, 2);
  const double base = droppos_loss(Tensor::from_values({12, 16}, v), plan).item();
  for (std::size_t i = 0; i < 12; ++i) {
    const double c = rng.uniform(-50, 50);
    for (std::size_t j = 0; j < 16; ++j) v[i * 16 + j] += c;
  }
  EXPECT_NEAR(droppos_loss(Tensor::from_values({12, 16}, v), plan).item(), base, 1e-10);
}

TEST(DropPosLossTest, IgnoresMaskedColumns) {
  Rng rng(10);
  const MaskPlan plan = sample_mask_plan(16, 0.25, 0.75, rng);
  std::vector<double> v(12 * 16);
  for (double& x : v) x = rng.uniform(-2, 2);
  const double base = droppos_loss(Tensor::from_values({12, 16}, v), plan).item();
  for (std::size_t c : plan.masked_idx()) {
    for (std::size_t i = 0; i < 12; ++i) v[i * 16 + c] = 100.0;
  }
  EXPECT_EQ(droppos_loss(Tensor::from_values({12, 16}, v), plan).item(), base);
}

TEST(DropPosLossTest, ShapeMismatch) {
  const MaskPlan plan = plan_with(16, 12, 3);
  try {
    droppos_loss(Tensor::zeros({11, 16}), plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(DropPosLossTest, GradientMatchesFiniteDifferences) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const MaskPlan plan = sample_mask_plan(16, 0.25, 0.5, rng);
    Tensor logits = testing::random_tensor({12, 16}, rng, -3, 3);
    auto f = [&] { return droppos_loss(logits, plan); };
    EXPECT_LE(testing::check_gradients(f, {logits}, rng).rel_error, 1e-4);
  }
}

TEST(DropPosLossTest, EndToEndGradientThroughModel) {
  const ModelConfig cfg = testing::tiny_model();
  Rng rng(12);
  ParamSet params = init_params(cfg, rng);
  params.set_requires_grad(true);
  const auto images = testing::random_images(2, cfg, rng);
  const auto ptrs = testing::pointers(images);
  const auto plans = sample_droppos_plans(2, cfg, DropPosConfig{0.25, 0.75}, rng);
  std::vector<Tensor> leaves = {params.at("patch_embed.w"), params.at("blocks.0.attn.qkv.w"),
                                params.at("head.pos.w"), params.at("pos_mask_token")};
  auto f = [&] { return droppos_forward(stack_images(ptrs), plans, params, cfg).loss; };
  EXPECT_LE(testing::check_gradients(f, leaves, rng, 20).rel_error, 1e-4);
}

}  // namespace
}  // namespace lfdg
