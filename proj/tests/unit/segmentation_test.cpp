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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lfdg/error.hpp"
#include "lfdg/ops.hpp"
#include "lfdg/segmentation.hpp"

namespace lfdg {
namespace {

// Images whose mask is "red channel above 0.5", so the head can learn it.
std::vector<SampleRecord> easy_records(const ModelConfig& cfg, std::size_t n, Rng& rng) {
  std::vector<SampleRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = i;
    out[i].image = testing::random_image(cfg, rng);
    out[i].mask.resize(cfg.image_size * cfg.image_size);
    // Whole patches share a label so a patch-level head can fit them.
    for (std::size_t y = 0; y < cfg.image_size; ++y) {
      for (std::size_t x = 0; x < cfg.image_size; ++x) {
        const std::size_t py = y / cfg.patch_size * cfg.patch_size;
        const std::size_t px = x / cfg.patch_size * cfg.patch_size;
        out[i].mask[y * cfg.image_size + x] = out[i].image.at(py, px, 0) > 0.5 ? 1 : 0;
      }
    }
  }
  return out;
}

std::vector<const SampleRecord*> ptrs(const std::vector<SampleRecord>& v) {
  std::vector<const SampleRecord*> out;
  for (const auto& r : v) out.push_back(&r);
  return out;
}

TEST(MetricsTest, WorkedExample) {
  ConfusionMatrix cm;
  cm.add(0, 0, 50);
  cm.add(0, 1, 10);
  cm.add(1, 0, 20);
  cm.add(1, 1, 20);
  const SegMetrics m = compute_metrics(cm);
  EXPECT_NEAR(m.overall_acc, 0.70, 1e-4);
  EXPECT_NEAR(m.mean_acc, (50.0 / 60 + 20.0 / 40) / 2, 1e-12);
  EXPECT_NEAR(m.mean_acc, 0.6667, 1e-4);
  EXPECT_NEAR(m.mean_iou, 0.5125, 1e-4);
  EXPECT_NEAR(m.freqw_acc, 0.535, 1e-4);
}

TEST(MetricsTest, PerfectPrediction) {
  ConfusionMatrix cm(3);
  cm.add(0, 0, 5);
  cm.add(1, 1, 7);
  cm.add(2, 2, 1);
  const SegMetrics m = compute_metrics(cm);
  EXPECT_EQ(m.mean_iou, 1.0);
  EXPECT_EQ(m.mean_acc, 1.0);
  EXPECT_EQ(m.overall_acc, 1.0);
  EXPECT_EQ(m.freqw_acc, 1.0);
}

TEST(MetricsTest, AbsentClassSkipped) {
  ConfusionMatrix cm;
  cm.add(0, 0, 30);
  cm.add(0, 1, 10);
  const SegMetrics m = compute_metrics(cm);
  EXPECT_DOUBLE_EQ(m.mean_acc, 0.75);
  EXPECT_DOUBLE_EQ(m.mean_iou, 0.75);
  EXPECT_DOUBLE_EQ(m.overall_acc, 0.75);
  EXPECT_DOUBLE_EQ(m.freqw_acc, 0.75);
}

TEST(MetricsTest, EmptyMatrix) {
  try {
    compute_metrics(ConfusionMatrix{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMatrix);
  }
}

TEST(MetricsTest, BruteForceRecountOnRandomMasks) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> truth(256), pred(256);
    const double p_fg = rng.uniform(0.05, 0.95);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < 256; ++i) {
      truth[i] = rng.uniform() < p_fg;
      pred[i] = rng.uniform() < 0.5 ? truth[i] : rng.uniform() < p_fg;
      cm.add(truth[i], pred[i]);
    }
    double acc_sum = 0, iou_sum = 0, fw = 0, correct = 0;
    int present = 0;
    for (int c = 0; c < 2; ++c) {
      double tp = 0, tc = 0, pc = 0;
      for (std::size_t i = 0; i < 256; ++i) {
        tp += truth[i] == c && pred[i] == c;
        tc += truth[i] == c;
        pc += pred[i] == c;
      }
      correct += tp;
      if (tc == 0) continue;
      ++present;
      acc_sum += tp / tc;
      iou_sum += tp / (tc + pc - tp);
      fw += tc * (tp / (tc + pc - tp));
    }
    const SegMetrics m = compute_metrics(cm);
    ASSERT_EQ(cm.total(), 256u);
    ASSERT_EQ(m.overall_acc, correct / 256.0);
    ASSERT_EQ(m.mean_acc, acc_sum / present);
    ASSERT_EQ(m.mean_iou, iou_sum / present);
    ASSERT_EQ(m.freqw_acc, fw / 256.0);
    for (double v : {m.overall_acc, m.mean_acc, m.mean_iou, m.freqw_acc}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    ASSERT_LE(m.mean_iou, m.mean_acc);
  }
}

TEST(MetricsTest, MoreCorrectPixelsNeverLowerOverallAcc) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    ConfusionMatrix cm;
    const std::uint64_t a = 1 + rng.uniform_index(50), b = rng.uniform_index(50);
    const std::uint64_t c = rng.uniform_index(50), d = 1 + rng.uniform_index(50);
    cm.add(0, 0, a);
    cm.add(0, 1, b);
    cm.add(1, 0, c);
    cm.add(1, 1, d);
    if (b == 0) continue;
    ConfusionMatrix fixed;
    fixed.add(0, 0, a + 1);
    fixed.add(0, 1, b - 1);
    fixed.add(1, 0, c);
    fixed.add(1, 1, d);
    const SegMetrics m0 = compute_metrics(cm), m1 = compute_metrics(fixed);
    EXPECT_GT(m1.overall_acc, m0.overall_acc);
    EXPECT_GT(m1.mean_iou, m0.mean_iou);
    EXPECT_GE(m1.freqw_acc, m0.freqw_acc);
  }
}

TEST(MetricsTest, AccumulationAddsCounts) {
  ConfusionMatrix a, b;
  a.add(0, 1, 3);
  b.add(0, 1, 4);
  b.add(1, 1, 2);
  a += b;
  EXPECT_EQ(a.at(0, 1), 7u);
  EXPECT_EQ(a.total(), 9u);
}

TEST(SplitTest, DisjointCoverAndDeterministic) {
  const LabeledSplit s = split_labeled(100, 0.2, 7);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.train.size(), 80u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 100u);
  EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
  EXPECT_EQ(split_labeled(100, 0.2, 7).test, s.test);
  EXPECT_NE(split_labeled(100, 0.2, 8).test, s.test);
  EXPECT_EQ(split_labeled(3, 0.01, 1).test.size(), 1u);
  EXPECT_THROW(split_labeled(1, 0.5, 1), Error);
}

TEST(FinetuneTest, ZeroStepsKeepsInitialHead) {
  const ModelConfig cfg = testing::tiny_model();
  Rng rng(3);
  const ParamSet backbone = init_params(cfg, rng);
  const auto recs = easy_records(cfg, 6, rng);
  FinetuneConfig ft;
  ft.steps = 0;
  ft.seed = 11;
  const FinetuneResult r = finetune_frozen(backbone, ptrs(recs), cfg, ft);
  Rng head_rng(11);
  EXPECT_TRUE(r.head.bit_equal(init_seg_head(cfg, head_rng)));
  EXPECT_TRUE(r.loss_trace.empty());

  // Recount the random head's predictions pixel by pixel.
  const ConfusionMatrix cm = evaluate_segmentation(backbone, r.head, ptrs(recs), cfg);
  ConfusionMatrix oracle;
  const MaskPlan plan = full_mask_plan(cfg.n_patches());
  for (const auto& rec : recs) {
    const Image* img = &rec.image;
    const Tensor x = stack_images(std::span<const Image* const>(&img, 1));
    const Encoded enc = encode(patchify(x, cfg), std::span<const MaskPlan>(&plan, 1),
                               backbone, cfg);
    const Tensor out = seg_head(enc, r.head, cfg);
    const auto logits = out.values();
    for (std::size_t p = 0; p < rec.mask.size(); ++p) {
      oracle.add(rec.mask[p], logits[2 * p + 1] > logits[2 * p] ? 1 : 0);
    }
  }
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(cm.at(i, j), oracle.at(i, j));
  }
}

TEST(FinetuneTest, BackboneUntouchedAndHeadLearns) {
  const ModelConfig cfg = testing::tiny_model();
  Rng rng(4);
  ParamSet backbone = init_params(cfg, rng);
  backbone.set_requires_grad(true);
  const std::uint64_t before = backbone.checksum();
  const auto recs = easy_records(cfg, 40, rng);
  FinetuneConfig ft;
  ft.steps = 500;
  ft.batch_size = 8;
  ft.adam.lr = 1e-2;
  const FinetuneResult r = finetune_frozen(backbone, ptrs(recs), cfg, ft);
  EXPECT_EQ(backbone.checksum(), before);
  for (const auto& name : backbone.names()) EXPECT_FALSE(backbone.at(name).has_grad());
  ASSERT_EQ(r.loss_trace.size(), 500u);
  double first = 0, last = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    first += r.loss_trace[i];
    last += r.loss_trace[450 + i];
  }
  EXPECT_LT(last, first);
  for (const auto& name : r.head.names()) EXPECT_TRUE(is_seg_head_param(name)) << name;
}

TEST(FinetuneTest, DeterministicAndEmptyRejected) {
  const ModelConfig cfg = testing::tiny_model();
  Rng rng(5);
  const ParamSet backbone = init_params(cfg, rng);
  const auto recs = easy_records(cfg, 8, rng);
  FinetuneConfig ft;
  ft.steps = 20;
  ft.batch_size = 4;
  const auto a = finetune_frozen(backbone, ptrs(recs), cfg, ft);
  const auto b = finetune_frozen(backbone, ptrs(recs), cfg, ft);
  EXPECT_TRUE(a.head.bit_equal(b.head));
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  try {
    finetune_frozen(backbone, {}, cfg, ft);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
}

TEST(FinetuneTest, FrozenFeaturesMatchEncoder) {
  const ModelConfig cfg = testing::tiny_model();
  Rng rng(6);
  const ParamSet backbone = init_params(cfg, rng);
  const auto recs = easy_records(cfg, 3, rng);
  const auto feats = frozen_features(backbone, ptrs(recs), cfg);
  ASSERT_EQ(feats.size(), 3u);
  const MaskPlan plan = full_mask_plan(cfg.n_patches());
  const Image* img = &recs[2].image;
  const Tensor x = stack_images(std::span<const Image* const>(&img, 1));
  const Encoded enc = encode(patchify(x, cfg), std::span<const MaskPlan>(&plan, 1), backbone, cfg);
  const auto want = enc.latents.values();
  ASSERT_EQ(feats[2].size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(feats[2][i], want[i], 1e-12);
}

}  // namespace
}  // namespace lfdg
