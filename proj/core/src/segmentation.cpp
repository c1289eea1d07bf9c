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

#include "lfdg/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "lfdg/error.hpp"
#include "lfdg/ops.hpp"
#include "lfdg/rng.hpp"

namespace lfdg {
namespace {

Encoded batch_features(const std::vector<std::vector<double>>& features,
                       std::span<const std::size_t> rows, const ModelConfig& cfg) {
  const std::size_t n = cfg.n_patches(), d = cfg.embed_dim;
  std::vector<double> values;
  values.reserve(rows.size() * n * d);
  for (std::size_t r : rows) {
    values.insert(values.end(), features[r].begin(), features[r].end());
  }
  Encoded enc;
  enc.latents = Tensor::from_values({rows.size() * n, d}, std::move(values));
  enc.batch = rows.size();
  enc.tokens = n;
  return enc;
}

void check_mask(const SampleRecord& r, const ModelConfig& cfg) {
  if (r.mask.size() != cfg.image_size * cfg.image_size) {
    throw Error(ErrorCode::kDimMismatch, "record " + std::to_string(r.id) + " has no usable mask");
  }
}

}  // namespace

void ConfusionMatrix::add(std::size_t truth, std::size_t pred, std::uint64_t count) {
  if (truth >= classes_ || pred >= classes_) {
    throw Error(ErrorCode::kShapeMismatch, "class index out of range");
  }
  counts_[truth * classes_ + pred] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) {
    throw Error(ErrorCode::kShapeMismatch, "confusion matrices differ in class count");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

SegMetrics compute_metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::kEmptyMatrix, "confusion matrix is empty");
  const std::size_t k = cm.classes();
  double diag = 0.0, acc_sum = 0.0, iou_sum = 0.0, fw = 0.0;
  std::size_t present = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double t_i = 0.0, p_i = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      t_i += static_cast<double>(cm.at(i, j));
      p_i += static_cast<double>(cm.at(j, i));
    }
    const double n_ii = static_cast<double>(cm.at(i, i));
    diag += n_ii;
    if (t_i == 0.0) continue;
    ++present;
    const double iou = n_ii / (t_i + p_i - n_ii);
    acc_sum += n_ii / t_i;
    iou_sum += iou;
    fw += t_i * iou;
  }
  const double n = static_cast<double>(total);
  SegMetrics m;
  m.overall_acc = diag / n;
  m.mean_acc = acc_sum / static_cast<double>(present);
  m.mean_iou = iou_sum / static_cast<double>(present);
  m.freqw_acc = fw / n;
  return m;
}

LabeledSplit split_labeled(std::size_t n, double holdout, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::kEmptyDataset, "need at least two labeled images");
  if (!(holdout > 0.0 && holdout < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "eval.holdout_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::size_t n_test = static_cast<std::size_t>(std::lround(holdout * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  LabeledSplit split;
  split.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
  split.test.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::vector<double>> frozen_features(
    const ParamSet& backbone, std::span<const SampleRecord* const> records,
    const ModelConfig& cfg) {
  const ParamSet frozen = backbone.detached();
  const MaskPlan plan = full_mask_plan(cfg.n_patches());
  std::vector<std::vector<double>> out;
  out.reserve(records.size());
  constexpr std::size_t kChunk = 32;
  for (std::size_t begin = 0; begin < records.size(); begin += kChunk) {
    const std::size_t end = std::min(records.size(), begin + kChunk);
    std::vector<const Image*> images;
    for (std::size_t i = begin; i < end; ++i) images.push_back(&records[i]->image);
    const Tensor rows = patchify(stack_images(images), cfg);
    const std::vector<MaskPlan> plans(images.size(), plan);
    const Encoded enc = encode(rows, plans, frozen, cfg);
    const std::size_t block = cfg.n_patches() * cfg.embed_dim;
    const auto& v = enc.latents.values();
    for (std::size_t i = 0; i < images.size(); ++i) {
      out.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(i * block),
                       v.begin() + static_cast<std::ptrdiff_t>((i + 1) * block));
    }
  }
  return out;
}

FinetuneResult finetune_frozen(const ParamSet& backbone,
                               std::span<const SampleRecord* const> train,
                               const ModelConfig& cfg, const FinetuneConfig& ft) {
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "no labeled training images");
  for (const auto* r : train) check_mask(*r, cfg);
  if (ft.batch_size == 0) throw Error(ErrorCode::kInvalidConfig, "fine-tune batch size is 0");

  Rng rng(ft.seed);
  FinetuneResult result;
  result.head = init_seg_head(cfg, rng);
  result.head.set_requires_grad(true);
  if (ft.steps == 0) return result;

  const auto features = frozen_features(backbone, train, cfg);
  const std::size_t hw = cfg.image_size * cfg.image_size;
  const std::size_t batch = std::min(ft.batch_size, train.size());
  Adam optimizer(ft.adam);
  for (std::size_t step = 0; step < ft.steps; ++step) {
    const auto rows = rng.sample_without_replacement(train.size(), batch);
    const Encoded enc = batch_features(features, rows, cfg);
    std::vector<std::size_t> targets;
    targets.reserve(rows.size() * hw);
    for (std::size_t r : rows) {
      for (auto m : train[r]->mask) targets.push_back(m ? 1 : 0);
    }
    const Tensor logits = reshape(seg_head(enc, result.head, cfg), {rows.size() * hw, 2});
    const std::vector<std::uint8_t> active(targets.size(), 1);
    Tensor loss = cross_entropy_masked(logits, targets, active);
    result.loss_trace.push_back(loss.item());
    result.head.zero_grads();
    loss.backward();
    optimizer.step(result.head);
  }
  result.head.zero_grads();
  result.head.set_requires_grad(false);
  return result;
}

ConfusionMatrix evaluate_segmentation(const ParamSet& backbone, const ParamSet& head,
                                      std::span<const SampleRecord* const> test,
                                      const ModelConfig& cfg) {
  for (const auto* r : test) check_mask(*r, cfg);
  const auto features = frozen_features(backbone, test, cfg);
  const ParamSet frozen_head = head.detached();
  const std::size_t hw = cfg.image_size * cfg.image_size;
  ConfusionMatrix cm(2);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const std::size_t row = i;
    const Encoded enc = batch_features(features, std::span<const std::size_t>(&row, 1), cfg);
    const Tensor out = seg_head(enc, frozen_head, cfg);
    const auto logits = out.values();
    for (std::size_t p = 0; p < hw; ++p) {
      const std::size_t pred = logits[2 * p + 1] > logits[2 * p] ? 1 : 0;
      cm.add(test[i]->mask[p] ? 1 : 0, pred);
    }
  }
  return cm;
}

}  // namespace lfdg
