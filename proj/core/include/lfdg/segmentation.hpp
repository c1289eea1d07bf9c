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

#ifndef LFDG_SEGMENTATION_HPP_
#define LFDG_SEGMENTATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lfdg/adam.hpp"
#include "lfdg/model.hpp"
#include "lfdg/params.hpp"
#include "lfdg/synth.hpp"

namespace lfdg {

// counts[i * classes + j]: pixels of true class i predicted as j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 2)
      : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t pred) const {
    return counts_.at(truth * classes_ + pred);
  }
  void add(std::size_t truth, std::size_t pred, std::uint64_t count = 1);
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

struct SegMetrics {
  double mean_iou = 0.0;
  double mean_acc = 0.0;
  double overall_acc = 0.0;
  double freqw_acc = 0.0;
};

// Classes absent from the ground truth are left out of the class means.
// Throws Error(kEmptyMatrix) when no pixel was counted.
SegMetrics compute_metrics(const ConfusionMatrix& cm);

struct LabeledSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle of [0, n); the last round(holdout * n) indices (at least
// one) form the test set. Both halves are returned sorted.
LabeledSplit split_labeled(std::size_t n, double holdout, std::uint64_t seed);

struct FinetuneConfig {
  std::size_t steps = 300;
  std::size_t batch_size = 16;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct FinetuneResult {
  ParamSet head;
  std::vector<double> loss_trace;
};

// Fully visible patch features of each image under a frozen backbone, one
// [N, D] row block per image.
std::vector<std::vector<double>> frozen_features(
    const ParamSet& backbone, std::span<const SampleRecord* const> records,
    const ModelConfig& cfg);

// Trains only a fresh segmentation head with per-pixel cross-entropy; the
// backbone is read through a detached copy and never modified.
// Throws Error(kEmptyDataset) for an empty training set.
FinetuneResult finetune_frozen(const ParamSet& backbone,
                               std::span<const SampleRecord* const> train,
                               const ModelConfig& cfg,
                               const FinetuneConfig& ft);

ConfusionMatrix evaluate_segmentation(const ParamSet& backbone,
                                      const ParamSet& head,
                                      std::span<const SampleRecord* const> test,
                                      const ModelConfig& cfg);

}  // namespace lfdg

#endif  // LFDG_SEGMENTATION_HPP_
