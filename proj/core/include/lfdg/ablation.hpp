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

#ifndef LFDG_ABLATION_HPP_
#define LFDG_ABLATION_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lfdg/config.hpp"
#include "lfdg/federation.hpp"
#include "lfdg/segmentation.hpp"
#include "lfdg/synth.hpp"

namespace lfdg {

// Synthetic federation and initial backbone of one run; both derive from
// cfg.seed only, so every variant of a seed shares data and initialization.
struct Experiment {
  FederationData data;
  ParamSet init;
};

Experiment make_experiment(const RunConfig& cfg);

PretrainResult pretrain(const RunConfig& cfg, const Experiment& exp,
                        const PretrainOptions& options = {});

struct EvalReport {
  SegMetrics in_domain;  // held-out split of the labeled server shard
  SegMetrics unseen;     // the unseen-domain shard
  LabeledSplit split;
  std::vector<double> loss_trace;
};

// Fine-tunes a head on the training split of the server shard under the
// frozen backbone and evaluates both test shards.
EvalReport finetune_and_evaluate(const ParamSet& backbone, const Experiment& exp,
                                 const RunConfig& cfg);

// Writes `shard,mean_iou,mean_acc,overall_acc,freqw_acc` with rows
// in_domain and unseen.
std::string eval_csv(const EvalReport& report);

// Variant configuration: rand_init skips pretraining, no_ssada zeroes the
// ascent step and start noise, no_sram zeroes beta, full uses `beta`.
RunConfig variant_config(const RunConfig& base, std::string_view variant, double beta);

struct AblationRow {
  std::string variant;
  double beta = 0.0;
  std::uint64_t seed = 0;
  SegMetrics in_domain;
  SegMetrics unseen;
};

// One pretraining + evaluation per (variant, beta, seed); "full" expands over
// cfg.ablation.betas, the other variants appear once per seed. Seeds are
// cfg.seed + i. Rows are sorted by (variant, beta, seed).
std::vector<AblationRow> run_ablation_suite(
    const RunConfig& cfg,
    const std::function<void(const AblationRow&)>& on_row = {});

std::string ablation_csv(const std::vector<AblationRow>& rows, bool unseen);

}  // namespace lfdg

#endif  // LFDG_ABLATION_HPP_
