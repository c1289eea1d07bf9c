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

#include "lfdg/ssada.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfdg/error.hpp"
#include "lfdg/image.hpp"
#include "lfdg/log.hpp"
#include "lfdg/ops.hpp"
#include "lfdg/raster.hpp"

namespace lfdg {
namespace {

Tensor slice_rows(const Tensor& t, std::size_t row) {
  const std::size_t r = row;
  return gather_rows(t, std::span<const std::size_t>(&r, 1));
}

double single_objective(const Image& aug, const Image& src, const Tensor& z_src,
                        std::size_t index, const MaskPlan& dp, const MaskPlan& sr,
                        const ParamSet& frozen, const TrainConfig& cfg) {
  const Image* a = &aug;
  const Image* s = &src;
  const Tensor xa = stack_images(std::span<const Image* const>(&a, 1));
  const Tensor xs = stack_images(std::span<const Image* const>(&s, 1));
  return ascent_objective(xa, xs, slice_rows(z_src, index),
                          std::span<const MaskPlan>(&dp, 1),
                          std::span<const MaskPlan>(&sr, 1), frozen, cfg)
      .value.item();
}

}  // namespace

Tensor consistency_cost(const Tensor& z_src, const Tensor& z_aug) {
  if (z_src.shape() != z_aug.shape()) {
    throw Error(ErrorCode::kDimMismatch,
                "feature shapes " + shape_to_string(z_src.shape()) + " vs " +
                    shape_to_string(z_aug.shape()));
  }
  return mse(z_aug, z_src);
}

AscentObjective ascent_objective(const Tensor& x_aug, const Tensor& x_src,
                                 const Tensor& z_src,
                                 std::span<const MaskPlan> droppos_plans,
                                 std::span<const MaskPlan> sram_plans,
                                 const ParamSet& params,
                                 const TrainConfig& cfg) {
  DropPosForward fwd = droppos_forward(x_aug, droppos_plans, params, cfg.model);
  Tensor con = consistency_cost(z_src, fwd.encoded.pooled);
  Tensor rec = sram_loss(x_src, x_aug, sram_plans, params, cfg.model);
  AscentObjective out;
  out.selfsup = fwd.loss.item();
  out.consistency = con.item();
  out.sram = rec.item();
  out.value = sub(sub(fwd.loss, scale(con, cfg.ssada.lambda_dist)),
                  scale(rec, cfg.sram.beta));
  return out;
}

std::vector<AugmentedSample> maximize_perturbations(
    std::span<const Image* const> sources, std::span<const std::size_t> ids,
    std::size_t stage, const ParamSet& params, const TrainConfig& cfg,
    Rng& rng) {
  if (sources.empty()) return {};
  if (ids.size() != sources.size()) {
    throw Error(ErrorCode::kDimMismatch, "one id per source image required");
  }
  const std::size_t batch = sources.size();
  const auto dp_plans = sample_droppos_plans(batch, cfg.model, cfg.droppos, rng);
  const auto sr_plans = sample_sram_plans(batch, cfg.model, cfg.sram.mask_ratio, rng);
  const ParamSet frozen = params.detached();

  const Tensor x_src = stack_images(sources);
  const Tensor z_src = droppos_forward(x_src, dp_plans, frozen, cfg.model).encoded.pooled;

  const double noise = cfg.ssada.init_noise;
  std::vector<double> current(x_src.values().begin(), x_src.values().end());
  for (double& v : current) v = std::clamp(v + rng.uniform(-noise, noise), 0.0, 1.0);
  const std::vector<double> start = current;

  bool aborted = false;
  for (std::size_t step = 0; step < cfg.ssada.t_max; ++step) {
    Tensor x = Tensor::from_values(x_src.shape(), current, true);
    AscentObjective obj =
        ascent_objective(x, x_src, z_src, dp_plans, sr_plans, frozen, cfg);
    if (!std::isfinite(obj.value.item())) {
      aborted = true;
      break;
    }
    obj.value.backward();
    auto g = x.grad();
    std::vector<double> next(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
      const double dir = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
      next[i] = std::clamp(current[i] + cfg.ssada.step_size * dir, 0.0, 1.0);
    }
    // Keep the last iterate whose pixels are finite.
    if (!std::all_of(next.begin(), next.end(), [](double v) { return std::isfinite(v); })) {
      aborted = true;
      break;
    }
    current = std::move(next);
  }

  const Tensor x_start = Tensor::from_values(x_src.shape(), start);
  const Tensor x_final = Tensor::from_values(x_src.shape(), current);
  std::vector<AugmentedSample> out(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    AugmentedSample& s = out[b];
    s.x_aug = image_from_batch(x_final, b);
    s.source_id = ids[b];
    s.stage = stage;
    const Image first = image_from_batch(x_start, b);
    s.initial_objective = single_objective(first, *sources[b], z_src, b,
                                           dp_plans[b], sr_plans[b], frozen, cfg);
    s.final_objective = single_objective(s.x_aug, *sources[b], z_src, b,
                                         dp_plans[b], sr_plans[b], frozen, cfg);
    s.non_finite = aborted || !std::isfinite(s.final_objective);
  }
  return out;
}

AugmentedSample maximize_perturbation(const Image& source, std::size_t id,
                                      std::size_t stage, const ParamSet& params,
                                      const TrainConfig& cfg, Rng& rng) {
  const Image* src = &source;
  return maximize_perturbations(std::span<const Image* const>(&src, 1),
                                std::span<const std::size_t>(&id, 1), stage,
                                params, cfg, rng)
      .front();
}

double train_step(std::span<const Image* const> batch, ParamSet& params,
                  const TrainConfig& cfg, Rng& rng, Adam& optimizer) {
  const Tensor x = stack_images(batch);
  const auto dp_plans = sample_droppos_plans(batch.size(), cfg.model, cfg.droppos, rng);
  Tensor loss = droppos_forward(x, dp_plans, params, cfg.model).loss;
  if (cfg.sram.lambda_train > 0.0) {
    const auto sr_plans = sample_sram_plans(batch.size(), cfg.model, cfg.sram.mask_ratio, rng);
    loss = add(loss, scale(sram_loss(x, x, sr_plans, params, cfg.model),
                           cfg.sram.lambda_train));
  }
  const double value = loss.item();
  params.zero_grads();
  loss.backward();
  optimizer.step(params);
  params.zero_grads();
  return value;
}

MinimizeResult minimize_on_union(std::span<const Image* const> dataset,
                                 const std::deque<AugmentedSample>& buffer,
                                 ParamSet params, const TrainConfig& cfg,
                                 Rng& rng, Adam& optimizer) {
  std::vector<const Image*> pool(dataset.begin(), dataset.end());
  for (const AugmentedSample& s : buffer) pool.push_back(&s.x_aug);
  if (pool.empty()) throw Error(ErrorCode::kEmptyDataset, "nothing to train on");

  MinimizeResult result;
  result.loss_trace.reserve(cfg.ssada.t_min);
  const std::size_t b = std::min(cfg.batch_size, pool.size());
  std::vector<const Image*> batch(b);
  for (std::size_t step = 0; step < cfg.ssada.t_min; ++step) {
    const auto pick = rng.sample_without_replacement(pool.size(), b);
    for (std::size_t i = 0; i < b; ++i) batch[i] = pool[pick[i]];
    result.loss_trace.push_back(train_step(batch, params, cfg, rng, optimizer));
  }
  result.params = std::move(params);
  return result;
}

void push_bounded(std::deque<AugmentedSample>& buffer, AugmentedSample sample,
                  std::size_t cap) {
  buffer.push_back(std::move(sample));
  while (buffer.size() > cap) buffer.pop_front();
}

StageReport run_ssada_stage(ClientState& client, const TrainConfig& cfg,
                            const StageContext& ctx) {
  if (!ctx.augment_rng || !ctx.train_rng || !ctx.optimizer) {
    throw Error(ErrorCode::kInvalidConfig, "run_ssada_stage: incomplete context");
  }
  StageReport report;
  const std::size_t n = client.shard.size();
  for (std::size_t k = 0; k < cfg.ssada.k_stages; ++k) {
    const std::size_t stage = ctx.first_stage + k;
    std::size_t count = static_cast<std::size_t>(
        std::lround(cfg.ssada.augment_fraction * static_cast<double>(n)));
    if (cfg.ssada.augment_fraction > 0.0 && n > 0) count = std::max<std::size_t>(count, 1);
    count = std::min(count, n);
    auto chosen = ctx.augment_rng->sample_without_replacement(n, count);
    std::sort(chosen.begin(), chosen.end());

    for (std::size_t begin = 0; begin < chosen.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(chosen.size(), begin + cfg.batch_size);
      std::vector<const Image*> sources;
      std::vector<std::size_t> ids;
      for (std::size_t i = begin; i < end; ++i) {
        sources.push_back(&client.shard.image(chosen[i]));
        ids.push_back(client.shard.id(chosen[i]));
      }
      auto samples = maximize_perturbations(sources, ids, stage, client.params,
                                            cfg, *ctx.augment_rng);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        ++report.generated;
        // A perturbation identical to its source adds no data.
        if (samples[i].x_aug.pixels == sources[i]->pixels) continue;
        if (!cfg.dump_dir.empty()) {
          const std::string stem = std::to_string(client.client_id) + "_" +
                                   std::to_string(stage) + "_" +
                                   std::to_string(samples[i].source_id);
          write_ppm(cfg.dump_dir / (stem + "_src.ppm"), *sources[i]);
          write_ppm(cfg.dump_dir / (stem + "_aug.ppm"), samples[i].x_aug);
        }
        push_bounded(client.buffer, std::move(samples[i]), cfg.ssada.buffer_cap);
        ++report.buffered;
      }
    }
    log_debug("client " + std::to_string(client.client_id) + " stage " +
              std::to_string(stage) + ": buffer " +
              std::to_string(client.buffer.size()));

    auto result = minimize_on_union(client.shard.all(), client.buffer,
                                    std::move(client.params), cfg,
                                    *ctx.train_rng, *ctx.optimizer);
    client.params = std::move(result.params);
    report.loss_trace.insert(report.loss_trace.end(), result.loss_trace.begin(),
                             result.loss_trace.end());
  }
  return report;
}

}  // namespace lfdg
