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

#ifndef LFDG_SSADA_HPP_
#define LFDG_SSADA_HPP_

#include <cstddef>
#include <deque>
#include <filesystem>
#include <span>
#include <vector>

#include "lfdg/adam.hpp"
#include "lfdg/client.hpp"
#include "lfdg/droppos.hpp"
#include "lfdg/model.hpp"
#include "lfdg/params.hpp"
#include "lfdg/rng.hpp"
#include "lfdg/sram.hpp"

namespace lfdg {

struct SsadaConfig {
  std::size_t t_max = 15;        // ascent steps per image
  double step_size = 0.02;       // sign-gradient step in [0,1] pixel units
  double init_noise = 0.01;      // half-width of the uniform start noise
  double lambda_dist = 1.0;      // weight of the feature-consistency cost
  std::size_t t_min = 4;         // optimizer steps per minimization phase
  std::size_t k_stages = 1;      // max/min stages per federated round
  std::size_t buffer_cap = 64;   // FIFO capacity of the augmented buffer
  double augment_fraction = 0.25;  // share of the shard perturbed per stage
};

// Everything a client needs to run local pretraining.
struct TrainConfig {
  ModelConfig model;
  DropPosConfig droppos;
  SramConfig sram;
  SsadaConfig ssada;
  AdamConfig adam;
  std::size_t batch_size = 16;
  // When non-empty, every buffered (source, augmented) pair is written
  // there as 8-bit PPM files.
  std::filesystem::path dump_dir;
};

// Mean squared difference of two feature tensors of equal shape.
Tensor consistency_cost(const Tensor& z_src, const Tensor& z_aug);

struct AscentObjective {
  Tensor value;  // selfsup - lambda_dist * consistency - beta * sram
  double selfsup = 0.0;
  double consistency = 0.0;
  double sram = 0.0;
};

// The maximization objective for a batch of augmented images with fixed
// plans. `z_src` holds the pooled features of the sources under the same
// position-prediction plans.
AscentObjective ascent_objective(const Tensor& x_aug, const Tensor& x_src,
                                 const Tensor& z_src,
                                 std::span<const MaskPlan> droppos_plans,
                                 std::span<const MaskPlan> sram_plans,
                                 const ParamSet& params,
                                 const TrainConfig& cfg);

// Sign-gradient ascent on the pixels of a batch of images with the model
// frozen. Mask plans are drawn once from `rng` and held fixed; since the
// batch objective is the mean of independent per-image objectives, each
// image follows the same trajectory it would follow alone. `params` is
// never modified.
std::vector<AugmentedSample> maximize_perturbations(
    std::span<const Image* const> sources, std::span<const std::size_t> ids,
    std::size_t stage, const ParamSet& params, const TrainConfig& cfg,
    Rng& rng);
AugmentedSample maximize_perturbation(const Image& source, std::size_t id,
                                      std::size_t stage, const ParamSet& params,
                                      const TrainConfig& cfg, Rng& rng);

// One optimizer step on position prediction plus clean self-reconstruction
// (lambda_train * sram_loss(x, x)), which is what trains the decoder.
// Returns the total loss before the step.
double train_step(std::span<const Image* const> batch, ParamSet& params,
                  const TrainConfig& cfg, Rng& rng, Adam& optimizer);

struct MinimizeResult {
  ParamSet params;
  std::vector<double> loss_trace;
};

// t_min steps of train_step on batches drawn uniformly without replacement
// from dataset followed by buffer.
MinimizeResult minimize_on_union(std::span<const Image* const> dataset,
                                 const std::deque<AugmentedSample>& buffer,
                                 ParamSet params, const TrainConfig& cfg,
                                 Rng& rng, Adam& optimizer);

struct StageContext {
  std::size_t first_stage = 0;  // stage number of the first stage run
  Rng* augment_rng = nullptr;   // masks, selection and start noise
  Rng* train_rng = nullptr;     // minimization batches and plans
  Adam* optimizer = nullptr;
};

struct StageReport {
  std::vector<double> loss_trace;
  std::size_t generated = 0;
  std::size_t buffered = 0;
};

// Runs k_stages rounds of: perturb a random augment_fraction of the
// client's images, push them into the FIFO buffer (dropping exact copies of
// their source), then minimize on shard + buffer.
StageReport run_ssada_stage(ClientState& client, const TrainConfig& cfg,
                            const StageContext& ctx);

// Appends with FIFO eviction beyond `cap`.
void push_bounded(std::deque<AugmentedSample>& buffer, AugmentedSample sample,
                  std::size_t cap);

}  // namespace lfdg

#endif  // LFDG_SSADA_HPP_
