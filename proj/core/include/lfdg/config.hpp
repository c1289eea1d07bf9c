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

#ifndef LFDG_CONFIG_HPP_
#define LFDG_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lfdg/droppos.hpp"
#include "lfdg/federation.hpp"
#include "lfdg/model.hpp"
#include "lfdg/sram.hpp"
#include "lfdg/ssada.hpp"
#include "lfdg/synth.hpp"

namespace lfdg {

struct EvalConfig {
  std::size_t finetune_steps = 300;
  std::uint64_t split_seed = 7;
  double holdout_fraction = 0.2;
  double lr = 3e-4;
  std::size_t batch_size = 16;
};

struct AblationConfig {
  std::vector<std::string> variants = {"rand_init", "no_ssada", "no_sram", "full"};
  std::vector<double> betas = {0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::size_t seeds = 3;
};

struct RunConfig {
  std::uint64_t seed = 42;
  ModelConfig model;
  DropPosConfig droppos;
  SramConfig sram;
  SsadaConfig ssada;
  FedConfig fed;
  double lr = 3e-4;             // fed.lr
  std::size_t batch_size = 16;  // fed.batch_size
  DataConfig data = default_data_config();
  EvalConfig eval;
  AblationConfig ablation;

  // Throws Error(kInvalidConfig) naming the first offending key.
  void validate() const;
  TrainConfig train_config() const;
};

// Line-oriented `key = value` text with `[section]` headers that prefix the
// following keys ("[fed]" + "rounds" is fed.rounds); `#` starts a comment.
// Every key must be present exactly once; unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
// Complete, re-parseable text; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

}  // namespace lfdg

#endif  // LFDG_CONFIG_HPP_
