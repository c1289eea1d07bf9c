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

#ifndef LFDG_FEDERATION_HPP_
#define LFDG_FEDERATION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lfdg/client.hpp"
#include "lfdg/params.hpp"
#include "lfdg/shard.hpp"
#include "lfdg/ssada.hpp"

namespace lfdg {

struct FedConfig {
  std::size_t n_clients = 5;
  std::size_t rounds = 10;
  std::size_t local_epochs = 1;
  std::size_t checkpoint_every = 1;
  std::size_t threads = 1;  // worker threads for client-local training
};

struct ClientRoundStats {
  std::size_t client_id = 0;
  std::vector<double> loss_trace;  // local epochs, then SSADA minimization
  double mean_loss = 0.0;          // 0 when the trace is empty
  std::size_t buffer_size = 0;
  double delta_norm = 0.0;         // ||client params - broadcast params||
  std::size_t generated = 0;
};

struct RoundReport {
  std::size_t round = 0;  // 1-based
  std::vector<ClientRoundStats> clients;
  std::uint64_t checksum = 0;  // of the aggregated global params
};

// Gives each shard a client whose seed is derived from (master_seed, id).
std::vector<ClientState> make_clients(std::vector<UnlabeledShard> shards,
                                      std::uint64_t master_seed);

// One communication round: broadcast, local training (DropPos epochs then
// SSADA stages) under each client's shard scope, FedAvg weighted by shard
// size. Results are combined in client order whatever the thread count.
std::pair<ParamSet, RoundReport> run_round(const ParamSet& global,
                                           std::span<ClientState> clients,
                                           const TrainConfig& train,
                                           const FedConfig& fed,
                                           std::size_t round);

struct PretrainOptions {
  // Empty: nothing is written and resume is unavailable.
  std::filesystem::path run_dir;
  // Continue after this round using run_dir's checkpoints (0: fresh run).
  std::size_t resume_round = 0;
};

struct PretrainResult {
  ParamSet global;
  std::vector<RoundReport> reports;  // rounds executed by this call
};

// Run directory layout:
//   checkpoints/round_NNNN.lfdg    global params after round NNNN
//   checkpoints/clients_NNNN.lfdg  client buffers needed to resume
//   rounds.csv                     round,client_id,mean_loss,buffer_size,delta_norm
//   checksums.csv                  round,checksum
PretrainResult run_pretraining(const ParamSet& init,
                               std::vector<ClientState>& clients,
                               const TrainConfig& train, const FedConfig& fed,
                               const PretrainOptions& options = {});

std::filesystem::path round_checkpoint_path(const std::filesystem::path& run_dir,
                                            std::size_t round);

// Buffers of all clients as a flat ParamSet, and back.
ParamSet encode_buffers(std::span<const ClientState> clients);
void restore_buffers(const ParamSet& encoded, std::span<ClientState> clients);

}  // namespace lfdg

#endif  // LFDG_FEDERATION_HPP_
