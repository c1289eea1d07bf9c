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

#include "lfdg/federation.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "lfdg/checkpoint.hpp"
#include "lfdg/error.hpp"
#include "lfdg/log.hpp"

namespace lfdg {
namespace {

std::string padded(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, value);
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ClientRoundStats train_client(const ParamSet& global, ClientState& client,
                              const TrainConfig& train, const FedConfig& fed,
                              std::size_t round) {
  ShardAccessScope scope(client.client_id);
  ClientRoundStats stats;
  stats.client_id = client.client_id;

  client.params = global;
  client.params.set_requires_grad(true);
  Adam optimizer(train.adam);
  Rng train_rng(derive_seed(client.seed, "train", {round}));
  Rng augment_rng(derive_seed(client.seed, "augment", {round}));

  const std::size_t n = client.shard.size();
  if (n == 0) throw Error(ErrorCode::kEmptyDataset, "client has an empty shard");
  const auto images = client.shard.all();
  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 0; epoch < fed.local_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    train_rng.shuffle(order);
    for (std::size_t begin = 0; begin < n; begin += train.batch_size) {
      const std::size_t end = std::min(n, begin + train.batch_size);
      std::vector<const Image*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(images[order[i]]);
      stats.loss_trace.push_back(
          train_step(batch, client.params, train, train_rng, optimizer));
    }
  }

  StageContext ctx;
  ctx.first_stage = (round - 1) * train.ssada.k_stages;
  ctx.augment_rng = &augment_rng;
  ctx.train_rng = &train_rng;
  ctx.optimizer = &optimizer;
  StageReport stage = run_ssada_stage(client, train, ctx);
  stats.loss_trace.insert(stats.loss_trace.end(), stage.loss_trace.begin(),
                          stage.loss_trace.end());
  stats.generated = stage.generated;

  client.params.set_requires_grad(false);
  client.params.zero_grads();
  if (!stats.loss_trace.empty()) {
    stats.mean_loss = std::accumulate(stats.loss_trace.begin(), stats.loss_trace.end(), 0.0) /
                      static_cast<double>(stats.loss_trace.size());
  }
  stats.buffer_size = client.buffer.size();
  stats.delta_norm = param_distance(client.params, global);
  return stats;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out << text;
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp + ": " + ec.message());
}

// Keeps the header and every row whose first field is <= max_round.
std::string truncated_csv(const std::filesystem::path& path, const std::string& header,
                          std::size_t max_round) {
  std::string out = header + "\n";
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t round = std::stoul(line.substr(0, line.find(',')));
    if (round <= max_round) out += line + "\n";
  }
  return out;
}

}  // namespace

std::vector<ClientState> make_clients(std::vector<UnlabeledShard> shards,
                                      std::uint64_t master_seed) {
  std::vector<ClientState> clients;
  clients.reserve(shards.size());
  for (auto& shard : shards) {
    ClientState c;
    c.client_id = shard.owner();
    c.seed = derive_seed(master_seed, "client", {c.client_id});
    c.shard = std::move(shard);
    clients.push_back(std::move(c));
  }
  return clients;
}

std::pair<ParamSet, RoundReport> run_round(const ParamSet& global,
                                           std::span<ClientState> clients,
                                           const TrainConfig& train,
                                           const FedConfig& fed,
                                           std::size_t round) {
  if (clients.empty()) throw Error(ErrorCode::kInvalidConfig, "run_round: no clients");
  RoundReport report;
  report.round = round;
  report.clients.resize(clients.size());
  std::vector<std::exception_ptr> failures(clients.size());

  auto work = [&](std::size_t i) {
    try {
      report.clients[i] = train_client(global, clients[i], train, fed, round);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(fed.threads, 1), clients.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < clients.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < clients.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<ParamSet> sets;
  std::vector<double> weights;
  for (const auto& c : clients) {
    sets.push_back(c.params);
    weights.push_back(static_cast<double>(c.shard.size()));
  }
  ParamSet aggregated = average_params(sets, weights);
  report.checksum = aggregated.checksum();
  return {std::move(aggregated), std::move(report)};
}

std::filesystem::path round_checkpoint_path(const std::filesystem::path& run_dir,
                                            std::size_t round) {
  return run_dir / "checkpoints" / ("round_" + padded(round, 4) + ".lfdg");
}

ParamSet encode_buffers(std::span<const ClientState> clients) {
  ParamSet out;
  for (const auto& c : clients) {
    const std::string prefix = "client." + padded(c.client_id, 2) + ".";
    for (std::size_t j = 0; j < c.buffer.size(); ++j) {
      const AugmentedSample& s = c.buffer[j];
      const std::string key = prefix + padded(j, 5);
      out.insert(key + ".x_aug",
                 Tensor::from_values({s.x_aug.height, s.x_aug.width, s.x_aug.channels},
                                     s.x_aug.pixels));
      out.insert(key + ".meta",
                 Tensor::from_values({5}, {static_cast<double>(s.source_id),
                                           static_cast<double>(s.stage),
                                           s.initial_objective, s.final_objective,
                                           s.non_finite ? 1.0 : 0.0}));
    }
  }
  return out;
}

void restore_buffers(const ParamSet& encoded, std::span<ClientState> clients) {
  for (auto& c : clients) {
    c.buffer.clear();
    const std::string prefix = "client." + padded(c.client_id, 2) + ".";
    for (std::size_t j = 0;; ++j) {
      const std::string key = prefix + padded(j, 5);
      if (!encoded.contains(key + ".x_aug")) break;
      if (!encoded.contains(key + ".meta")) {
        throw Error(ErrorCode::kCorruptCheckpoint, "missing " + key + ".meta");
      }
      const Tensor& x = encoded.at(key + ".x_aug");
      const Tensor& meta = encoded.at(key + ".meta");
      if (x.rank() != 3 || meta.numel() != 5) {
        throw Error(ErrorCode::kCorruptCheckpoint, "malformed buffer entry " + key);
      }
      AugmentedSample s;
      s.x_aug.height = x.dim(0);
      s.x_aug.width = x.dim(1);
      s.x_aug.channels = x.dim(2);
      s.x_aug.pixels.assign(x.values().begin(), x.values().end());
      const auto& m = meta.values();
      s.source_id = static_cast<std::size_t>(m[0]);
      s.stage = static_cast<std::size_t>(m[1]);
      s.initial_objective = m[2];
      s.final_objective = m[3];
      s.non_finite = m[4] != 0.0;
      c.buffer.push_back(std::move(s));
    }
  }
}

PretrainResult run_pretraining(const ParamSet& init,
                               std::vector<ClientState>& clients,
                               const TrainConfig& train, const FedConfig& fed,
                               const PretrainOptions& options) {
  const bool persist = !options.run_dir.empty();
  const auto ckpt_dir = options.run_dir / "checkpoints";
  const auto clients_path = [&](std::size_t r) {
    return ckpt_dir / ("clients_" + padded(r, 4) + ".lfdg");
  };
  const std::string rounds_header = "round,client_id,mean_loss,buffer_size,delta_norm";
  const std::string sums_header = "round,checksum";

  PretrainResult result;
  std::size_t start = 0;
  if (options.resume_round > 0) {
    if (!persist) throw Error(ErrorCode::kInvalidConfig, "resume requires a run directory");
    if (options.resume_round > fed.rounds) {
      throw Error(ErrorCode::kInvalidConfig, "resume round exceeds fed.rounds");
    }
    start = options.resume_round;
    result.global = load_checkpoint(round_checkpoint_path(options.run_dir, start));
    if (!result.global.congruent_with(init)) {
      throw Error(ErrorCode::kIncongruentParamSets,
                  "checkpoint does not match the configured model");
    }
    restore_buffers(load_checkpoint(clients_path(start)), clients);
  } else {
    result.global = init;
    for (auto& c : clients) c.buffer.clear();
  }
  result.global.set_requires_grad(false);

  std::string rounds_csv = rounds_header + "\n";
  std::string sums_csv = sums_header + "\n";
  auto save_state = [&](std::size_t r) {
    save_checkpoint(round_checkpoint_path(options.run_dir, r), result.global);
    save_checkpoint(clients_path(r), encode_buffers(clients));
  };
  if (persist) {
    std::error_code ec;
    std::filesystem::create_directories(ckpt_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + ckpt_dir.string());
    if (start > 0) {
      rounds_csv = truncated_csv(options.run_dir / "rounds.csv", rounds_header, start);
      sums_csv = truncated_csv(options.run_dir / "checksums.csv", sums_header, start);
    } else {
      sums_csv += "0," + std::to_string(result.global.checksum()) + "\n";
      save_state(0);
    }
    write_text(options.run_dir / "rounds.csv", rounds_csv);
    write_text(options.run_dir / "checksums.csv", sums_csv);
  }

  for (std::size_t r = start + 1; r <= fed.rounds; ++r) {
    auto [next, report] = run_round(result.global, clients, train, fed, r);
    result.global = std::move(next);
    std::ostringstream line;
    for (const auto& s : report.clients) {
      line << r << ',' << s.client_id << ',' << format_double(s.mean_loss) << ','
           << s.buffer_size << ',' << format_double(s.delta_norm) << '\n';
      log_debug("round " + std::to_string(r) + " client " + std::to_string(s.client_id) +
                " loss " + format_double(s.mean_loss));
    }
    log_info("round " + std::to_string(r) + "/" + std::to_string(fed.rounds) +
             " checksum " + std::to_string(report.checksum));
    if (persist) {
      rounds_csv += line.str();
      sums_csv += std::to_string(r) + "," + std::to_string(report.checksum) + "\n";
      if (r == fed.rounds || (fed.checkpoint_every > 0 && r % fed.checkpoint_every == 0)) {
        save_state(r);
      }
      write_text(options.run_dir / "rounds.csv", rounds_csv);
      write_text(options.run_dir / "checksums.csv", sums_csv);
    }
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace lfdg
