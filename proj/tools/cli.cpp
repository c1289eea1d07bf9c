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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <regex>
#include <string>

#include "lfdg/ablation.hpp"
#include "lfdg/checkpoint.hpp"
#include "lfdg/config.hpp"
#include "lfdg/error.hpp"
#include "lfdg/federation.hpp"
#include "lfdg/log.hpp"

namespace lfdg::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string run_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string checkpoint;
  std::size_t resume_round = 0;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

// Loads the config, applies flag overrides and records the resolved result
// in the run directory.
RunConfig prepare(const Options& opt) {
  RunConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.fed.threads = *opt.threads;
  cfg.validate();
  make_dir(opt.run_dir);
  write_file(fs::path(opt.run_dir) / "config.txt", format_config(cfg));
  return cfg;
}

std::string metrics_line(const char* shard, const SegMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%-9s mean_iou=%.4f mean_acc=%.4f overall_acc=%.4f freqw_acc=%.4f", shard,
                m.mean_iou, m.mean_acc, m.overall_acc, m.freqw_acc);
  return buf;
}

fs::path latest_checkpoint(const fs::path& run_dir) {
  const std::regex pattern(R"(round_(\d{4})\.lfdg)");
  fs::path best;
  long best_round = -1;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(run_dir / "checkpoints", ec)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern) && std::stol(m[1]) > best_round) {
      best_round = std::stol(m[1]);
      best = entry.path();
    }
  }
  if (best.empty()) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                "no checkpoint under " + (run_dir / "checkpoints").string());
  }
  return best;
}

int cmd_pretrain(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  const Experiment exp = make_experiment(cfg);
  PretrainOptions po;
  po.run_dir = opt.run_dir;
  po.resume_round = opt.resume_round;
  const PretrainResult result = pretrain(cfg, exp, po);
  out << "pretrained " << cfg.fed.rounds << " rounds, final checksum "
      << result.global.checksum() << "\n";
  return kOk;
}

int cmd_finetune_eval(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  const fs::path ckpt = opt.checkpoint.empty() ? latest_checkpoint(opt.run_dir)
                                               : fs::path(opt.checkpoint);
  if (!fs::exists(ckpt)) {
    throw Error(ErrorCode::kCorruptCheckpoint, "missing checkpoint " + ckpt.string());
  }
  ParamSet backbone;
  try {
    backbone = load_checkpoint(ckpt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw Error(ErrorCode::kCorruptCheckpoint, e.what());
    throw;
  }
  const Experiment exp = make_experiment(cfg);
  if (!backbone.congruent_with(exp.init)) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                ckpt.string() + " does not match the configured model");
  }
  const EvalReport report = finetune_and_evaluate(backbone, exp, cfg);

  std::string split = "index,id,part\n";
  for (std::size_t i : report.split.train) {
    split += std::to_string(i) + "," + std::to_string(exp.data.server[i].id) + ",train\n";
  }
  for (std::size_t i : report.split.test) {
    split += std::to_string(i) + "," + std::to_string(exp.data.server[i].id) + ",test\n";
  }
  write_file(fs::path(opt.run_dir) / "split.csv", split);
  write_file(fs::path(opt.run_dir) / "metrics.csv", eval_csv(report));
  out << "checkpoint " << ckpt.string() << "\n"
      << metrics_line("in_domain", report.in_domain) << "\n"
      << metrics_line("unseen", report.unseen) << "\n";
  return kOk;
}

int cmd_ablate(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  const auto rows = run_ablation_suite(cfg, [&](const AblationRow& r) {
    out << r.variant << " beta=" << r.beta << " seed=" << r.seed << "  "
        << metrics_line("unseen", r.unseen) << "\n";
  });
  write_file(fs::path(opt.run_dir) / "ablation_unseen.csv", ablation_csv(rows, true));
  write_file(fs::path(opt.run_dir) / "ablation_in_domain.csv", ablation_csv(rows, false));
  out << rows.size() << " rows written\n";
  return kOk;
}

int cmd_gen_data(const Options& opt, std::ostream& out) {
  const RunConfig cfg = prepare(opt);
  const Experiment exp = make_experiment(cfg);
  export_federation(exp.data, fs::path(opt.run_dir) / "data");
  out << "exported " << exp.data.server.size() << " server, "
      << exp.data.clients.size() << " client shards, " << exp.data.unseen.size()
      << " unseen images\n";
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
      return kInvalidConfig;
    case ErrorCode::kIo:
      return kIoFailure;
    case ErrorCode::kCorruptCheckpoint:
    case ErrorCode::kIncongruentParamSets:
      return kBadCheckpoint;
    default:
      return kFailure;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated self-supervised pretraining with adversarial augmentation"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool run_dir_required) {
    sub->add_option("--config", opt.config, "Run configuration file")->required();
    auto* rd = sub->add_option("--run-dir", opt.run_dir, "Output directory");
    if (run_dir_required) rd->required();
    sub->add_option("--seed", opt.seed, "Overrides the configured master seed");
    sub->add_option("--threads", opt.threads, "Worker threads for client training")
        ->check(CLI::Range(1, 64));
  };

  auto* pretrain_cmd = app.add_subcommand("pretrain", "Federated pretraining");
  add_common(pretrain_cmd, true);
  pretrain_cmd->add_option("--resume-round", opt.resume_round,
                           "Continue from the checkpoint written after this round");
  auto* finetune_cmd =
      app.add_subcommand("finetune-eval", "Frozen-backbone fine-tuning and evaluation");
  add_common(finetune_cmd, true);
  finetune_cmd->add_option("--checkpoint", opt.checkpoint,
                           "Backbone checkpoint (default: latest in the run directory)");
  auto* ablate_cmd = app.add_subcommand("ablate", "Variant and beta ablation grid");
  add_common(ablate_cmd, true);
  auto* gen_cmd = app.add_subcommand("gen-data", "Export the synthetic shards");
  add_common(gen_cmd, true);
  auto* defaults_cmd =
      app.add_subcommand("default-config", "Print the complete default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }

  try {
    if (defaults_cmd->parsed()) {
      out << "# lfdg run configuration\n" << format_config(RunConfig{});
      return kOk;
    }
    if (pretrain_cmd->parsed()) return cmd_pretrain(opt, out);
    if (finetune_cmd->parsed()) return cmd_finetune_eval(opt, out);
    if (ablate_cmd->parsed()) return cmd_ablate(opt, out);
    if (gen_cmd->parsed()) return cmd_gen_data(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace lfdg::cli
