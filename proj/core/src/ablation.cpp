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

#include "lfdg/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "lfdg/error.hpp"
#include "lfdg/log.hpp"

namespace lfdg {
namespace {

std::string metric_fields(const SegMetrics& m) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", m.mean_iou, m.mean_acc,
                m.overall_acc, m.freqw_acc);
  return buf;
}

std::vector<const SampleRecord*> pick(const std::vector<SampleRecord>& records,
                                      const std::vector<std::size_t>& idx) {
  std::vector<const SampleRecord*> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(&records[i]);
  return out;
}

}  // namespace

Experiment make_experiment(const RunConfig& cfg) {
  cfg.validate();
  DataConfig data = cfg.data;
  data.image_size = cfg.model.image_size;
  Experiment exp;
  exp.data = build_federation(data, cfg.fed.n_clients, derive_seed(cfg.seed, "data"));
  Rng init_rng(derive_seed(cfg.seed, "init"));
  exp.init = init_params(cfg.model, init_rng);
  return exp;
}

PretrainResult pretrain(const RunConfig& cfg, const Experiment& exp,
                        const PretrainOptions& options) {
  auto clients = make_clients(exp.data.clients, cfg.seed);
  return run_pretraining(exp.init, clients, cfg.train_config(), cfg.fed, options);
}

EvalReport finetune_and_evaluate(const ParamSet& backbone, const Experiment& exp,
                                 const RunConfig& cfg) {
  EvalReport report;
  report.split = split_labeled(exp.data.server.size(), cfg.eval.holdout_fraction,
                               cfg.eval.split_seed);
  const auto train = pick(exp.data.server, report.split.train);
  const auto test = pick(exp.data.server, report.split.test);
  std::vector<const SampleRecord*> unseen;
  for (const auto& r : exp.data.unseen) unseen.push_back(&r);

  FinetuneConfig ft;
  ft.steps = cfg.eval.finetune_steps;
  ft.batch_size = cfg.eval.batch_size;
  ft.adam.lr = cfg.eval.lr;
  ft.seed = derive_seed(cfg.seed, "finetune");
  FinetuneResult tuned = finetune_frozen(backbone, train, cfg.model, ft);
  report.loss_trace = std::move(tuned.loss_trace);
  report.in_domain =
      compute_metrics(evaluate_segmentation(backbone, tuned.head, test, cfg.model));
  report.unseen =
      compute_metrics(evaluate_segmentation(backbone, tuned.head, unseen, cfg.model));
  return report;
}

std::string eval_csv(const EvalReport& report) {
  std::string out = "shard,mean_iou,mean_acc,overall_acc,freqw_acc\n";
  out += "in_domain," + metric_fields(report.in_domain) + "\n";
  out += "unseen," + metric_fields(report.unseen) + "\n";
  return out;
}

RunConfig variant_config(const RunConfig& base, std::string_view variant, double beta) {
  RunConfig cfg = base;
  if (variant == "rand_init") {
    cfg.fed.rounds = 0;
  } else if (variant == "no_ssada") {
    cfg.ssada.step_size = 0.0;
    cfg.ssada.init_noise = 0.0;
  } else if (variant == "no_sram") {
    cfg.sram.beta = 0.0;
  } else if (variant == "full") {
    cfg.sram.beta = beta;
  } else {
    throw Error(ErrorCode::kInvalidConfig,
                "ablation.variants: unknown variant '" + std::string(variant) + "'");
  }
  return cfg;
}

std::vector<AblationRow> run_ablation_suite(
    const RunConfig& cfg, const std::function<void(const AblationRow&)>& on_row) {
  cfg.validate();
  std::vector<AblationRow> rows;
  for (std::size_t s = 0; s < cfg.ablation.seeds; ++s) {
    RunConfig seeded = cfg;
    seeded.seed = cfg.seed + s;
    const Experiment exp = make_experiment(seeded);
    for (const auto& variant : cfg.ablation.variants) {
      std::vector<double> betas = {0.0};
      if (variant == "full") betas = cfg.ablation.betas;
      if (variant == "no_ssada") betas = {cfg.sram.beta};
      for (double beta : betas) {
        const RunConfig vc = variant_config(seeded, variant, beta);
        log_info("ablation: " + variant + " beta " + std::to_string(beta) + " seed " +
                 std::to_string(seeded.seed));
        const ParamSet backbone = pretrain(vc, exp).global;
        const EvalReport eval = finetune_and_evaluate(backbone, exp, vc);
        AblationRow row{variant, beta, seeded.seed, eval.in_domain, eval.unseen};
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const AblationRow& a, const AblationRow& b) {
    return std::tie(a.variant, a.beta, a.seed) < std::tie(b.variant, b.beta, b.seed);
  });
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows, bool unseen) {
  std::string out = "variant,beta,seed,mean_iou,mean_acc,overall_acc,freqw_acc\n";
  for (const auto& r : rows) {
    char beta[32];
    std::snprintf(beta, sizeof(beta), "%.6f", r.beta);
    out += r.variant + "," + beta + "," + std::to_string(r.seed) + "," +
           metric_fields(unseen ? r.unseen : r.in_domain) + "\n";
  }
  return out;
}

}  // namespace lfdg
