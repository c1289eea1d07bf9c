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

#include <vector>

#include <benchmark/benchmark.h>

#include "lfdg/droppos.hpp"
#include "lfdg/model.hpp"
#include "lfdg/ops.hpp"
#include "lfdg/params.hpp"
#include "lfdg/segmentation.hpp"
#include "lfdg/ssada.hpp"

namespace lfdg {
namespace {

std::vector<Image> random_batch(const ModelConfig& cfg, std::size_t n, Rng& rng) {
  std::vector<Image> out;
  for (std::size_t i = 0; i < n; ++i) {
    Image img = Image::filled(cfg.image_size, cfg.image_size, cfg.channels, 0.0);
    for (double& p : img.pixels) p = rng.uniform();
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<const Image*> ptrs(const std::vector<Image>& v) {
  std::vector<const Image*> out;
  for (const auto& i : v) out.push_back(&i);
  return out;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> va(n * n), vb(n * n);
  for (double& v : va) v = rng.uniform();
  for (double& v : vb) v = rng.uniform();
  const Tensor a = Tensor::from_values({n, n}, va, true);
  const Tensor b = Tensor::from_values({n, n}, vb, true);
  for (auto _ : state) {
    Tensor y = sum(matmul(a, b));
    y.backward();
    benchmark::DoNotOptimize(y.item());
  }
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

void BM_DropPosStep(benchmark::State& state) {
  const ModelConfig cfg;
  Rng rng(2);
  ParamSet params = init_params(cfg, rng);
  params.set_requires_grad(true);
  const auto images = random_batch(cfg, static_cast<std::size_t>(state.range(0)), rng);
  const Tensor x = stack_images(ptrs(images));
  for (auto _ : state) {
    const auto plans = sample_droppos_plans(images.size(), cfg, DropPosConfig{}, rng);
    Tensor loss = droppos_forward(x, plans, params, cfg).loss;
    loss.backward();
    params.zero_grads();
    benchmark::DoNotOptimize(loss.item());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DropPosStep)->Arg(16);

void BM_AscentStep(benchmark::State& state) {
  TrainConfig tc;
  tc.ssada.t_max = 1;
  Rng rng(3);
  const ParamSet params = init_params(tc.model, rng);
  const auto images = random_batch(tc.model, 16, rng);
  std::vector<std::size_t> ids(images.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  for (auto _ : state) {
    auto out = maximize_perturbations(ptrs(images), ids, 0, params, tc, rng);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_AscentStep);

void BM_AverageParams(benchmark::State& state) {
  const ModelConfig cfg;
  Rng rng(4);
  std::vector<ParamSet> sets;
  for (int k = 0; k < 5; ++k) sets.push_back(init_params(cfg, rng));
  const std::vector<double> w = {1, 2, 3, 4, 5};
  for (auto _ : state) benchmark::DoNotOptimize(average_params(sets, w).checksum());
}
BENCHMARK(BM_AverageParams);

void BM_Metrics(benchmark::State& state) {
  Rng rng(5);
  std::vector<std::uint8_t> truth(32 * 32 * 100), pred(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = rng.uniform() < 0.3;
    pred[i] = rng.uniform() < 0.3;
  }
  for (auto _ : state) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], pred[i]);
    benchmark::DoNotOptimize(compute_metrics(cm).mean_iou);
  }
}
BENCHMARK(BM_Metrics);

}  // namespace
}  // namespace lfdg

BENCHMARK_MAIN();
