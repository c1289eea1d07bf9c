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

#include "fixtures.hpp"

namespace lfdg::testing {

ModelConfig tiny_model() {
  ModelConfig cfg;
  cfg.image_size = 16;
  cfg.patch_size = 8;
  cfg.embed_dim = 8;
  cfg.depth = 1;
  cfg.heads = 2;
  cfg.mlp_ratio = 2;
  cfg.decoder_depth = 1;
  return cfg;
}

Image random_image(const ModelConfig& cfg, Rng& rng, double lo, double hi) {
  Image img = Image::filled(cfg.image_size, cfg.image_size, cfg.channels, 0.0);
  for (double& p : img.pixels) p = rng.uniform(lo, hi);
  return img;
}

std::vector<Image> random_images(std::size_t count, const ModelConfig& cfg, Rng& rng) {
  std::vector<Image> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_image(cfg, rng));
  return out;
}

std::vector<const Image*> pointers(const std::vector<Image>& images) {
  std::vector<const Image*> out;
  for (const auto& img : images) out.push_back(&img);
  return out;
}

}  // namespace lfdg::testing
