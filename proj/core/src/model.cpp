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

#include "lfdg/model.hpp"

#include <cmath>
#include <string>

#include "lfdg/error.hpp"
#include "lfdg/ops.hpp"

namespace lfdg {
namespace {

Tensor xavier(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(fan_in * fan_out);
  for (double& x : v) x = rng.uniform(-limit, limit);
  return Tensor::from_values({fan_in, fan_out}, std::move(v), true);
}

Tensor gaussian(Rng& rng, Shape shape, double stddev) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = stddev * rng.normal();
  return Tensor::from_values(std::move(shape), std::move(v), true);
}

void add_linear(ParamSet& p, const std::string& name, std::size_t in,
                std::size_t out, Rng& rng) {
  p.insert(name + ".w", xavier(rng, in, out));
  p.insert(name + ".b", Tensor::zeros({out}, true));
}

void add_layernorm(ParamSet& p, const std::string& name, std::size_t d) {
  p.insert(name + ".g", Tensor::full({d}, 1.0, true));
  p.insert(name + ".b", Tensor::zeros({d}, true));
}

void add_block(ParamSet& p, const std::string& prefix, std::size_t d,
               std::size_t hidden, Rng& rng) {
  add_layernorm(p, prefix + ".ln1", d);
  add_linear(p, prefix + ".attn.qkv", d, 3 * d, rng);
  add_linear(p, prefix + ".attn.proj", d, d, rng);
  add_layernorm(p, prefix + ".ln2", d);
  add_linear(p, prefix + ".mlp.fc1", d, hidden, rng);
  add_linear(p, prefix + ".mlp.fc2", hidden, d, rng);
}

Tensor linear(const Tensor& x, const ParamSet& p, const std::string& name) {
  return add(matmul(x, p.at(name + ".w")), p.at(name + ".b"));
}

Tensor norm(const Tensor& x, const ParamSet& p, const std::string& name) {
  return layernorm(x, p.at(name + ".g"), p.at(name + ".b"));
}

// Pre-norm transformer block over [batch*tokens, D].
Tensor block(const Tensor& x, const ParamSet& p, const std::string& prefix,
             std::size_t batch, std::size_t tokens, std::size_t heads) {
  Tensor h = norm(x, p, prefix + ".ln1");
  h = attention(linear(h, p, prefix + ".attn.qkv"), batch, tokens, heads);
  Tensor y = add(x, linear(h, p, prefix + ".attn.proj"));
  h = gelu(linear(norm(y, p, prefix + ".ln2"), p, prefix + ".mlp.fc1"));
  return add(y, linear(h, p, prefix + ".mlp.fc2"));
}

void check_plans(std::span<const MaskPlan> plans, std::size_t batch,
                 std::size_t n_patches) {
  if (plans.size() != batch) {
    throw Error(ErrorCode::kPlanMismatch,
                std::to_string(plans.size()) + " plans for batch of " +
                    std::to_string(batch));
  }
  for (const MaskPlan& plan : plans) {
    plan.validate();
    if (plan.n_patches != n_patches) {
      throw Error(ErrorCode::kPlanMismatch,
                  "plan built for " + std::to_string(plan.n_patches) +
                      " patches, model has " + std::to_string(n_patches));
    }
    if (plan.visible_count() != plans[0].visible_count()) {
      throw Error(ErrorCode::kPlanMismatch,
                  "plans in one batch must share the visible count");
    }
  }
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidConfig, "model." + msg);
  };
  if (image_size == 0 || patch_size == 0) fail("image_size/patch_size must be positive");
  if (image_size % patch_size != 0) fail("patch_size must divide image_size");
  if (channels == 0) fail("channels must be positive");
  if (embed_dim == 0 || heads == 0) fail("embed_dim/heads must be positive");
  if (embed_dim % heads != 0) fail("heads must divide embed_dim");
  if (mlp_ratio == 0) fail("mlp_ratio must be positive");
  if (n_patches() < 2) fail("need at least 2 patches");
}

bool is_seg_head_param(const std::string& name) {
  return name.rfind("seg.", 0) == 0;
}

ParamSet init_params(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t d = cfg.embed_dim;
  const std::size_t n = cfg.n_patches();
  const std::size_t hidden = d * cfg.mlp_ratio;
  ParamSet p;
  add_linear(p, "patch_embed", cfg.patch_dim(), d, rng);
  p.insert("pos_embed", gaussian(rng, {n, d}, 0.02));
  p.insert("pos_mask_token", gaussian(rng, {1, d}, 0.02));
  for (std::size_t b = 0; b < cfg.depth; ++b) {
    add_block(p, "blocks." + std::to_string(b), d, hidden, rng);
  }
  add_layernorm(p, "norm", d);
  add_linear(p, "head.pos", d, n, rng);

  add_linear(p, "sram.embed", d, d, rng);
  p.insert("sram.mask_token", gaussian(rng, {1, d}, 0.02));
  p.insert("sram.pos_embed", gaussian(rng, {n, d}, 0.02));
  for (std::size_t b = 0; b < cfg.decoder_depth; ++b) {
    add_block(p, "sram.blocks." + std::to_string(b), d, hidden, rng);
  }
  add_layernorm(p, "sram.norm", d);
  add_linear(p, "sram.pred", d, cfg.patch_dim(), rng);
  return p;
}

ParamSet init_seg_head(const ModelConfig& cfg, Rng& rng) {
  ParamSet p;
  add_linear(p, "seg", cfg.embed_dim, cfg.patch_size * cfg.patch_size * 2, rng);
  return p;
}

std::vector<double> patchify(const Image& image, const ModelConfig& cfg) {
  if (image.height != cfg.image_size || image.width != cfg.image_size ||
      image.channels != cfg.channels ||
      image.pixels.size() != image.height * image.width * image.channels) {
    throw Error(ErrorCode::kDimMismatch, "image does not match model config");
  }
  const std::size_t s = cfg.patch_size, g = cfg.grid(), c = cfg.channels;
  const std::size_t pd = cfg.patch_dim();
  std::vector<double> out(cfg.n_patches() * pd);
  for (std::size_t py = 0; py < g; ++py) {
    for (std::size_t px = 0; px < g; ++px) {
      double* dst = out.data() + (py * g + px) * pd;
      for (std::size_t dy = 0; dy < s; ++dy) {
        for (std::size_t dx = 0; dx < s; ++dx) {
          for (std::size_t ch = 0; ch < c; ++ch) {
            *dst++ = image.at(py * s + dy, px * s + dx, ch);
          }
        }
      }
    }
  }
  return out;
}

Image unpatchify(std::span<const double> patches, const ModelConfig& cfg) {
  if (patches.size() != cfg.n_patches() * cfg.patch_dim()) {
    throw Error(ErrorCode::kDimMismatch, "patch buffer does not match model config");
  }
  const std::size_t s = cfg.patch_size, g = cfg.grid(), c = cfg.channels;
  Image out = Image::filled(cfg.image_size, cfg.image_size, c, 0.0);
  const double* src = patches.data();
  for (std::size_t py = 0; py < g; ++py) {
    for (std::size_t px = 0; px < g; ++px) {
      for (std::size_t dy = 0; dy < s; ++dy) {
        for (std::size_t dx = 0; dx < s; ++dx) {
          for (std::size_t ch = 0; ch < c; ++ch) {
            out.at(py * s + dy, px * s + dx, ch) = *src++;
          }
        }
      }
    }
  }
  return out;
}

Tensor patchify(const Tensor& images, const ModelConfig& cfg) {
  if (images.rank() != 4 || images.dim(1) != cfg.image_size ||
      images.dim(2) != cfg.image_size || images.dim(3) != cfg.channels) {
    throw Error(ErrorCode::kDimMismatch,
                "image batch " + shape_to_string(images.shape()) +
                    " does not match model config");
  }
  const std::size_t b = images.dim(0);
  const std::size_t s = cfg.patch_size, g = cfg.grid(), c = cfg.channels;
  const std::size_t h = cfg.image_size;
  const std::size_t pd = cfg.patch_dim();
  std::vector<std::size_t> index;
  index.reserve(images.numel());
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t py = 0; py < g; ++py) {
      for (std::size_t px = 0; px < g; ++px) {
        for (std::size_t dy = 0; dy < s; ++dy) {
          for (std::size_t dx = 0; dx < s; ++dx) {
            for (std::size_t ch = 0; ch < c; ++ch) {
              index.push_back(((i * h + py * s + dy) * h + px * s + dx) * c + ch);
            }
          }
        }
      }
    }
  }
  return take(images, index, {b * cfg.n_patches(), pd});
}

Encoded encode(const Tensor& patch_rows, std::span<const MaskPlan> plans,
               const ParamSet& params, const ModelConfig& cfg) {
  const std::size_t n = cfg.n_patches();
  if (patch_rows.rank() != 2 || patch_rows.dim(1) != cfg.patch_dim() ||
      patch_rows.dim(0) % n != 0) {
    throw Error(ErrorCode::kDimMismatch,
                "patch rows " + shape_to_string(patch_rows.shape()) +
                    " do not match model config");
  }
  const std::size_t batch = patch_rows.dim(0) / n;
  check_plans(plans, batch, n);
  const std::size_t v = plans[0].visible_count();

  std::vector<std::size_t> rows, pos_rows;
  rows.reserve(batch * v);
  pos_rows.reserve(batch * v);
  for (std::size_t b = 0; b < batch; ++b) {
    const MaskPlan& plan = plans[b];
    for (std::size_t i = 0; i < v; ++i) {
      rows.push_back(b * n + plan.visible_idx[i]);
      // Row n of the extended table is the shared position-mask token.
      pos_rows.push_back(plan.pos_keep[i] ? plan.visible_idx[i] : n);
    }
  }
  Tensor x = linear(gather_rows(patch_rows, rows), params, "patch_embed");
  const Tensor pos_table = concat_rows(params.at("pos_embed"), params.at("pos_mask_token"));
  x = add(x, gather_rows(pos_table, pos_rows));
  for (std::size_t d = 0; d < cfg.depth; ++d) {
    x = block(x, params, "blocks." + std::to_string(d), batch, v, cfg.heads);
  }
  x = norm(x, params, "norm");

  Encoded enc;
  enc.batch = batch;
  enc.tokens = v;
  enc.pooled = mean(reshape(x, {batch, v, cfg.embed_dim}), 1);
  enc.latents = std::move(x);
  return enc;
}

Tensor position_head(const Encoded& enc, const ParamSet& params) {
  return linear(enc.latents, params, "head.pos");
}

Tensor recon_head(const Encoded& enc, std::span<const MaskPlan> plans,
                  const ParamSet& params, const ModelConfig& cfg) {
  const std::size_t n = cfg.n_patches();
  check_plans(plans, enc.batch, n);
  if (plans[0].visible_count() != enc.tokens) {
    throw Error(ErrorCode::kPlanMismatch, "recon plans differ from the encoding plans");
  }
  const std::size_t v = enc.tokens;
  const std::size_t m = n - v;
  if (m == 0) throw Error(ErrorCode::kDegenerateMask, "no image-masked patches");

  // Full raster-order sequence: encoded tokens where visible, the decoder
  // mask token (row batch*v of the extended table) elsewhere.
  const std::size_t mask_row = enc.batch * v;
  std::vector<std::size_t> order(enc.batch * n, mask_row);
  std::vector<std::size_t> masked_rows;
  masked_rows.reserve(enc.batch * m);
  for (std::size_t b = 0; b < enc.batch; ++b) {
    const MaskPlan& plan = plans[b];
    for (std::size_t i = 0; i < v; ++i) order[b * n + plan.visible_idx[i]] = b * v + i;
    for (std::size_t p : plan.masked_idx()) masked_rows.push_back(b * n + p);
  }
  Tensor x = linear(enc.latents, params, "sram.embed");
  x = gather_rows(concat_rows(x, params.at("sram.mask_token")), order);
  x = reshape(add(reshape(x, {enc.batch, n, cfg.embed_dim}), params.at("sram.pos_embed")),
              {enc.batch * n, cfg.embed_dim});
  for (std::size_t d = 0; d < cfg.decoder_depth; ++d) {
    x = block(x, params, "sram.blocks." + std::to_string(d), enc.batch, n, cfg.heads);
  }
  x = norm(x, params, "sram.norm");
  return linear(gather_rows(x, masked_rows), params, "sram.pred");
}

Tensor seg_head(const Encoded& enc, const ParamSet& head, const ModelConfig& cfg) {
  const std::size_t n = cfg.n_patches();
  if (enc.tokens != n) {
    throw Error(ErrorCode::kPlanMismatch, "seg_head needs a fully visible encoding");
  }
  // [B*N, s*s*2]: two logits for every pixel of the patch, (dy, dx) order.
  Tensor logits = linear(enc.latents, head, "seg");
  const std::size_t h = cfg.image_size, s = cfg.patch_size, g = cfg.grid();
  const std::size_t per_patch = s * s * 2;
  std::vector<std::size_t> index;
  index.reserve(enc.batch * h * h * 2);
  for (std::size_t b = 0; b < enc.batch; ++b) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < h; ++x) {
        const std::size_t patch = b * n + (y / s) * g + (x / s);
        const std::size_t base = patch * per_patch + ((y % s) * s + (x % s)) * 2;
        index.push_back(base);
        index.push_back(base + 1);
      }
    }
  }
  return take(logits, index, {enc.batch, h, h, 2});
}

}  // namespace lfdg
