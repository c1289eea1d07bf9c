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

#include "lfdg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lfdg/error.hpp"

namespace lfdg {
namespace {

const char* const kDomainNames[] = {"c1", "c2", "c3", "c4", "c5", "c6", "unseen"};

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, key + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    invalid(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    invalid(key, "expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

struct Field {
  std::string key;
  std::function<void(std::string_view)> set;
  std::function<std::string()> get;
};

template <typename T>
Field uint_field(std::string key, T& ref) {
  return {key,
          [&ref, key](std::string_view v) { ref = static_cast<T>(parse_u64(key, v)); },
          [&ref] { return std::to_string(ref); }};
}

Field int_field(std::string key, int& ref) {
  return {key,
          [&ref, key](std::string_view v) {
            const auto u = parse_u64(key, v);
            if (u > 1000) invalid(key, "value too large");
            ref = static_cast<int>(u);
          },
          [&ref] { return std::to_string(ref); }};
}

Field double_field(std::string key, double& ref) {
  return {key, [&ref, key](std::string_view v) { ref = parse_double(key, v); },
          [&ref] { return format_double(ref); }};
}

std::vector<Field> fields(RunConfig& c) {
  std::vector<Field> f;
  f.push_back(uint_field("seed", c.seed));

  f.push_back(uint_field("model.image_size", c.model.image_size));
  f.push_back(uint_field("model.channels", c.model.channels));
  f.push_back(uint_field("model.patch_size", c.model.patch_size));
  f.push_back(uint_field("model.embed_dim", c.model.embed_dim));
  f.push_back(uint_field("model.depth", c.model.depth));
  f.push_back(uint_field("model.heads", c.model.heads));
  f.push_back(uint_field("model.mlp_ratio", c.model.mlp_ratio));
  f.push_back(uint_field("model.decoder_depth", c.model.decoder_depth));

  f.push_back(double_field("droppos.gamma_img", c.droppos.gamma_img));
  f.push_back(double_field("droppos.gamma_pos", c.droppos.gamma_pos));

  f.push_back(double_field("sram.mask_ratio", c.sram.mask_ratio));
  f.push_back(double_field("sram.beta", c.sram.beta));
  f.push_back(double_field("sram.lambda_train", c.sram.lambda_train));

  f.push_back(uint_field("ssada.t_max", c.ssada.t_max));
  f.push_back(double_field("ssada.step_size", c.ssada.step_size));
  f.push_back(double_field("ssada.init_noise", c.ssada.init_noise));
  f.push_back(double_field("ssada.lambda_dist", c.ssada.lambda_dist));
  f.push_back(uint_field("ssada.t_min", c.ssada.t_min));
  f.push_back(uint_field("ssada.k_stages", c.ssada.k_stages));
  f.push_back(uint_field("ssada.buffer_cap", c.ssada.buffer_cap));
  f.push_back(double_field("ssada.augment_fraction", c.ssada.augment_fraction));

  f.push_back(uint_field("fed.n_clients", c.fed.n_clients));
  f.push_back(uint_field("fed.rounds", c.fed.rounds));
  f.push_back(uint_field("fed.local_epochs", c.fed.local_epochs));
  f.push_back(uint_field("fed.checkpoint_every", c.fed.checkpoint_every));
  f.push_back(uint_field("fed.threads", c.fed.threads));
  f.push_back(double_field("fed.lr", c.lr));
  f.push_back(uint_field("fed.batch_size", c.batch_size));

  f.push_back(uint_field("data.client_images", c.data.client_images));
  f.push_back(uint_field("data.server_images", c.data.server_images));
  f.push_back(uint_field("data.unseen_images", c.data.unseen_images));
  f.push_back(double_field("data.radius_min", c.data.geometry.radius_min));
  f.push_back(double_field("data.radius_max", c.data.geometry.radius_max));
  f.push_back(double_field("data.minor_min", c.data.geometry.minor_min));
  for (std::size_t i = 0; i < c.data.domains.size(); ++i) {
    DomainSpec& d = c.data.domains[i];
    const std::string p = "data." + d.center_id + ".";
    f.push_back(double_field(p + "intensity_shift", d.intensity_shift));
    f.push_back(double_field(p + "hue_rotation", d.hue_rotation));
    f.push_back(double_field(p + "noise_sigma", d.noise_sigma));
    f.push_back(int_field(p + "blur_radius", d.blur_radius));
    f.push_back(double_field(p + "eccentricity_min", d.eccentricity_min));
    f.push_back(double_field(p + "eccentricity_max", d.eccentricity_max));
    f.push_back(double_field(p + "texture_frequency", d.texture_frequency));
  }

  f.push_back(uint_field("eval.finetune_steps", c.eval.finetune_steps));
  f.push_back(uint_field("eval.split_seed", c.eval.split_seed));
  f.push_back(double_field("eval.holdout_fraction", c.eval.holdout_fraction));
  f.push_back(double_field("eval.lr", c.eval.lr));
  f.push_back(uint_field("eval.batch_size", c.eval.batch_size));

  auto& ab = c.ablation;
  f.push_back({"ablation.variants",
               [&ab](std::string_view v) {
                 ab.variants.clear();
                 for (auto item : split_list(v)) ab.variants.emplace_back(item);
               },
               [&ab] {
                 std::string s;
                 for (const auto& v : ab.variants) s += (s.empty() ? "" : ", ") + v;
                 return s;
               }});
  f.push_back({"ablation.betas",
               [&ab](std::string_view v) {
                 ab.betas.clear();
                 for (auto item : split_list(v)) {
                   ab.betas.push_back(parse_double("ablation.betas", item));
                 }
               },
               [&ab] {
                 std::string s;
                 for (double b : ab.betas) s += (s.empty() ? "" : ", ") + format_double(b);
                 return s;
               }});
  f.push_back(uint_field("ablation.seeds", ab.seeds));
  return f;
}

void check_range(const std::string& key, double v, double lo, double hi,
                 bool lo_open = false, bool hi_open = false) {
  const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  if (!ok) {
    std::ostringstream msg;
    msg << "value " << v << " outside " << (lo_open ? '(' : '[') << lo << ", " << hi
        << (hi_open ? ')' : ']');
    invalid(key, msg.str());
  }
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  check_range("model.image_size", static_cast<double>(model.image_size), 8, 256);
  if (model.channels != 3) invalid("model.channels", "synthetic images are RGB; must be 3");

  check_range("droppos.gamma_img", droppos.gamma_img, 0.0, 1.0, false, true);
  check_range("droppos.gamma_pos", droppos.gamma_pos, 0.0, 1.0);
  const double n = static_cast<double>(model.n_patches());
  if (std::lround((1.0 - droppos.gamma_img) * n) < 2) {
    invalid("droppos.gamma_img", "leaves fewer than 2 visible patches");
  }

  check_range("sram.mask_ratio", sram.mask_ratio, 0.0, 1.0, true, true);
  if (std::lround(sram.mask_ratio * n) < 1 || std::lround(sram.mask_ratio * n) >= n) {
    invalid("sram.mask_ratio", "must mask at least one and keep at least one patch");
  }
  check_range("sram.beta", sram.beta, 0.0, 1e6);
  check_range("sram.lambda_train", sram.lambda_train, 0.0, 1e6);

  check_range("ssada.t_max", static_cast<double>(ssada.t_max), 1, 1e6);
  check_range("ssada.step_size", ssada.step_size, 0.0, 1.0);
  check_range("ssada.init_noise", ssada.init_noise, 0.0, 1.0);
  check_range("ssada.lambda_dist", ssada.lambda_dist, 0.0, 1e6);
  check_range("ssada.t_min", static_cast<double>(ssada.t_min), 1, 1e6);
  check_range("ssada.k_stages", static_cast<double>(ssada.k_stages), 0, 1000);
  check_range("ssada.buffer_cap", static_cast<double>(ssada.buffer_cap), 1, 1e7);
  check_range("ssada.augment_fraction", ssada.augment_fraction, 0.0, 1.0);

  check_range("fed.n_clients", static_cast<double>(fed.n_clients), 1, 5);
  check_range("fed.rounds", static_cast<double>(fed.rounds), 0, 9999);
  check_range("fed.local_epochs", static_cast<double>(fed.local_epochs), 0, 1000);
  check_range("fed.checkpoint_every", static_cast<double>(fed.checkpoint_every), 1, 9999);
  check_range("fed.threads", static_cast<double>(fed.threads), 1, 64);
  check_range("fed.lr", lr, 0.0, 1.0, true);
  check_range("fed.batch_size", static_cast<double>(batch_size), 1, 4096);

  if (data.client_images < batch_size) {
    invalid("data.client_images", "must be at least fed.batch_size");
  }
  check_range("data.server_images", static_cast<double>(data.server_images), 2, 1e6);
  check_range("data.unseen_images", static_cast<double>(data.unseen_images), 1, 1e6);
  check_range("data.client_images", static_cast<double>(data.client_images), 1, 1e6);
  const auto& g = data.geometry;
  check_range("data.radius_min", g.radius_min, 0.0, 1e6, true);
  check_range("data.radius_max", g.radius_max, g.radius_min,
              static_cast<double>(model.image_size) / 2.0 - 1.0, false, true);
  check_range("data.minor_min", g.minor_min, 0.0, g.radius_min, true);
  if (data.domains.size() != 7) invalid("data", "expected 7 domains");
  for (std::size_t i = 0; i < data.domains.size(); ++i) {
    const DomainSpec& d = data.domains[i];
    if (d.center_id != kDomainNames[i]) invalid("data", "unexpected domain " + d.center_id);
    const std::string p = "data." + d.center_id + ".";
    check_range(p + "intensity_shift", d.intensity_shift, -0.2, 0.2);
    check_range(p + "hue_rotation", d.hue_rotation, -180.0, 180.0);
    check_range(p + "noise_sigma", d.noise_sigma, 0.0, 0.1);
    check_range(p + "blur_radius", d.blur_radius, 0, 2);
    check_range(p + "eccentricity_min", d.eccentricity_min, 0.0, 1.0, false, true);
    check_range(p + "eccentricity_max", d.eccentricity_max, d.eccentricity_min, 1.0, false,
                true);
    check_range(p + "texture_frequency", d.texture_frequency, 0.0,
                static_cast<double>(model.image_size) / 2.0, true);
  }

  check_range("eval.finetune_steps", static_cast<double>(eval.finetune_steps), 0, 1e7);
  check_range("eval.holdout_fraction", eval.holdout_fraction, 0.0, 1.0, true, true);
  check_range("eval.lr", eval.lr, 0.0, 1.0, true);
  check_range("eval.batch_size", static_cast<double>(eval.batch_size), 1, 4096);

  static const std::set<std::string> known = {"rand_init", "no_ssada", "no_sram", "full"};
  if (ablation.variants.empty()) invalid("ablation.variants", "empty list");
  std::set<std::string> seen;
  for (const auto& v : ablation.variants) {
    if (!known.count(v)) invalid("ablation.variants", "unknown variant '" + v + "'");
    if (!seen.insert(v).second) invalid("ablation.variants", "duplicate variant '" + v + "'");
  }
  if (ablation.betas.empty()) invalid("ablation.betas", "empty list");
  for (double b : ablation.betas) check_range("ablation.betas", b, 0.0, 1e6);
  check_range("ablation.seeds", static_cast<double>(ablation.seeds), 1, 1000);
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.model = model;
  t.droppos = droppos;
  t.sram = sram;
  t.ssada = ssada;
  t.adam.lr = lr;
  t.batch_size = batch_size;
  return t;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  auto table = fields(cfg);
  std::map<std::string, Field*> by_key;
  for (auto& f : table) by_key[f.key] = &f;
  std::set<std::string> assigned;

  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') invalid(where, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) invalid(where, "expected 'key = value'");
    const std::string name(trim(line.substr(0, eq)));
    const std::string key = section.empty() ? name : section + "." + name;
    const auto it = by_key.find(key);
    if (it == by_key.end()) invalid(key, "unknown key");
    if (!assigned.insert(key).second) invalid(key, "duplicate key");
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) invalid(key, "missing value");
    it->second->set(value);
  }
  for (const auto& f : table) {
    if (!assigned.count(f.key)) invalid(f.key, "missing key");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  const auto table = fields(copy);
  std::ostringstream out;
  std::string section;
  for (const auto& f : table) {
    const auto dot = f.key.rfind('.');
    const std::string sec = dot == std::string::npos ? "" : f.key.substr(0, dot);
    const std::string name = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << name << " = " << f.get() << '\n';
  }
  return out.str();
}

}  // namespace lfdg
