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

#include "lfdg/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "lfdg/error.hpp"
#include "lfdg/raster.hpp"

namespace lfdg {
namespace {

constexpr std::array<double, 3> kTissue = {0.78, 0.42, 0.36};
constexpr std::array<double, 3> kPolyp = {0.92, 0.62, 0.50};

struct Ellipse {
  double cy, cx, a, b, angle;
  bool contains(double y, double x) const {
    const double dy = y - cy, dx = x - cx;
    const double u = dx * std::cos(angle) + dy * std::sin(angle);
    const double v = -dx * std::sin(angle) + dy * std::cos(angle);
    return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
  }
  double radial(double y, double x) const {
    const double dy = y - cy, dx = x - cx;
    const double u = dx * std::cos(angle) + dy * std::sin(angle);
    const double v = -dx * std::sin(angle) + dy * std::cos(angle);
    return std::sqrt((u * u) / (a * a) + (v * v) / (b * b));
  }
};

void box_blur(Image& img, int radius) {
  if (radius <= 0) return;
  const Image src = img;
  const auto h = static_cast<int>(img.height), w = static_cast<int>(img.width);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        int count = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx) {
            const int yy = y + dy, xx = x + dx;
            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
            acc += src.at(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx), c);
            ++count;
          }
        }
        img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c) = acc / count;
      }
    }
  }
}

// Rodrigues rotation about (1,1,1)/sqrt(3).
std::array<double, 9> hue_matrix(double degrees) {
  const double t = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  const double k = (1.0 - c) / 3.0;
  const double r = s / std::sqrt(3.0);
  return {c + k, k - r, k + r,
          k + r, c + k, k - r,
          k - r, k + r, c + k};
}

}  // namespace

std::vector<DomainSpec> default_domains() {
  return {
      {"c1", 0.00, 0.0, 0.02, 0, 0.0, 0.6, 3.0},
      {"c2", 0.08, 10.0, 0.03, 1, 0.2, 0.7, 2.0},
      {"c3", -0.08, -10.0, 0.01, 0, 0.0, 0.5, 4.0},
      {"c4", 0.04, 20.0, 0.05, 1, 0.3, 0.8, 3.0},
      {"c5", -0.04, -20.0, 0.02, 2, 0.1, 0.6, 5.0},
      {"c6", 0.12, 5.0, 0.04, 0, 0.2, 0.7, 2.0},
      {"unseen", -0.18, 35.0, 0.08, 1, 0.4, 0.9, 6.0},
  };
}

DataConfig default_data_config() {
  DataConfig cfg;
  cfg.domains = default_domains();
  return cfg;
}

SampleRecord render_clean(const DomainSpec& spec, const BlobGeometry& geometry,
                          std::size_t image_size, Rng& rng) {
  const double size = static_cast<double>(image_size);
  SampleRecord rec;
  rec.domain = spec.center_id;
  rec.image = Image::filled(image_size, image_size, 3, 0.0);
  rec.mask.assign(image_size * image_size, 0);

  // Background texture.
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double phase1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double phase2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double brightness = rng.uniform(-0.05, 0.05);
  const double w = 2.0 * std::numbers::pi * spec.texture_frequency / size;

  // Blob; redrawn until the rasterized mask is non-empty and 4-connected.
  Ellipse e{};
  for (int attempt = 0;; ++attempt) {
    e.a = rng.uniform(geometry.radius_min, geometry.radius_max);
    const double ecc = rng.uniform(spec.eccentricity_min, spec.eccentricity_max);
    e.b = std::max(geometry.minor_min, e.a * std::sqrt(1.0 - ecc * ecc));
    e.angle = rng.uniform(0.0, std::numbers::pi);
    const double margin = e.a + 1.0;
    e.cy = rng.uniform(margin, size - margin);
    e.cx = rng.uniform(margin, size - margin);
    std::fill(rec.mask.begin(), rec.mask.end(), 0);
    std::size_t count = 0;
    for (std::size_t y = 0; y < image_size; ++y) {
      for (std::size_t x = 0; x < image_size; ++x) {
        if (e.contains(static_cast<double>(y) + 0.5, static_cast<double>(x) + 0.5)) {
          rec.mask[y * image_size + x] = 1;
          ++count;
        }
      }
    }
    if (count > 0 && is_four_connected(rec.mask, image_size, image_size)) break;
    if (attempt > 1000) throw Error(ErrorCode::kInvalidConfig, "cannot place a blob");
  }

  for (std::size_t y = 0; y < image_size; ++y) {
    for (std::size_t x = 0; x < image_size; ++x) {
      const double fy = static_cast<double>(y) + 0.5, fx = static_cast<double>(x) + 0.5;
      const double u = fx * std::cos(theta) + fy * std::sin(theta);
      const double v = -fx * std::sin(theta) + fy * std::cos(theta);
      const double tex = 0.5 + 0.5 * std::sin(w * u + phase1) * std::sin(w * v + phase2);
      const bool inside = rec.mask[y * image_size + x] != 0;
      // Polyps are brighter and shaded toward the rim.
      const double shade = inside ? 1.05 - 0.25 * std::pow(e.radial(fy, fx), 2.0) : 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double value = inside ? kPolyp[c] * shade
                                    : kTissue[c] * (0.8 + 0.3 * tex);
        rec.image.at(y, x, c) = std::clamp(value + brightness, 0.0, 1.0);
      }
    }
  }
  return rec;
}

void apply_domain_transform(Image& image, const DomainSpec& spec, Rng& rng) {
  if (spec.hue_rotation != 0.0) {
    const auto m = hue_matrix(spec.hue_rotation);
    for (std::size_t i = 0; i + 2 < image.pixels.size(); i += 3) {
      const double r = image.pixels[i], g = image.pixels[i + 1], b = image.pixels[i + 2];
      image.pixels[i] = m[0] * r + m[1] * g + m[2] * b;
      image.pixels[i + 1] = m[3] * r + m[4] * g + m[5] * b;
      image.pixels[i + 2] = m[6] * r + m[7] * g + m[8] * b;
    }
  }
  if (spec.intensity_shift != 0.0) {
    for (double& p : image.pixels) p += spec.intensity_shift;
  }
  box_blur(image, spec.blur_radius);
  if (spec.noise_sigma > 0.0) {
    for (double& p : image.pixels) p += spec.noise_sigma * rng.normal();
  }
  for (double& p : image.pixels) p = std::clamp(p, 0.0, 1.0);
}

std::vector<SampleRecord> generate_center(const DomainSpec& spec,
                                          std::size_t count,
                                          std::uint64_t seed,
                                          const BlobGeometry& geometry,
                                          std::size_t image_size,
                                          std::size_t first_id) {
  std::vector<SampleRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, "image", {i}));
    SampleRecord rec = render_clean(spec, geometry, image_size, rng);
    apply_domain_transform(rec.image, spec, rng);
    rec.id = first_id + i;
    out.push_back(std::move(rec));
  }
  return out;
}

bool is_four_connected(const std::vector<std::uint8_t>& mask,
                       std::size_t height, std::size_t width) {
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::size_t> stack;
  std::size_t total = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      ++total;
      if (stack.empty() && !seen[i] && total == 1) {
        stack.push_back(i);
        seen[i] = 1;
      }
    }
  }
  if (total == 0) return false;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    ++reached;
    const std::size_t y = i / width, x = i % width;
    auto visit = [&](std::size_t j) {
      if (mask[j] && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    };
    if (y > 0) visit(i - width);
    if (y + 1 < height) visit(i + width);
    if (x > 0) visit(i - 1);
    if (x + 1 < width) visit(i + 1);
  }
  return reached == total;
}

FederationData build_federation(const DataConfig& cfg, std::size_t n_clients,
                                std::uint64_t seed) {
  if (cfg.domains.size() != 7) {
    throw Error(ErrorCode::kInvalidConfig, "data: expected 7 domains (c1..c6, unseen)");
  }
  if (n_clients < 1 || n_clients > 5) {
    throw Error(ErrorCode::kInvalidConfig, "fed.n_clients must lie in [1, 5]");
  }
  if (cfg.client_images == 0 || cfg.server_images == 0 || cfg.unseen_images == 0) {
    throw Error(ErrorCode::kInvalidConfig, "data: shard sizes must be positive");
  }
  FederationData data;
  std::size_t next_id = 0;
  auto gen = [&](std::size_t domain, std::size_t count) {
    auto recs = generate_center(cfg.domains[domain], count,
                                derive_seed(seed, "center", {domain}),
                                cfg.geometry, cfg.image_size, next_id);
    next_id += count;
    return recs;
  };
  data.server = gen(0, cfg.server_images);
  for (std::size_t k = 0; k < n_clients; ++k) {
    auto recs = gen(k + 1, cfg.client_images);
    std::vector<Image> images;
    std::vector<std::size_t> ids;
    for (auto& r : recs) {
      images.push_back(std::move(r.image));
      ids.push_back(r.id);
    }
    data.clients.emplace_back(k, std::move(images), std::move(ids));
    data.client_domains.push_back(cfg.domains[k + 1].center_id);
  }
  data.unseen = gen(6, cfg.unseen_images);
  return data;
}

void export_federation(const FederationData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "images", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir / "images").string());
  std::ofstream manifest(dir / "manifest.csv", std::ios::trunc);
  if (!manifest) throw Error(ErrorCode::kIo, "cannot write manifest.csv");
  manifest << "id,center,has_mask,path\n";
  auto emit_labeled = [&](const SampleRecord& r) {
    const std::string stem = "images/" + std::to_string(r.id);
    write_ppm(dir / (stem + ".ppm"), r.image);
    write_pgm(dir / (stem + "_mask.pgm"), r.mask, r.image.height, r.image.width);
    manifest << r.id << ',' << r.domain << ",1," << stem << ".ppm\n";
  };
  for (const auto& r : data.server) emit_labeled(r);
  for (std::size_t k = 0; k < data.clients.size(); ++k) {
    const UnlabeledShard& shard = data.clients[k];
    const auto images = shard.all();
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string stem = "images/" + std::to_string(shard.id(i));
      write_ppm(dir / (stem + ".ppm"), *images[i]);
      manifest << shard.id(i) << ',' << data.client_domains[k] << ",0," << stem << ".ppm\n";
    }
  }
  for (const auto& r : data.unseen) emit_labeled(r);
  if (!manifest) throw Error(ErrorCode::kIo, "write failed for manifest.csv");
}

}  // namespace lfdg
