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

#ifndef LFDG_SYNTH_HPP_
#define LFDG_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfdg/image.hpp"
#include "lfdg/rng.hpp"
#include "lfdg/shard.hpp"

namespace lfdg {

// Photometric and shape signature of one synthetic acquisition center.
struct DomainSpec {
  std::string center_id;
  double intensity_shift = 0.0;     // additive, in [-0.2, 0.2]
  double hue_rotation = 0.0;        // degrees about the grey axis
  double noise_sigma = 0.0;         // additive Gaussian, in [0, 0.1]
  int blur_radius = 0;              // box blur radius in {0, 1, 2}
  double eccentricity_min = 0.0;    // blob eccentricity range, in [0, 1)
  double eccentricity_max = 0.5;
  double texture_frequency = 3.0;   // background texture cycles per image
};

// Ellipse size bounds shared by every center.
struct BlobGeometry {
  double radius_min = 4.0;  // semi-major axis, pixels
  double radius_max = 9.0;
  double minor_min = 2.0;   // floor on the semi-minor axis
};

struct SampleRecord {
  std::size_t id = 0;
  std::string domain;
  Image image;
  // H*W flags (1 = blob). Empty for unlabeled records.
  std::vector<std::uint8_t> mask;
};

struct DataConfig {
  std::size_t image_size = 32;
  std::size_t client_images = 200;
  std::size_t server_images = 100;
  std::size_t unseen_images = 100;
  BlobGeometry geometry;
  // c1 (server), c2..c6 (clients), then the unseen test domain.
  std::vector<DomainSpec> domains;
};

// The seven default centers: c1..c6 and "unseen", whose parameters fall
// outside the range spanned by c1..c6 in several coordinates.
std::vector<DomainSpec> default_domains();
DataConfig default_data_config();

// Renders the noise-free, unshifted image for the geometry drawn from rng;
// generate_center() applies the domain transforms on top of exactly this.
SampleRecord render_clean(const DomainSpec& spec, const BlobGeometry& geometry,
                          std::size_t image_size, Rng& rng);

// Applies hue rotation, intensity shift, box blur and Gaussian noise, then
// clamps to [0, 1].
void apply_domain_transform(Image& image, const DomainSpec& spec, Rng& rng);

// `count` samples, image i seeded by derive_seed(seed, "image", {i}).
std::vector<SampleRecord> generate_center(const DomainSpec& spec,
                                          std::size_t count,
                                          std::uint64_t seed,
                                          const BlobGeometry& geometry,
                                          std::size_t image_size,
                                          std::size_t first_id = 0);

bool is_four_connected(const std::vector<std::uint8_t>& mask,
                       std::size_t height, std::size_t width);

struct FederationData {
  std::vector<UnlabeledShard> clients;  // client k holds center c(k+2)
  std::vector<std::string> client_domains;
  std::vector<SampleRecord> server;     // c1, labeled
  std::vector<SampleRecord> unseen;     // labeled, evaluation only
};

// Image ids are unique across all shards. Throws Error(kInvalidConfig) for
// unusable configurations.
FederationData build_federation(const DataConfig& cfg, std::size_t n_clients,
                                std::uint64_t seed);

// Writes every image as PPM (masks as PGM) plus manifest.csv with columns
// id,center,has_mask,path (paths relative to `dir`).
void export_federation(const FederationData& data,
                       const std::filesystem::path& dir);

}  // namespace lfdg

#endif  // LFDG_SYNTH_HPP_
