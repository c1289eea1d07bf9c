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

#ifndef LFDG_RASTER_HPP_
#define LFDG_RASTER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lfdg/image.hpp"

namespace lfdg {

// Binary PPM (P6) for RGB images and PGM (P5) for masks, 8 bits per
// sample. Pixel values are clamped to [0, 1] and rounded to 0..255.
void write_ppm(const std::filesystem::path& path, const Image& image);
Image read_ppm(const std::filesystem::path& path);

// Masks are written as {0, 255}.
void write_pgm(const std::filesystem::path& path,
               std::span<const std::uint8_t> mask, std::size_t height,
               std::size_t width);
// Returns 0/1 flags (any nonzero sample reads as 1).
std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path,
                                   std::size_t* height, std::size_t* width);

}  // namespace lfdg

#endif  // LFDG_RASTER_HPP_
