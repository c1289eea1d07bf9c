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

#include "lfdg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "lfdg/error.hpp"

namespace lfdg {
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_raster(const std::filesystem::path& path, const char* magic,
                  std::size_t h, std::size_t w, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << magic << '\n' << w << ' ' << h << "\n255\n";
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<std::uint8_t> read_raster(const std::filesystem::path& path,
                                      const std::string& magic, std::size_t channels,
                                      std::size_t* h, std::size_t* w) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::string m;
  std::size_t width = 0, height = 0, maxval = 0;
  f >> m >> width >> height >> maxval;
  if (!f || m != magic || maxval != 255 || width == 0 || height == 0) {
    throw Error(ErrorCode::kIo, "unsupported raster header in " + path.string());
  }
  f.get();
  std::vector<std::uint8_t> bytes(width * height * channels);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "truncated raster " + path.string());
  *h = height;
  *w = width;
  return bytes;
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Image& image) {
  if (image.channels != 3) throw Error(ErrorCode::kDimMismatch, "PPM needs 3 channels");
  std::vector<std::uint8_t> bytes(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), bytes.begin(), to_byte);
  write_raster(path, "P6", image.height, image.width, bytes);
}

Image read_ppm(const std::filesystem::path& path) {
  std::size_t h = 0, w = 0;
  const auto bytes = read_raster(path, "P6", 3, &h, &w);
  Image out = Image::filled(h, w, 3, 0.0);
  for (std::size_t i = 0; i < bytes.size(); ++i) out.pixels[i] = bytes[i] / 255.0;
  return out;
}

void write_pgm(const std::filesystem::path& path, std::span<const std::uint8_t> mask,
               std::size_t height, std::size_t width) {
  if (mask.size() != height * width) {
    throw Error(ErrorCode::kDimMismatch, "mask size does not match dimensions");
  }
  std::vector<std::uint8_t> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask[i] ? 255 : 0;
  write_raster(path, "P5", height, width, bytes);
}

std::vector<std::uint8_t> read_pgm(const std::filesystem::path& path,
                                   std::size_t* height, std::size_t* width) {
  auto bytes = read_raster(path, "P5", 1, height, width);
  for (auto& b : bytes) b = b ? 1 : 0;
  return bytes;
}

}  // namespace lfdg
