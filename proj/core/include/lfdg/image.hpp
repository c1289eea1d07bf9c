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

#ifndef LFDG_IMAGE_HPP_
#define LFDG_IMAGE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "lfdg/tensor.hpp"

namespace lfdg {

// H x W x C image, row-major with interleaved channels, values nominally
// in [0, 1].
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> pixels;

  static Image filled(std::size_t h, std::size_t w, std::size_t c, double v);

  std::size_t size() const { return pixels.size(); }
  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return pixels[(y * width + x) * channels + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels[(y * width + x) * channels + c];
  }
  bool same_dims(const Image& other) const {
    return height == other.height && width == other.width &&
           channels == other.channels;
  }
};

// Stacks equally sized images into a [B, H, W, C] tensor.
Tensor stack_images(std::span<const Image* const> images,
                    bool requires_grad = false);
// Copies image `index` out of a [B, H, W, C] tensor.
Image image_from_batch(const Tensor& batch, std::size_t index);

}  // namespace lfdg

#endif  // LFDG_IMAGE_HPP_
