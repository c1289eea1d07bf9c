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

#include "lfdg/image.hpp"

#include <algorithm>

#include "lfdg/error.hpp"

namespace lfdg {

Image Image::filled(std::size_t h, std::size_t w, std::size_t c, double v) {
  return Image{h, w, c, std::vector<double>(h * w * c, v)};
}

Tensor stack_images(std::span<const Image* const> images, bool requires_grad) {
  if (images.empty()) throw Error(ErrorCode::kEmptyDataset, "no images to stack");
  const Image& first = *images[0];
  std::vector<double> values;
  values.reserve(images.size() * first.size());
  for (const Image* img : images) {
    if (!img->same_dims(first) || img->pixels.size() != first.size()) {
      throw Error(ErrorCode::kDimMismatch, "images in a batch differ in size");
    }
    values.insert(values.end(), img->pixels.begin(), img->pixels.end());
  }
  return Tensor::from_values(
      {images.size(), first.height, first.width, first.channels},
      std::move(values), requires_grad);
}

Image image_from_batch(const Tensor& batch, std::size_t index) {
  if (batch.rank() != 4 || index >= batch.dim(0)) {
    throw Error(ErrorCode::kDimMismatch, "image_from_batch: bad batch or index");
  }
  Image out{batch.dim(1), batch.dim(2), batch.dim(3), {}};
  const std::size_t n = out.height * out.width * out.channels;
  auto v = batch.values();
  out.pixels.assign(v.begin() + static_cast<std::ptrdiff_t>(index * n),
                    v.begin() + static_cast<std::ptrdiff_t>((index + 1) * n));
  return out;
}

}  // namespace lfdg
