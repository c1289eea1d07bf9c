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

#ifndef LFDG_TESTS_TESTING_FIXTURES_HPP_
#define LFDG_TESTS_TESTING_FIXTURES_HPP_

#include <cstddef>
#include <vector>

#include "lfdg/image.hpp"
#include "lfdg/model.hpp"
#include "lfdg/rng.hpp"

namespace lfdg::testing {

// 16x16x3 images, 8 px patches (N = 4), D = 8, one block, two heads.
ModelConfig tiny_model();

Image random_image(const ModelConfig& cfg, Rng& rng, double lo = 0.05,
                   double hi = 0.95);
std::vector<Image> random_images(std::size_t count, const ModelConfig& cfg,
                                 Rng& rng);
std::vector<const Image*> pointers(const std::vector<Image>& images);

}  // namespace lfdg::testing

#endif  // LFDG_TESTS_TESTING_FIXTURES_HPP_
