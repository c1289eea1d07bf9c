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

#ifndef LFDG_ADAM_HPP_
#define LFDG_ADAM_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lfdg/params.hpp"

namespace lfdg {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are keyed by parameter name and
// created lazily on the first step that sees a gradient for that name.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Updates every tensor in `params` that requires grad and holds a gradient.
  // Gradients are left in place; call params.zero_grads() before the next
  // backward pass.
  void step(ParamSet& params);

  std::size_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace lfdg

#endif  // LFDG_ADAM_HPP_
