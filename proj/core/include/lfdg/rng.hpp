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

#ifndef LFDG_RNG_HPP_
#define LFDG_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace lfdg {

// xoshiro256** seeded through splitmix64. The stream depends only on the
// seed, so runs reproduce bit-for-bit on any platform with IEEE doubles.
// Floating-point draws use only integer arithmetic plus std::log/std::cos
// (normal()), never the implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Standard normal via Box-Muller (one draw per call; the pair's second
  // value is discarded so the stream position is call-count determined).
  double normal();

  // k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);
  void shuffle(std::vector<std::size_t>& values);

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Mixes a parent seed with a sequence of tags into an independent child seed.
std::uint64_t derive_seed(std::uint64_t parent,
                          std::initializer_list<std::uint64_t> tags);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                          std::initializer_list<std::uint64_t> tags = {});

}  // namespace lfdg

#endif  // LFDG_RNG_HPP_
