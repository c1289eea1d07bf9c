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

#ifndef LFDG_PARAMS_HPP_
#define LFDG_PARAMS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lfdg/tensor.hpp"

namespace lfdg {

// Named model parameters, iterated in lexicographic name order.
//
// Unlike Tensor, a ParamSet has value semantics: copying it copies every
// tensor's storage, so client replicas never alias the global model.
class ParamSet {
 public:
  using Map = std::map<std::string, Tensor>;

  ParamSet() = default;
  ParamSet(const ParamSet& other);
  ParamSet& operator=(const ParamSet& other);
  ParamSet(ParamSet&&) noexcept = default;
  ParamSet& operator=(ParamSet&&) noexcept = default;

  void insert(const std::string& name, Tensor tensor);
  bool contains(const std::string& name) const;
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<std::string> names() const;
  std::size_t total_numel() const;

  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  // Same names and shapes.
  bool congruent_with(const ParamSet& other) const;
  // Bitwise equality of names, shapes and values.
  bool bit_equal(const ParamSet& other) const;

  void set_requires_grad(bool flag);
  void set_requires_grad(bool flag,
                         const std::function<bool(const std::string&)>& pred);
  void zero_grads();
  // Deep copy whose tensors do not require grad (frozen view).
  ParamSet detached() const;
  // Entries whose names satisfy the predicate (deep copies).
  ParamSet filtered(const std::function<bool(const std::string&)>& pred) const;
  // Overwrites/extends entries with those of `other` (deep copies).
  void merge_from(const ParamSet& other);

  // FNV-1a over names, shapes and raw IEEE-754 bytes.
  std::uint64_t checksum() const;

 private:
  Map entries_;
};

// Euclidean norm of the difference of two congruent sets.
double param_distance(const ParamSet& a, const ParamSet& b);

// FedAvg weighted mean. Weights are normalized to sum to one.
//
// Each element is computed as ref + sum_i w_i * (x_i - ref) with ref the
// elementwise minimum and the terms summed in sorted order, which makes the
// result bitwise invariant to the order of `sets` and exact whenever all
// inputs agree.
ParamSet average_params(std::span<const ParamSet> sets,
                        std::span<const double> weights);

}  // namespace lfdg

#endif  // LFDG_PARAMS_HPP_
