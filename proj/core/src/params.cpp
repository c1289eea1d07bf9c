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

#include "lfdg/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

#include "lfdg/error.hpp"

namespace lfdg {

ParamSet::ParamSet(const ParamSet& other) {
  for (const auto& [name, t] : other.entries_) entries_.emplace(name, t.clone());
}

ParamSet& ParamSet::operator=(const ParamSet& other) {
  if (this != &other) {
    ParamSet copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void ParamSet::insert(const std::string& name, Tensor tensor) {
  entries_.insert_or_assign(name, std::move(tensor));
}

bool ParamSet::contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

const Tensor& ParamSet::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kIncongruentParamSets, "missing parameter '" + name + "'");
  }
  return it->second;
}

Tensor& ParamSet::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kIncongruentParamSets, "missing parameter '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, t] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamSet::total_numel() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.numel();
  return n;
}

bool ParamSet::congruent_with(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  auto it = other.entries_.begin();
  for (const auto& [name, t] : entries_) {
    if (name != it->first || t.shape() != it->second.shape()) return false;
    ++it;
  }
  return true;
}

bool ParamSet::bit_equal(const ParamSet& other) const {
  if (!congruent_with(other)) return false;
  auto it = other.entries_.begin();
  for (const auto& [name, t] : entries_) {
    auto a = t.values();
    auto b = it->second.values();
    if (std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) != 0) {
      return false;
    }
    ++it;
  }
  return true;
}

void ParamSet::set_requires_grad(bool flag) {
  for (auto& [name, t] : entries_) t.set_requires_grad(flag);
}

void ParamSet::set_requires_grad(
    bool flag, const std::function<bool(const std::string&)>& pred) {
  for (auto& [name, t] : entries_) {
    if (pred(name)) t.set_requires_grad(flag);
  }
}

void ParamSet::zero_grads() {
  for (auto& [name, t] : entries_) t.zero_grad();
}

ParamSet ParamSet::detached() const {
  ParamSet out;
  for (const auto& [name, t] : entries_) out.entries_.emplace(name, t.detach());
  return out;
}

ParamSet ParamSet::filtered(
    const std::function<bool(const std::string&)>& pred) const {
  ParamSet out;
  for (const auto& [name, t] : entries_) {
    if (pred(name)) out.entries_.emplace(name, t.clone());
  }
  return out;
}

void ParamSet::merge_from(const ParamSet& other) {
  for (const auto& [name, t] : other.entries_) {
    entries_.insert_or_assign(name, t.clone());
  }
}

std::uint64_t ParamSet::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [name, t] : entries_) {
    mix(name.data(), name.size());
    for (std::size_t d : t.shape()) {
      const std::uint64_t d64 = d;
      mix(&d64, sizeof d64);
    }
    auto v = t.values();
    mix(v.data(), v.size() * sizeof(double));
  }
  return h;
}

double param_distance(const ParamSet& a, const ParamSet& b) {
  if (!a.congruent_with(b)) {
    throw Error(ErrorCode::kIncongruentParamSets, "param_distance");
  }
  double acc = 0.0;
  auto it = b.begin();
  for (const auto& [name, t] : a) {
    auto x = t.values();
    auto y = it->second.values();
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
    ++it;
  }
  return std::sqrt(acc);
}

namespace {

// Order-independent sum: sort then accumulate.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

}  // namespace

ParamSet average_params(std::span<const ParamSet> sets,
                        std::span<const double> weights) {
  if (sets.empty()) {
    throw Error(ErrorCode::kIncongruentParamSets, "no parameter sets to average");
  }
  if (weights.size() != sets.size()) {
    throw Error(ErrorCode::kIncongruentParamSets,
                "weight count does not match set count");
  }
  for (const ParamSet& s : sets) {
    if (!s.congruent_with(sets[0])) {
      throw Error(ErrorCode::kIncongruentParamSets,
                  "parameter sets differ in names or shapes");
    }
  }
  std::vector<double> w(weights.begin(), weights.end());
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kZeroWeightSum, "weights must be finite and >= 0");
    }
  }
  std::vector<double> tmp = w;
  const double total = sorted_sum(tmp);
  if (!(total > 0.0)) throw Error(ErrorCode::kZeroWeightSum, "weights sum to 0");
  for (double& x : w) x /= total;

  const std::size_t k = sets.size();
  std::vector<std::span<const double>> views(k);
  std::vector<double> terms(k);
  ParamSet out;
  for (const auto& [name, proto] : sets[0]) {
    for (std::size_t s = 0; s < k; ++s) views[s] = sets[s].at(name).values();
    std::vector<double> avg(proto.numel());
    for (std::size_t i = 0; i < avg.size(); ++i) {
      double ref = views[0][i];
      for (std::size_t s = 1; s < k; ++s) ref = std::min(ref, views[s][i]);
      for (std::size_t s = 0; s < k; ++s) terms[s] = w[s] * (views[s][i] - ref);
      avg[i] = ref + sorted_sum(terms);
    }
    out.insert(name, Tensor::from_values(proto.shape(), std::move(avg),
                                         proto.requires_grad()));
  }
  return out;
}

}  // namespace lfdg
