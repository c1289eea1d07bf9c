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

#include "lfdg/tensor.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "lfdg/error.hpp"

namespace lfdg {
namespace {

#ifdef NDEBUG
std::atomic<bool> g_finite_checks{false};
#else
std::atomic<bool> g_finite_checks{true};
#endif

void validate_shape(const Shape& shape) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw Error(ErrorCode::kShapeMismatch,
                  "zero-sized dimension in shape " + shape_to_string(shape));
    }
  }
}

void require_finite(std::span<const double> values, const char* where) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  std::string("non-finite value in ") + where);
    }
  }
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kNotScalarRoot: return "NotScalarRoot";
    case ErrorCode::kDetachedTensor: return "DetachedTensor";
    case ErrorCode::kIncongruentParamSets: return "IncongruentParamSets";
    case ErrorCode::kZeroWeightSum: return "ZeroWeightSum";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kPlanMismatch: return "PlanMismatch";
    case ErrorCode::kDegenerateMask: return "DegenerateMask";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kPrivacyViolation: return "PrivacyViolation";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
  }
  return "Unknown";
}

void set_finite_checks(bool enabled) { g_finite_checks.store(enabled); }
bool finite_checks_enabled() { return g_finite_checks.load(); }

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return from_values(std::move(shape), std::vector<double>(n, value),
                     requires_grad);
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values,
                           bool requires_grad) {
  validate_shape(shape);
  if (values.size() != shape_numel(shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                "value count " + std::to_string(values.size()) +
                    " does not match shape " + shape_to_string(shape));
  }
  require_finite(values, "tensor creation");
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_values({}, {value}, requires_grad);
}

detail::Node& Tensor::checked() const {
  if (!node_) throw Error(ErrorCode::kDetachedTensor, "undefined tensor");
  return *node_;
}

const Shape& Tensor::shape() const { return checked().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "axis " + std::to_string(axis) + " out of range for " +
                    shape_to_string(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return checked().value.size(); }

std::span<const double> Tensor::values() const { return checked().value; }

std::span<double> Tensor::mutable_values() {
  detail::Node& n = checked();
  if (!n.is_leaf) {
    throw Error(ErrorCode::kDetachedTensor,
                "mutable access to a non-leaf tensor");
  }
  return n.value;
}

double Tensor::item() const {
  const detail::Node& n = checked();
  if (n.value.size() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "item() on tensor of shape " + shape_to_string(n.shape));
  }
  return n.value[0];
}

bool Tensor::requires_grad() const { return checked().requires_grad; }

Tensor& Tensor::set_requires_grad(bool flag) {
  detail::Node& n = checked();
  if (!n.is_leaf) {
    throw Error(ErrorCode::kDetachedTensor,
                "requires_grad can only be set on leaves");
  }
  n.requires_grad = flag;
  if (!flag) n.grad.clear();
  return *this;
}

bool Tensor::is_leaf() const { return checked().is_leaf; }
const char* Tensor::op_name() const { return checked().op; }

bool Tensor::has_grad() const { return !checked().grad.empty(); }

std::span<const double> Tensor::grad() const { return checked().grad; }

void Tensor::zero_grad() {
  detail::Node& n = checked();
  std::fill(n.grad.begin(), n.grad.end(), 0.0);
}

Tensor Tensor::detach() const {
  const detail::Node& n = checked();
  auto out = std::make_shared<detail::Node>();
  out->shape = n.shape;
  out->value = n.value;
  return Tensor(std::move(out));
}

Tensor Tensor::clone() const {
  Tensor t = detach();
  t.node_->requires_grad = checked().requires_grad;
  return t;
}

Tensor Tensor::make_result(Shape shape, std::vector<double> values,
                           std::vector<const Tensor*> inputs,
                           std::function<void(detail::Node&)> backward,
                           const char* op) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->op = op;
  if (g_finite_checks.load(std::memory_order_relaxed)) {
    require_finite(node->value, op);
  }
  bool any = false;
  for (const Tensor* in : inputs) any = any || in->requires_grad();
  if (any) {
    node->requires_grad = true;
    node->is_leaf = false;
    node->parents.reserve(inputs.size());
    for (const Tensor* in : inputs) node->parents.push_back(in->node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

void Tensor::backward() const {
  detail::Node& root = checked();
  if (root.value.size() != 1) {
    throw Error(ErrorCode::kNotScalarRoot,
                "backward() needs a scalar root, got shape " +
                    shape_to_string(root.shape));
  }
  if (!root.requires_grad) {
    throw Error(ErrorCode::kDetachedTensor,
                "backward() root is not attached to any tensor requiring grad");
  }

  // Iterative post-order DFS; `order` ends up parents-before-children.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      detail::Node* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  for (detail::Node* n : order) {
    if (n->grad.size() != n->value.size()) {
      n->grad.assign(n->value.size(), 0.0);
    } else if (!n->is_leaf) {
      std::fill(n->grad.begin(), n->grad.end(), 0.0);
    }
  }
  root.grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (!n->is_leaf && n->backward) n->backward(*n);
  }
  for (detail::Node* n : order) {
    if (!n->is_leaf) std::vector<double>().swap(n->grad);
  }
}

}  // namespace lfdg
