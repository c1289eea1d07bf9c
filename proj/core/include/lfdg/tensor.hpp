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

#ifndef LFDG_TENSOR_HPP_
#define LFDG_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lfdg {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {

// One vertex of the define-by-run tape. Interior nodes own a closure that
// pushes their gradient into their parents.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
};

}  // namespace detail

// When enabled every op result is scanned for NaN/Inf. On by default in
// debug builds; creation-time validation is unconditional.
void set_finite_checks(bool enabled);
bool finite_checks_enabled();

// Dense row-major float64 tensor with reverse-mode autodiff.
//
// A Tensor is a handle: copies share the node, like a reference. Deep copies
// go through clone() / detach(). Ops on tensors that require grad are
// recorded on an implicit tape rooted in the result; backward() walks it.
// Gradients of leaves accumulate across backward() calls until zero_grad().
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  // Writable view of a leaf's storage (optimizer updates, pixel ascent).
  std::span<double> mutable_values();
  double item() const;

  bool requires_grad() const;
  Tensor& set_requires_grad(bool flag);
  bool is_leaf() const;
  const char* op_name() const;

  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();

  // Leaf copy of the values, cut from the tape, requires_grad=false.
  Tensor detach() const;
  // Leaf copy of the values that keeps the requires_grad flag (no grad).
  Tensor clone() const;

  void backward() const;

  // Used by op implementations to append a node to the tape.
  static Tensor make_result(
      Shape shape, std::vector<double> values,
      std::vector<const Tensor*> inputs,
      std::function<void(detail::Node&)> backward, const char* op);

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  detail::Node& checked() const;

  std::shared_ptr<detail::Node> node_;
};

}  // namespace lfdg

#endif  // LFDG_TENSOR_HPP_
