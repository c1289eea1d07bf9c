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

#ifndef LFDG_OPS_HPP_
#define LFDG_OPS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "lfdg/tensor.hpp"

namespace lfdg {

// Differentiable kernels. Every function validates shapes (ShapeMismatch)
// and records its result on the tape when any input requires grad.

// [m,k] x [k,n] -> [m,n].
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise with suffix broadcasting: `b` may have the shape of any
// trailing block of `a` (e.g. a bias [D] added to [R,D], or a scalar).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

// Numerically stable softmax over the last axis.
Tensor softmax(const Tensor& x);
// Layer normalization over the last axis with affine gamma/beta of that size.
Tensor layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps = 1e-5);
// Exact (erf) GELU.
Tensor gelu(const Tensor& x);

// Mean squared difference over all elements; scalar.
Tensor mse(const Tensor& a, const Tensor& b);

// Cross-entropy of logits [R,C] against integer targets, averaged over the
// rows with row_active[r] != 0. When col_allowed is non-empty (R*C flags)
// the softmax support of row r is restricted to its allowed columns and the
// target must be one of them. No active rows -> 0, with all-zero gradients.
Tensor cross_entropy_masked(const Tensor& logits,
                            std::span<const std::size_t> targets,
                            std::span<const std::uint8_t> row_active,
                            std::span<const std::uint8_t> col_allowed = {});

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// Mean over one axis; the axis is removed from the shape.
Tensor mean(const Tensor& x, std::size_t axis);

Tensor reshape(const Tensor& x, Shape shape);
// Rows (leading-axis slices) selected by index; repeats allowed.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);
// Element gather: out.flat[i] = x.flat[index[i]].
Tensor take(const Tensor& x, std::span<const std::size_t> index,
            Shape out_shape);
// Stacks b's rows below a's; trailing dims must agree.
Tensor concat_rows(const Tensor& a, const Tensor& b);

// Multi-head scaled dot-product self-attention. `qkv` is
// [batch*tokens, 3*D] with row layout [q | k | v]; each of `heads` heads
// owns D/heads contiguous columns of q, k and v. Returns [batch*tokens, D].
Tensor attention(const Tensor& qkv, std::size_t batch, std::size_t tokens,
                 std::size_t heads);

}  // namespace lfdg

#endif  // LFDG_OPS_HPP_
