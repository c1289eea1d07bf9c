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

#include "lfdg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <cblas.h>

#include "lfdg/error.hpp"

namespace lfdg {
namespace {

using detail::Node;

[[noreturn]] void shape_error(const std::string& op, const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, op + ": " + what);
}

// Number of times `b` repeats inside `a` under suffix broadcasting.
std::size_t broadcast_repeats(const char* op, const Shape& a, const Shape& b) {
  if (b.size() > a.size()) {
    shape_error(op, shape_to_string(a) + " vs " + shape_to_string(b));
  }
  const std::size_t offset = a.size() - b.size();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a[offset + i] != b[i]) {
      shape_error(op, shape_to_string(a) + " vs " + shape_to_string(b));
    }
  }
  return shape_numel(a) / shape_numel(b);
}

inline bool wants_grad(const Node& n) { return n.requires_grad; }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    shape_error("matmul", shape_to_string(a.shape()) + " x " +
                              shape_to_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  const auto mi = static_cast<int>(m), ki = static_cast<int>(k),
             ni = static_cast<int>(n);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, mi, ni, ki, 1.0,
              a.values().data(), ki, b.values().data(), ni, 0.0, out.data(), ni);
  return Tensor::make_result(
      {m, n}, std::move(out), {&a, &b},
      [mi, ki, ni](Node& self) {
        Node& na = *self.parents[0];
        Node& nb = *self.parents[1];
        // dA += G B^T, dB += A^T G
        if (wants_grad(na)) {
          cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, mi, ki, ni, 1.0,
                      self.grad.data(), ni, nb.value.data(), ni, 1.0, na.grad.data(), ki);
        }
        if (wants_grad(nb)) {
          cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, ki, ni, mi, 1.0,
                      na.value.data(), ki, self.grad.data(), ni, 1.0, nb.grad.data(), ni);
        }
      },
      "matmul");
}

namespace {

enum class Binary { kAdd, kSub, kMul };

Tensor binary_op(const Tensor& a, const Tensor& b, Binary kind,
                 const char* name) {
  const std::size_t repeats = broadcast_repeats(name, a.shape(), b.shape());
  const std::size_t inner = b.numel();
  auto va = a.values();
  auto vb = b.values();
  std::vector<double> out(va.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t idx = r * inner + i;
      switch (kind) {
        case Binary::kAdd: out[idx] = va[idx] + vb[i]; break;
        case Binary::kSub: out[idx] = va[idx] - vb[i]; break;
        case Binary::kMul: out[idx] = va[idx] * vb[i]; break;
      }
    }
  }
  return Tensor::make_result(
      a.shape(), std::move(out), {&a, &b},
      [repeats, inner, kind](Node& self) {
        Node& na = *self.parents[0];
        Node& nb = *self.parents[1];
        const std::vector<double>& g = self.grad;
        for (std::size_t r = 0; r < repeats; ++r) {
          for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t idx = r * inner + i;
            switch (kind) {
              case Binary::kAdd:
                if (wants_grad(na)) na.grad[idx] += g[idx];
                if (wants_grad(nb)) nb.grad[i] += g[idx];
                break;
              case Binary::kSub:
                if (wants_grad(na)) na.grad[idx] += g[idx];
                if (wants_grad(nb)) nb.grad[i] -= g[idx];
                break;
              case Binary::kMul:
                if (wants_grad(na)) na.grad[idx] += g[idx] * nb.value[i];
                if (wants_grad(nb)) nb.grad[i] += g[idx] * na.value[idx];
                break;
            }
          }
        }
      },
      name);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(a, b, Binary::kAdd, "add");
}
Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(a, b, Binary::kSub, "sub");
}
Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(a, b, Binary::kMul, "mul");
}

Tensor scale(const Tensor& a, double factor) {
  auto va = a.values();
  std::vector<double> out(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = va[i] * factor;
  return Tensor::make_result(
      a.shape(), std::move(out), {&a},
      [factor](Node& self) {
        Node& na = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          na.grad[i] += self.grad[i] * factor;
        }
      },
      "scale");
}

Tensor softmax(const Tensor& x) {
  if (x.rank() == 0) shape_error("softmax", "scalar input");
  const std::size_t cols = x.shape().back();
  const std::size_t rows = x.numel() / cols;
  auto vx = x.values();
  std::vector<double> out(vx.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = vx.data() + r * cols;
    double* o = out.data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) z += (o[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) o[c] /= z;
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {&x},
      [rows, cols](Node& self) {
        Node& nx = *self.parents[0];
        for (std::size_t r = 0; r < rows; ++r) {
          const double* y = self.value.data() + r * cols;
          const double* g = self.grad.data() + r * cols;
          double dot = 0.0;
          for (std::size_t c = 0; c < cols; ++c) dot += g[c] * y[c];
          for (std::size_t c = 0; c < cols; ++c) {
            nx.grad[r * cols + c] += y[c] * (g[c] - dot);
          }
        }
      },
      "softmax");
}

Tensor layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps) {
  if (x.rank() == 0) shape_error("layernorm", "scalar input");
  const std::size_t d = x.shape().back();
  if (gamma.shape() != Shape{d} || beta.shape() != Shape{d}) {
    shape_error("layernorm", "affine params must have shape [" +
                                 std::to_string(d) + "]");
  }
  const std::size_t rows = x.numel() / d;
  auto vx = x.values();
  auto vg = gamma.values();
  auto vb = beta.values();
  std::vector<double> out(vx.size());
  std::vector<double> xhat(vx.size());
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = vx.data() + r * d;
    double mu = 0.0;
    for (std::size_t c = 0; c < d; ++c) mu += in[c];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (in[c] - mu) * (in[c] - mu);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = is;
    for (std::size_t c = 0; c < d; ++c) {
      const double h = (in[c] - mu) * is;
      xhat[r * d + c] = h;
      out[r * d + c] = h * vg[c] + vb[c];
    }
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {&x, &gamma, &beta},
      [rows, d, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Node& self) {
        Node& nx = *self.parents[0];
        Node& ng = *self.parents[1];
        Node& nb = *self.parents[2];
        const double inv_d = 1.0 / static_cast<double>(d);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* g = self.grad.data() + r * d;
          const double* h = xhat.data() + r * d;
          if (wants_grad(ng) || wants_grad(nb)) {
            for (std::size_t c = 0; c < d; ++c) {
              if (wants_grad(ng)) ng.grad[c] += g[c] * h[c];
              if (wants_grad(nb)) nb.grad[c] += g[c];
            }
          }
          if (wants_grad(nx)) {
            double mean_dh = 0.0, mean_dh_h = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
              const double dh = g[c] * ng.value[c];
              mean_dh += dh;
              mean_dh_h += dh * h[c];
            }
            mean_dh *= inv_d;
            mean_dh_h *= inv_d;
            for (std::size_t c = 0; c < d; ++c) {
              const double dh = g[c] * ng.value[c];
              nx.grad[r * d + c] += inv_std[r] * (dh - mean_dh - h[c] * mean_dh_h);
            }
          }
        }
      },
      "layernorm");
}

Tensor gelu(const Tensor& x) {
  auto vx = x.values();
  std::vector<double> out(vx.size());
  for (std::size_t i = 0; i < vx.size(); ++i) {
    out[i] = 0.5 * vx[i] * (1.0 + std::erf(vx[i] * std::numbers::sqrt2 / 2.0));
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {&x},
      [](Node& self) {
        Node& nx = *self.parents[0];
        const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const double v = nx.value[i];
          const double cdf = 0.5 * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0));
          const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
          nx.grad[i] += self.grad[i] * (cdf + v * pdf);
        }
      },
      "gelu");
}

Tensor mse(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    shape_error("mse", shape_to_string(a.shape()) + " vs " +
                           shape_to_string(b.shape()));
  }
  auto va = a.values();
  auto vb = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    acc += d * d;
  }
  const double n = static_cast<double>(va.size());
  return Tensor::make_result(
      {}, {acc / n}, {&a, &b},
      [n](Node& self) {
        Node& na = *self.parents[0];
        Node& nb = *self.parents[1];
        const double g = self.grad[0] * 2.0 / n;
        for (std::size_t i = 0; i < na.value.size(); ++i) {
          const double d = g * (na.value[i] - nb.value[i]);
          if (wants_grad(na)) na.grad[i] += d;
          if (wants_grad(nb)) nb.grad[i] -= d;
        }
      },
      "mse");
}

Tensor cross_entropy_masked(const Tensor& logits,
                            std::span<const std::size_t> targets,
                            std::span<const std::uint8_t> row_active,
                            std::span<const std::uint8_t> col_allowed) {
  if (logits.rank() != 2) {
    shape_error("cross_entropy_masked",
                "logits must be rank 2, got " + shape_to_string(logits.shape()));
  }
  const std::size_t rows = logits.dim(0), cols = logits.dim(1);
  if (targets.size() != rows || row_active.size() != rows ||
      (!col_allowed.empty() && col_allowed.size() != rows * cols)) {
    shape_error("cross_entropy_masked", "mask/target sizes do not match logits");
  }
  std::vector<std::uint8_t> allowed(col_allowed.begin(), col_allowed.end());
  if (allowed.empty()) allowed.assign(rows * cols, 1);

  auto v = logits.values();
  std::vector<double> probs(rows * cols, 0.0);
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  std::vector<std::uint8_t> active(row_active.begin(), row_active.end());
  std::size_t count = 0;
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!active[r]) continue;
    const std::size_t t = tgt[r];
    if (t >= cols || !allowed[r * cols + t]) {
      shape_error("cross_entropy_masked",
                  "target of row " + std::to_string(r) + " is not an allowed column");
    }
    const double* in = v.data() + r * cols;
    const std::uint8_t* ok = allowed.data() + r * cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cols; ++c) {
      if (ok[c]) mx = std::max(mx, in[c]);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (ok[c]) z += (probs[r * cols + c] = std::exp(in[c] - mx));
    }
    for (std::size_t c = 0; c < cols; ++c) probs[r * cols + c] /= z;
    total += (std::log(z) + mx) - in[t];
    ++count;
  }
  const double loss = count == 0 ? 0.0 : total / static_cast<double>(count);
  return Tensor::make_result(
      {}, {loss}, {&logits},
      [rows, cols, count, probs = std::move(probs), tgt = std::move(tgt),
       active = std::move(active)](Node& self) {
        if (count == 0) return;
        Node& nl = *self.parents[0];
        const double g = self.grad[0] / static_cast<double>(count);
        for (std::size_t r = 0; r < rows; ++r) {
          if (!active[r]) continue;
          for (std::size_t c = 0; c < cols; ++c) {
            nl.grad[r * cols + c] += g * probs[r * cols + c];
          }
          nl.grad[r * cols + tgt[r]] -= g;
        }
      },
      "cross_entropy_masked");
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return Tensor::make_result(
      {}, {acc}, {&x},
      [](Node& self) {
        Node& nx = *self.parents[0];
        for (double& g : nx.grad) g += self.grad[0];
      },
      "sum");
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.numel());
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return Tensor::make_result(
      {}, {acc / n}, {&x},
      [n](Node& self) {
        Node& nx = *self.parents[0];
        const double g = self.grad[0] / n;
        for (double& d : nx.grad) d += g;
      },
      "mean");
}

Tensor mean(const Tensor& x, std::size_t axis) {
  const Shape& s = x.shape();
  if (axis >= s.size()) shape_error("mean", "axis out of range");
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];
  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) out_shape.push_back(s[i]);
  }
  auto vx = x.values();
  std::vector<double> out(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t l = 0; l < len; ++l) {
      const double* src = vx.data() + (o * len + l) * inner;
      double* dst = out.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(len);
  for (double& v : out) v *= inv;
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {&x},
      [outer, inner, len, inv](Node& self) {
        Node& nx = *self.parents[0];
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t l = 0; l < len; ++l) {
            double* dst = nx.grad.data() + (o * len + l) * inner;
            const double* g = self.grad.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += g[i] * inv;
          }
        }
      },
      "mean_axis");
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    shape_error("reshape", shape_to_string(x.shape()) + " -> " +
                               shape_to_string(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return Tensor::make_result(
      std::move(shape), std::move(out), {&x},
      [](Node& self) {
        Node& nx = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          nx.grad[i] += self.grad[i];
        }
      },
      "reshape");
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  if (x.rank() == 0) shape_error("gather_rows", "scalar input");
  if (rows.empty()) shape_error("gather_rows", "empty index list");
  const std::size_t n_rows = x.dim(0);
  const std::size_t width = x.numel() / n_rows;
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  for (std::size_t r : idx) {
    if (r >= n_rows) {
      shape_error("gather_rows", "row " + std::to_string(r) + " out of range");
    }
  }
  Shape out_shape = x.shape();
  out_shape[0] = idx.size();
  auto vx = x.values();
  std::vector<double> out(idx.size() * width);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(vx.data() + idx[i] * width, width, out.data() + i * width);
  }
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {&x},
      [width, idx = std::move(idx)](Node& self) {
        Node& nx = *self.parents[0];
        for (std::size_t i = 0; i < idx.size(); ++i) {
          const double* g = self.grad.data() + i * width;
          double* dst = nx.grad.data() + idx[i] * width;
          for (std::size_t c = 0; c < width; ++c) dst[c] += g[c];
        }
      },
      "gather_rows");
}

Tensor take(const Tensor& x, std::span<const std::size_t> index,
            Shape out_shape) {
  if (shape_numel(out_shape) != index.size()) {
    shape_error("take", "index count does not match output shape");
  }
  auto vx = x.values();
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= vx.size()) shape_error("take", "index out of range");
    out[i] = vx[idx[i]];
  }
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {&x},
      [idx = std::move(idx)](Node& self) {
        Node& nx = *self.parents[0];
        for (std::size_t i = 0; i < idx.size(); ++i) {
          nx.grad[idx[i]] += self.grad[i];
        }
      },
      "take");
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.rank() == 0 || a.rank() != b.rank()) {
    shape_error("concat_rows", shape_to_string(a.shape()) + " vs " +
                                   shape_to_string(b.shape()));
  }
  for (std::size_t i = 1; i < a.rank(); ++i) {
    if (a.dim(i) != b.dim(i)) {
      shape_error("concat_rows", shape_to_string(a.shape()) + " vs " +
                                     shape_to_string(b.shape()));
    }
  }
  Shape out_shape = a.shape();
  out_shape[0] += b.dim(0);
  std::vector<double> out;
  out.reserve(a.numel() + b.numel());
  out.insert(out.end(), a.values().begin(), a.values().end());
  out.insert(out.end(), b.values().begin(), b.values().end());
  const std::size_t split = a.numel();
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {&a, &b},
      [split](Node& self) {
        Node& na = *self.parents[0];
        Node& nb = *self.parents[1];
        if (wants_grad(na)) {
          for (std::size_t i = 0; i < split; ++i) na.grad[i] += self.grad[i];
        }
        if (wants_grad(nb)) {
          for (std::size_t i = split; i < self.grad.size(); ++i) {
            nb.grad[i - split] += self.grad[i];
          }
        }
      },
      "concat_rows");
}

Tensor attention(const Tensor& qkv, std::size_t batch, std::size_t tokens,
                 std::size_t heads) {
  if (qkv.rank() != 2 || qkv.dim(0) != batch * tokens || qkv.dim(1) % 3 != 0 ||
      heads == 0 || (qkv.dim(1) / 3) % heads != 0) {
    shape_error("attention", "qkv " + shape_to_string(qkv.shape()) +
                                 " incompatible with batch=" +
                                 std::to_string(batch) + " tokens=" +
                                 std::to_string(tokens) + " heads=" +
                                 std::to_string(heads));
  }
  const std::size_t d = qkv.dim(1) / 3;
  const std::size_t dh = d / heads;
  const std::size_t stride = 3 * d;
  const double sc = 1.0 / std::sqrt(static_cast<double>(dh));
  auto in = qkv.values();
  std::vector<double> out(batch * tokens * d, 0.0);
  // Attention probabilities per (batch, head), kept for backward.
  std::vector<double> probs(batch * heads * tokens * tokens);

  for (std::size_t b = 0; b < batch; ++b) {
    const double* base = in.data() + b * tokens * stride;
    for (std::size_t h = 0; h < heads; ++h) {
      double* p = probs.data() + (b * heads + h) * tokens * tokens;
      for (std::size_t t = 0; t < tokens; ++t) {
        const double* q = base + t * stride + h * dh;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < tokens; ++s) {
          const double* k = base + s * stride + d + h * dh;
          double dot = 0.0;
          for (std::size_t i = 0; i < dh; ++i) dot += q[i] * k[i];
          p[t * tokens + s] = dot * sc;
          mx = std::max(mx, dot * sc);
        }
        double z = 0.0;
        for (std::size_t s = 0; s < tokens; ++s) {
          z += (p[t * tokens + s] = std::exp(p[t * tokens + s] - mx));
        }
        double* o = out.data() + (b * tokens + t) * d + h * dh;
        for (std::size_t s = 0; s < tokens; ++s) {
          const double w = (p[t * tokens + s] /= z);
          const double* v = base + s * stride + 2 * d + h * dh;
          for (std::size_t i = 0; i < dh; ++i) o[i] += w * v[i];
        }
      }
    }
  }

  return Tensor::make_result(
      {batch * tokens, d}, std::move(out), {&qkv},
      [batch, tokens, heads, d, dh, stride, sc,
       probs = std::move(probs)](Node& self) {
        Node& nq = *self.parents[0];
        std::vector<double> dp(tokens * tokens);
        for (std::size_t b = 0; b < batch; ++b) {
          const double* base = nq.value.data() + b * tokens * stride;
          double* gbase = nq.grad.data() + b * tokens * stride;
          for (std::size_t h = 0; h < heads; ++h) {
            const double* p = probs.data() + (b * heads + h) * tokens * tokens;
            // dV and dP.
            for (std::size_t t = 0; t < tokens; ++t) {
              const double* go = self.grad.data() + (b * tokens + t) * d + h * dh;
              for (std::size_t s = 0; s < tokens; ++s) {
                const double* v = base + s * stride + 2 * d + h * dh;
                double* gv = gbase + s * stride + 2 * d + h * dh;
                const double w = p[t * tokens + s];
                double acc = 0.0;
                for (std::size_t i = 0; i < dh; ++i) {
                  gv[i] += w * go[i];
                  acc += go[i] * v[i];
                }
                dp[t * tokens + s] = acc;
              }
            }
            // dS = P o (dP - rowsum(P o dP)), then dQ and dK.
            for (std::size_t t = 0; t < tokens; ++t) {
              double dot = 0.0;
              for (std::size_t s = 0; s < tokens; ++s) {
                dot += p[t * tokens + s] * dp[t * tokens + s];
              }
              const double* q = base + t * stride + h * dh;
              double* gq = gbase + t * stride + h * dh;
              for (std::size_t s = 0; s < tokens; ++s) {
                const double ds = p[t * tokens + s] * (dp[t * tokens + s] - dot) * sc;
                const double* k = base + s * stride + d + h * dh;
                double* gk = gbase + s * stride + d + h * dh;
                for (std::size_t i = 0; i < dh; ++i) {
                  gq[i] += ds * k[i];
                  gk[i] += ds * q[i];
                }
              }
            }
          }
        }
      },
      "attention");
}

}  // namespace lfdg
