// Copyright 2026 The e2v Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "e2v/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "e2v/simd/kernels.hpp"

namespace e2v::nn {

std::string Shape::str() const {
  return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + "]";
}

template <typename T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc, bool accumulate) {
  if constexpr (std::is_same_v<T, float>) {
    simd::active().gemm_nn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  } else {
    for (int i = 0; i < m; ++i) {
      T* crow = c + static_cast<std::ptrdiff_t>(i) * ldc;
      if (!accumulate) std::fill(crow, crow + n, T(0));
      for (int p = 0; p < k; ++p) {
        const T av = a[static_cast<std::ptrdiff_t>(i) * lda + p];
        const T* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }
}

template <typename T>
void gemm_nt(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc, bool accumulate) {
  if constexpr (std::is_same_v<T, float>) {
    simd::active().gemm_nt(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        T s = 0;
        const T* arow = a + static_cast<std::ptrdiff_t>(i) * lda;
        const T* brow = b + static_cast<std::ptrdiff_t>(j) * ldb;
        for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
        T& out = c[static_cast<std::ptrdiff_t>(i) * ldc + j];
        out = accumulate ? out + s : s;
      }
  }
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

struct ConvGeometry {
  int cin, h, w, k, stride, pad, ho, wo;
  int rows() const { return cin * k * k; }
  int cols() const { return ho * wo; }
};

// Output columns [lo, hi) whose input column ox * stride - pad + kx is inside [0, w).
inline void valid_span(const ConvGeometry& geo, int kx, int& lo, int& hi) {
  const int first = geo.pad - kx;  // smallest ox * stride allowed
  lo = first <= 0 ? 0 : (first + geo.stride - 1) / geo.stride;
  const int last = geo.w - 1 + geo.pad - kx;
  hi = last < 0 ? 0 : std::min(geo.wo, last / geo.stride + 1);
  lo = std::min(lo, hi);
}

template <typename T>
void im2col(const T* x, const ConvGeometry& geo, T* col) {
  const int cols = geo.cols();
  for (int ci = 0; ci < geo.cin; ++ci)
    for (int ky = 0; ky < geo.k; ++ky)
      for (int kx = 0; kx < geo.k; ++kx) {
        T* row = col + static_cast<std::ptrdiff_t>((ci * geo.k + ky) * geo.k + kx) * cols;
        const T* plane = x + static_cast<std::ptrdiff_t>(ci) * geo.h * geo.w;
        int lo, hi;
        valid_span(geo, kx, lo, hi);
        for (int oy = 0; oy < geo.ho; ++oy) {
          const int iy = oy * geo.stride - geo.pad + ky;
          T* dst = row + static_cast<std::ptrdiff_t>(oy) * geo.wo;
          if (iy < 0 || iy >= geo.h) {
            std::fill(dst, dst + geo.wo, T(0));
            continue;
          }
          const T* src = plane + static_cast<std::ptrdiff_t>(iy) * geo.w - geo.pad + kx;
          std::fill(dst, dst + lo, T(0));
          if (geo.stride == 1) {
            std::copy(src + lo, src + hi, dst + lo);
          } else {
            for (int ox = lo; ox < hi; ++ox) dst[ox] = src[ox * geo.stride];
          }
          std::fill(dst + hi, dst + geo.wo, T(0));
        }
      }
}

template <typename T>
void col2im_add(const T* col, const ConvGeometry& geo, T* dx) {
  const int cols = geo.cols();
  for (int ci = 0; ci < geo.cin; ++ci)
    for (int ky = 0; ky < geo.k; ++ky)
      for (int kx = 0; kx < geo.k; ++kx) {
        const T* row = col + static_cast<std::ptrdiff_t>((ci * geo.k + ky) * geo.k + kx) * cols;
        T* plane = dx + static_cast<std::ptrdiff_t>(ci) * geo.h * geo.w;
        int lo, hi;
        valid_span(geo, kx, lo, hi);
        for (int oy = 0; oy < geo.ho; ++oy) {
          const int iy = oy * geo.stride - geo.pad + ky;
          if (iy < 0 || iy >= geo.h) continue;
          const T* src = row + static_cast<std::ptrdiff_t>(oy) * geo.wo;
          T* dst = plane + static_cast<std::ptrdiff_t>(iy) * geo.w - geo.pad + kx;
          if (geo.stride == 1) {
            for (int ox = lo; ox < hi; ++ox) dst[ox] += src[ox];
          } else {
            for (int ox = lo; ox < hi; ++ox) dst[ox * geo.stride] += src[ox];
          }
        }
      }
}

/// Per-thread scratch for im2col buffers; contents are unspecified.
template <typename T>
T* scratch(std::size_t n, int slot) {
  thread_local std::vector<T> buffers[2];
  auto& b = buffers[slot];
  if (b.size() < n) b.resize(n);
  return b.data();
}

template <typename T, typename F, typename D>
Var unary(Graph<T>& g, Var x, F forward, D derivative_from_output) {
  const Tensor<T>& xv = g.value(x);
  Tensor<T> out(xv.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = forward(xv.data[i]);
  return g.record(std::move(out), {x}, [x, derivative_from_output](Graph<T>& gr, Var self) {
    if (!gr.requires_grad(x)) return;
    const Tensor<T>& y = gr.value(self);
    const Tensor<T>& gy = gr.grad_buffer(self);
    Tensor<T>& gx = gr.grad_buffer(x);
    for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] += gy.data[i] * derivative_from_output(y.data[i]);
  });
}

}  // namespace

template <typename T>
Var conv2d(Graph<T>& g, Var x, Var weight, Var bias, int stride, int pad) {
  const Shape xs = g.shape(x);
  const Shape ws = g.shape(weight);
  require(ws.h == ws.w, "conv2d: kernel must be square");
  require(ws.c == xs.c, "conv2d: channel mismatch, input " + xs.str() + " weight " + ws.str());
  require(stride >= 1 && pad >= 0, "conv2d: invalid stride/padding");
  if (bias.valid()) require(g.shape(bias).numel() == static_cast<std::size_t>(ws.n), "conv2d: bias size");
  ConvGeometry geo{xs.c, xs.h, xs.w, ws.h, stride, pad, 0, 0};
  geo.ho = (xs.h + 2 * pad - ws.h) / stride + 1;
  geo.wo = (xs.w + 2 * pad - ws.w) / stride + 1;
  require(geo.ho > 0 && geo.wo > 0, "conv2d: input smaller than kernel");

  const int cout = ws.n;
  const int kdim = geo.rows();
  const int p = geo.cols();
  Tensor<T> out(Shape{xs.n, cout, geo.ho, geo.wo});
  T* col = scratch<T>(static_cast<std::size_t>(kdim) * p, 0);
  {
    const Tensor<T>& xv = g.value(x);
    const Tensor<T>& wv = g.value(weight);
    for (int n = 0; n < xs.n; ++n) {
      im2col(xv.channel(n, 0), geo, col);
      T* o = out.channel(n, 0);
      gemm_nn<T>(cout, p, kdim, wv.data.data(), kdim, col, p, o, p, false);
      if (bias.valid()) {
        const Tensor<T>& bv = g.value(bias);
        for (int c = 0; c < cout; ++c) {
          T* plane = o + static_cast<std::ptrdiff_t>(c) * p;
          for (int i = 0; i < p; ++i) plane[i] += bv.data[c];
        }
      }
    }
  }
  return g.record(std::move(out), {x, weight, bias}, [x, weight, bias, geo](Graph<T>& gr, Var self) {
    const Shape xs2 = gr.shape(x);
    const Shape ws2 = gr.shape(weight);
    const int cout2 = ws2.n;
    const int kdim2 = geo.rows();
    const int p2 = geo.cols();
    const Tensor<T>& gy = gr.grad_buffer(self);
    const bool need_x = gr.requires_grad(x);
    const bool need_w = gr.requires_grad(weight);
    const bool need_b = bias.valid() && gr.requires_grad(bias);
    T* col2 = scratch<T>(static_cast<std::size_t>(kdim2) * p2, 1);
    std::vector<T> wt;
    if (need_x) {
      // W^T, [kdim, cout]
      const Tensor<T>& wv = gr.value(weight);
      wt.resize(wv.numel());
      for (int o = 0; o < cout2; ++o)
        for (int r = 0; r < kdim2; ++r) wt[static_cast<std::size_t>(r) * cout2 + o] = wv.data[static_cast<std::size_t>(o) * kdim2 + r];
    }
    for (int n = 0; n < xs2.n; ++n) {
      const T* gyn = gy.channel(n, 0);
      if (need_w) {
        im2col(gr.value(x).channel(n, 0), geo, col2);
        Tensor<T>& gw = gr.grad_buffer(weight);
        gemm_nt<T>(cout2, kdim2, p2, gyn, p2, col2, p2, gw.data.data(), kdim2, true);
      }
      if (need_b) {
        Tensor<T>& gb = gr.grad_buffer(bias);
        for (int c = 0; c < cout2; ++c) {
          T s = 0;
          const T* plane = gyn + static_cast<std::ptrdiff_t>(c) * p2;
          for (int i = 0; i < p2; ++i) s += plane[i];
          gb.data[c] += s;
        }
      }
      if (need_x) {
        gemm_nn<T>(kdim2, p2, cout2, wt.data(), cout2, gyn, p2, col2, p2, false);
        col2im_add(col2, geo, gr.grad_buffer(x).channel(n, 0));
      }
    }
  });
}

template <typename T>
Var batch_norm(Graph<T>& g, Var x, const BatchNormParams<T>& bn, Mode mode) {
  const Shape xs = g.shape(x);
  require(g.shape(bn.gamma).numel() == static_cast<std::size_t>(xs.c) &&
              g.shape(bn.beta).numel() == static_cast<std::size_t>(xs.c),
          "batch_norm: channel mismatch for input " + xs.str());
  const bool train = mode == Mode::Train;
  if (!train) require(bn.running_mean && bn.running_var, "batch_norm: eval mode needs running statistics");
  const std::size_t plane = xs.plane();
  const std::size_t count = plane * static_cast<std::size_t>(xs.n);
  const T eps = static_cast<T>(kBatchNormEps);

  std::vector<T> mean(xs.c), inv_std(xs.c);
  Tensor<T> out(xs);
  {
    const Tensor<T>& xv = g.value(x);
    const Tensor<T>& gamma = g.value(bn.gamma);
    const Tensor<T>& beta = g.value(bn.beta);
    for (int c = 0; c < xs.c; ++c) {
      double mu, var;
      if (train) {
        double s = 0.0;
        for (int n = 0; n < xs.n; ++n) {
          const T* p = xv.channel(n, c);
          for (std::size_t i = 0; i < plane; ++i) s += p[i];
        }
        mu = s / static_cast<double>(count);
        double sq = 0.0;
        for (int n = 0; n < xs.n; ++n) {
          const T* p = xv.channel(n, c);
          for (std::size_t i = 0; i < plane; ++i) sq += (p[i] - mu) * (p[i] - mu);
        }
        var = sq / static_cast<double>(count);
        if (bn.running_mean && bn.running_var) {
          const double m = kBatchNormMomentum;
          const double unbiased = count > 1 ? var * static_cast<double>(count) / static_cast<double>(count - 1) : var;
          bn.running_mean->data[c] = static_cast<T>((1.0 - m) * bn.running_mean->data[c] + m * mu);
          bn.running_var->data[c] = static_cast<T>((1.0 - m) * bn.running_var->data[c] + m * unbiased);
        }
      } else {
        mu = bn.running_mean->data[c];
        var = bn.running_var->data[c];
      }
      mean[c] = static_cast<T>(mu);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + eps));
      for (int n = 0; n < xs.n; ++n) {
        const T* p = xv.channel(n, c);
        T* o = out.channel(n, c);
        for (std::size_t i = 0; i < plane; ++i) o[i] = gamma.data[c] * (p[i] - mean[c]) * inv_std[c] + beta.data[c];
      }
    }
  }
  const Var gamma_v = bn.gamma, beta_v = bn.beta;
  return g.record(std::move(out), {x, gamma_v, beta_v},
                  [x, gamma_v, beta_v, mean, inv_std, train, plane, count](Graph<T>& gr, Var self) {
    const Shape s = gr.shape(x);
    const Tensor<T>& xv = gr.value(x);
    const Tensor<T>& gamma = gr.value(gamma_v);
    const Tensor<T>& gy = gr.grad_buffer(self);
    for (int c = 0; c < s.c; ++c) {
      double sum_gy = 0.0, sum_gy_xhat = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const T* p = xv.channel(n, c);
        const T* d = gy.channel(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          sum_gy += d[i];
          sum_gy_xhat += d[i] * (p[i] - mean[c]) * inv_std[c];
        }
      }
      if (gr.requires_grad(gamma_v)) gr.grad_buffer(gamma_v).data[c] += static_cast<T>(sum_gy_xhat);
      if (gr.requires_grad(beta_v)) gr.grad_buffer(beta_v).data[c] += static_cast<T>(sum_gy);
      if (!gr.requires_grad(x)) continue;
      Tensor<T>& gx = gr.grad_buffer(x);
      const double k = gamma.data[c] * inv_std[c];
      const double inv_count = 1.0 / static_cast<double>(count);
      for (int n = 0; n < s.n; ++n) {
        const T* p = xv.channel(n, c);
        const T* d = gy.channel(n, c);
        T* o = gx.channel(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          if (train) {
            const double xhat = (p[i] - mean[c]) * inv_std[c];
            o[i] += static_cast<T>(k * (d[i] - sum_gy * inv_count - xhat * sum_gy_xhat * inv_count));
          } else {
            o[i] += static_cast<T>(k * d[i]);
          }
        }
      }
    }
  });
}

template <typename T>
Var relu(Graph<T>& g, Var x) {
  return unary<T>(g, x, [](T v) { return v > T(0) ? v : T(0); }, [](T y) { return y > T(0) ? T(1) : T(0); });
}

template <typename T>
Var sigmoid(Graph<T>& g, Var x) {
  return unary<T>(
      g, x,
      [](T v) {
        if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
        const T e = std::exp(v);
        return e / (T(1) + e);
      },
      [](T y) { return y * (T(1) - y); });
}

template <typename T>
Var tanh(Graph<T>& g, Var x) {
  return unary<T>(g, x, [](T v) { return std::tanh(v); }, [](T y) { return T(1) - y * y; });
}

template <typename T>
Var add(Graph<T>& g, Var a, Var b) {
  require(g.shape(a) == g.shape(b), "add: shape mismatch " + g.shape(a).str() + " vs " + g.shape(b).str());
  Tensor<T> out = g.value(a);
  const Tensor<T>& bv = g.value(b);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += bv.data[i];
  return g.record(std::move(out), {a, b}, [a, b](Graph<T>& gr, Var self) {
    const Tensor<T>& gy = gr.grad_buffer(self);
    for (Var in : {a, b}) {
      if (!gr.requires_grad(in)) continue;
      Tensor<T>& gx = gr.grad_buffer(in);
      for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] += gy.data[i];
    }
  });
}

template <typename T>
Var mul(Graph<T>& g, Var a, Var b) {
  require(g.shape(a) == g.shape(b), "mul: shape mismatch " + g.shape(a).str() + " vs " + g.shape(b).str());
  Tensor<T> out = g.value(a);
  const Tensor<T>& bv = g.value(b);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= bv.data[i];
  return g.record(std::move(out), {a, b}, [a, b](Graph<T>& gr, Var self) {
    const Tensor<T>& gy = gr.grad_buffer(self);
    if (gr.requires_grad(a)) {
      const Tensor<T>& bv2 = gr.value(b);
      Tensor<T>& ga = gr.grad_buffer(a);
      for (std::size_t i = 0; i < ga.numel(); ++i) ga.data[i] += gy.data[i] * bv2.data[i];
    }
    if (gr.requires_grad(b)) {
      const Tensor<T>& av2 = gr.value(a);
      Tensor<T>& gb = gr.grad_buffer(b);
      for (std::size_t i = 0; i < gb.numel(); ++i) gb.data[i] += gy.data[i] * av2.data[i];
    }
  });
}

template <typename T>
Var scale(Graph<T>& g, Var x, double factor) {
  Tensor<T> out = g.value(x);
  const T f = static_cast<T>(factor);
  for (T& v : out.data) v *= f;
  return g.record(std::move(out), {x}, [x, f](Graph<T>& gr, Var self) {
    if (!gr.requires_grad(x)) return;
    const Tensor<T>& gy = gr.grad_buffer(self);
    Tensor<T>& gx = gr.grad_buffer(x);
    for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] += f * gy.data[i];
  });
}

template <typename T>
Var concat_channels(Graph<T>& g, Var a, Var b) {
  const Shape as = g.shape(a), bs = g.shape(b);
  require(as.n == bs.n && as.h == bs.h && as.w == bs.w, "concat: shape mismatch " + as.str() + " vs " + bs.str());
  Tensor<T> out(Shape{as.n, as.c + bs.c, as.h, as.w});
  const std::size_t pa = as.plane() * as.c, pb = bs.plane() * bs.c;
  {
    const Tensor<T>& av = g.value(a);
    const Tensor<T>& bv = g.value(b);
    for (int n = 0; n < as.n; ++n) {
      std::copy_n(av.channel(n, 0), pa, out.channel(n, 0));
      std::copy_n(bv.channel(n, 0), pb, out.channel(n, as.c));
    }
  }
  return g.record(std::move(out), {a, b}, [a, b, pa, pb](Graph<T>& gr, Var self) {
    const Tensor<T>& gy = gr.grad_buffer(self);
    const Shape s = gr.shape(a);
    for (int n = 0; n < s.n; ++n) {
      if (gr.requires_grad(a)) {
        T* d = gr.grad_buffer(a).channel(n, 0);
        const T* src = gy.channel(n, 0);
        for (std::size_t i = 0; i < pa; ++i) d[i] += src[i];
      }
      if (gr.requires_grad(b)) {
        T* d = gr.grad_buffer(b).channel(n, 0);
        const T* src = gy.channel(n, s.c);
        for (std::size_t i = 0; i < pb; ++i) d[i] += src[i];
      }
    }
  });
}

template <typename T>
Var slice_channels(Graph<T>& g, Var x, int begin, int count) {
  const Shape xs = g.shape(x);
  require(begin >= 0 && count > 0 && begin + count <= xs.c, "slice_channels: range outside " + xs.str());
  Tensor<T> out(Shape{xs.n, count, xs.h, xs.w});
  const std::size_t len = xs.plane() * count;
  {
    const Tensor<T>& xv = g.value(x);
    for (int n = 0; n < xs.n; ++n) std::copy_n(xv.channel(n, begin), len, out.channel(n, 0));
  }
  return g.record(std::move(out), {x}, [x, begin, len](Graph<T>& gr, Var self) {
    if (!gr.requires_grad(x)) return;
    const Tensor<T>& gy = gr.grad_buffer(self);
    Tensor<T>& gx = gr.grad_buffer(x);
    for (int n = 0; n < gx.shape.n; ++n) {
      T* d = gx.channel(n, begin);
      const T* src = gy.channel(n, 0);
      for (std::size_t i = 0; i < len; ++i) d[i] += src[i];
    }
  });
}

template <typename T>
Var crop(Graph<T>& g, Var x, int h, int w) {
  const Shape xs = g.shape(x);
  require(h >= 1 && w >= 1 && h <= xs.h && w <= xs.w, "crop: target larger than " + xs.str());
  if (h == xs.h && w == xs.w) return x;
  Tensor<T> out(Shape{xs.n, xs.c, h, w});
  {
    const Tensor<T>& xv = g.value(x);
    for (int n = 0; n < xs.n; ++n)
      for (int c = 0; c < xs.c; ++c)
        for (int y = 0; y < h; ++y) std::copy_n(&xv.data[xv.index(n, c, y, 0)], w, &out.data[out.index(n, c, y, 0)]);
  }
  return g.record(std::move(out), {x}, [x, h, w](Graph<T>& gr, Var self) {
    if (!gr.requires_grad(x)) return;
    const Tensor<T>& gy = gr.grad_buffer(self);
    Tensor<T>& gx = gr.grad_buffer(x);
    for (int n = 0; n < gx.shape.n; ++n)
      for (int c = 0; c < gx.shape.c; ++c)
        for (int y = 0; y < h; ++y)
          for (int xx = 0; xx < w; ++xx) gx.at(n, c, y, xx) += gy.at(n, c, y, xx);
  });
}

namespace {

struct Lerp1d {
  std::vector<int> i0, i1;
  std::vector<double> w1;
};

Lerp1d upsample_taps(int in) {
  Lerp1d t;
  const int out = 2 * in;
  t.i0.resize(out);
  t.i1.resize(out);
  t.w1.resize(out);
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) / 2.0 - 0.5;
    if (src < 0.0) src = 0.0;
    int lo = static_cast<int>(src);
    if (lo > in - 1) lo = in - 1;
    t.i0[o] = lo;
    t.i1[o] = std::min(lo + 1, in - 1);
    t.w1[o] = src - lo;
  }
  return t;
}

}  // namespace

template <typename T>
Var upsample_bilinear2x(Graph<T>& g, Var x) {
  const Shape xs = g.shape(x);
  const Lerp1d ty = upsample_taps(xs.h), tx = upsample_taps(xs.w);
  const int ho = 2 * xs.h, wo = 2 * xs.w;
  Tensor<T> out(Shape{xs.n, xs.c, ho, wo});
  {
    const Tensor<T>& xv = g.value(x);
    for (int n = 0; n < xs.n; ++n)
      for (int c = 0; c < xs.c; ++c) {
        const T* src = xv.channel(n, c);
        T* dst = out.channel(n, c);
        for (int oy = 0; oy < ho; ++oy) {
          const T wy1 = static_cast<T>(ty.w1[oy]), wy0 = T(1) - wy1;
          const T* r0 = src + static_cast<std::ptrdiff_t>(ty.i0[oy]) * xs.w;
          const T* r1 = src + static_cast<std::ptrdiff_t>(ty.i1[oy]) * xs.w;
          for (int ox = 0; ox < wo; ++ox) {
            const T wx1 = static_cast<T>(tx.w1[ox]), wx0 = T(1) - wx1;
            dst[oy * wo + ox] = wy0 * (wx0 * r0[tx.i0[ox]] + wx1 * r0[tx.i1[ox]]) +
                                wy1 * (wx0 * r1[tx.i0[ox]] + wx1 * r1[tx.i1[ox]]);
          }
        }
      }
  }
  return g.record(std::move(out), {x}, [x, ty, tx, ho, wo](Graph<T>& gr, Var self) {
    if (!gr.requires_grad(x)) return;
    const Tensor<T>& gy = gr.grad_buffer(self);
    Tensor<T>& gx = gr.grad_buffer(x);
    const int w = gx.shape.w;
    for (int n = 0; n < gx.shape.n; ++n)
      for (int c = 0; c < gx.shape.c; ++c) {
        const T* src = gy.channel(n, c);
        T* dst = gx.channel(n, c);
        for (int oy = 0; oy < ho; ++oy) {
          const T wy1 = static_cast<T>(ty.w1[oy]), wy0 = T(1) - wy1;
          T* r0 = dst + static_cast<std::ptrdiff_t>(ty.i0[oy]) * w;
          T* r1 = dst + static_cast<std::ptrdiff_t>(ty.i1[oy]) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const T d = src[oy * wo + ox];
            const T wx1 = static_cast<T>(tx.w1[ox]), wx0 = T(1) - wx1;
            r0[tx.i0[ox]] += wy0 * wx0 * d;
            r0[tx.i1[ox]] += wy0 * wx1 * d;
            r1[tx.i0[ox]] += wy1 * wx0 * d;
            r1[tx.i1[ox]] += wy1 * wx1 * d;
          }
        }
      }
  });
}

template <typename T>
Var weighted_sum(Graph<T>& g, Var x, const Tensor<T>& weights) {
  require(g.shape(x) == weights.shape, "weighted_sum: shape mismatch");
  double s = 0.0;
  const Tensor<T>& xv = g.value(x);
  for (std::size_t i = 0; i < xv.numel(); ++i) s += static_cast<double>(xv.data[i]) * weights.data[i];
  return g.record(Tensor<T>(Shape{1, 1, 1, 1}, static_cast<T>(s)), {x}, [x, weights](Graph<T>& gr, Var self) {
    if (!gr.requires_grad(x)) return;
    const T gy = gr.grad_buffer(self).data[0];
    Tensor<T>& gx = gr.grad_buffer(x);
    for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] += gy * weights.data[i];
  });
}

template <typename T>
Var mean_abs_diff(Graph<T>& g, Var a, Var b, const Tensor<T>* mask) {
  const Shape s = g.shape(a);
  require(s == g.shape(b), "mean_abs_diff: shape mismatch " + s.str() + " vs " + g.shape(b).str());
  const std::size_t per_item = s.numel() / static_cast<std::size_t>(s.n);
  if (mask)
    require(mask->shape == s || (mask->shape.n == 1 && mask->numel() == per_item), "mean_abs_diff: mask shape");
  Tensor<T> weights;
  if (mask) {
    weights = Tensor<T>(s);
    for (std::size_t i = 0; i < s.numel(); ++i) weights.data[i] = mask->data[mask->shape == s ? i : i % per_item];
  }
  const Tensor<T>& av = g.value(a);
  const Tensor<T>& bv = g.value(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.numel(); ++i) {
    const double d = std::abs(static_cast<double>(av.data[i]) - bv.data[i]);
    sum += mask ? d * weights.data[i] : d;
  }
  const double inv = 1.0 / static_cast<double>(s.numel());
  return g.record(Tensor<T>(Shape{1, 1, 1, 1}, static_cast<T>(sum * inv)), {a, b},
                  [a, b, weights, inv](Graph<T>& gr, Var self) {
    const T gy = gr.grad_buffer(self).data[0];
    const Tensor<T>& av2 = gr.value(a);
    const Tensor<T>& bv2 = gr.value(b);
    const bool weighted = !weights.data.empty();
    for (int side = 0; side < 2; ++side) {
      const Var in = side == 0 ? a : b;
      if (!gr.requires_grad(in)) continue;
      Tensor<T>& gx = gr.grad_buffer(in);
      const T sign = side == 0 ? T(1) : T(-1);
      for (std::size_t i = 0; i < gx.numel(); ++i) {
        const T d = av2.data[i] - bv2.data[i];
        const T sg = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
        const T w = weighted ? weights.data[i] : T(1);
        gx.data[i] += sign * gy * sg * w * static_cast<T>(inv);
      }
    }
  });
}

template <typename T>
Var mean_sq_diff(Graph<T>& g, Var a, Var b) {
  const Shape s = g.shape(a);
  require(s == g.shape(b), "mean_sq_diff: shape mismatch");
  const Tensor<T>& av = g.value(a);
  const Tensor<T>& bv = g.value(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.numel(); ++i) {
    const double d = static_cast<double>(av.data[i]) - bv.data[i];
    sum += d * d;
  }
  const double inv = 1.0 / static_cast<double>(s.numel());
  return g.record(Tensor<T>(Shape{1, 1, 1, 1}, static_cast<T>(sum * inv)), {a, b}, [a, b, inv](Graph<T>& gr, Var self) {
    const T gy = gr.grad_buffer(self).data[0];
    const Tensor<T>& av2 = gr.value(a);
    const Tensor<T>& bv2 = gr.value(b);
    for (int side = 0; side < 2; ++side) {
      const Var in = side == 0 ? a : b;
      if (!gr.requires_grad(in)) continue;
      Tensor<T>& gx = gr.grad_buffer(in);
      const T sign = side == 0 ? T(1) : T(-1);
      for (std::size_t i = 0; i < gx.numel(); ++i)
        gx.data[i] += sign * gy * T(2) * (av2.data[i] - bv2.data[i]) * static_cast<T>(inv);
    }
  });
}

#define E2V_INSTANTIATE_OPS(T)                                                                          \
  template void gemm_nn<T>(int, int, int, const T*, int, const T*, int, T*, int, bool);                 \
  template void gemm_nt<T>(int, int, int, const T*, int, const T*, int, T*, int, bool);                 \
  template Var conv2d<T>(Graph<T>&, Var, Var, Var, int, int);                                           \
  template Var batch_norm<T>(Graph<T>&, Var, const BatchNormParams<T>&, Mode);                          \
  template Var relu<T>(Graph<T>&, Var);                                                                 \
  template Var sigmoid<T>(Graph<T>&, Var);                                                              \
  template Var tanh<T>(Graph<T>&, Var);                                                                 \
  template Var add<T>(Graph<T>&, Var, Var);                                                             \
  template Var mul<T>(Graph<T>&, Var, Var);                                                             \
  template Var scale<T>(Graph<T>&, Var, double);                                                        \
  template Var concat_channels<T>(Graph<T>&, Var, Var);                                                 \
  template Var slice_channels<T>(Graph<T>&, Var, int, int);                                             \
  template Var crop<T>(Graph<T>&, Var, int, int);                                                       \
  template Var upsample_bilinear2x<T>(Graph<T>&, Var);                                                  \
  template Var weighted_sum<T>(Graph<T>&, Var, const Tensor<T>&);                                       \
  template Var mean_abs_diff<T>(Graph<T>&, Var, Var, const Tensor<T>*);                                 \
  template Var mean_sq_diff<T>(Graph<T>&, Var, Var);

E2V_INSTANTIATE_OPS(float)
E2V_INSTANTIATE_OPS(double)

}  // namespace e2v::nn
