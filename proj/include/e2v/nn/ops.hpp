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

#pragma once

#include "e2v/nn/graph.hpp"

// Differentiable layer primitives. Each records its output on the graph and,
// when gradients are enabled, an exact backward closure. Instantiated for
// float (training / inference) and double (gradient checks).
namespace e2v::nn {

enum class Mode { Train, Eval };

/// Cross-correlation with zero padding. `weight` is [Cout, Cin, k, k];
/// `bias` may be an invalid Var. Output size (in + 2*pad - k) / stride + 1.
template <typename T>
Var conv2d(Graph<T>& g, Var x, Var weight, Var bias, int stride, int pad);

template <typename T>
struct BatchNormParams {
  Var gamma;
  Var beta;
  Tensor<T>* running_mean = nullptr;
  Tensor<T>* running_var = nullptr;
};

inline constexpr double kBatchNormMomentum = 0.1;
inline constexpr double kBatchNormEps = 1e-5;

/// Per-channel batch normalization. Train mode normalizes with batch
/// statistics and updates the running estimates (momentum 0.1, unbiased
/// variance); eval mode uses the running estimates.
template <typename T>
Var batch_norm(Graph<T>& g, Var x, const BatchNormParams<T>& bn, Mode mode);

template <typename T>
Var relu(Graph<T>& g, Var x);
template <typename T>
Var sigmoid(Graph<T>& g, Var x);
template <typename T>
Var tanh(Graph<T>& g, Var x);

template <typename T>
Var add(Graph<T>& g, Var a, Var b);
template <typename T>
Var mul(Graph<T>& g, Var a, Var b);
template <typename T>
Var scale(Graph<T>& g, Var x, double factor);

template <typename T>
Var concat_channels(Graph<T>& g, Var a, Var b);
template <typename T>
Var slice_channels(Graph<T>& g, Var x, int begin, int count);
/// Keeps the top-left h x w region.
template <typename T>
Var crop(Graph<T>& g, Var x, int h, int w);

/// x2 bilinear upsampling, half-pixel centers (source = (o + 0.5) / 2 - 0.5,
/// clamped at the border).
template <typename T>
Var upsample_bilinear2x(Graph<T>& g, Var x);

/// Scalar sum of x * weights (weights constant, same shape as x).
template <typename T>
Var weighted_sum(Graph<T>& g, Var x, const Tensor<T>& weights);
/// Scalar mean of |a - b|, optionally weighted per element by `mask`
/// (broadcast over the batch when mask has n = 1). Weighted variant still
/// divides by the element count.
template <typename T>
Var mean_abs_diff(Graph<T>& g, Var a, Var b, const Tensor<T>* mask = nullptr);
template <typename T>
Var mean_sq_diff(Graph<T>& g, Var a, Var b);

// Reference dense products used by conv2d; dispatch to the SIMD kernel table
// for float.
template <typename T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc, bool accumulate);
template <typename T>
void gemm_nt(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc, bool accumulate);

}  // namespace e2v::nn
