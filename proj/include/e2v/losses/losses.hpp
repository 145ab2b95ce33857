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

#include <span>

#include "e2v/nn/graph.hpp"
#include "e2v/sim/image.hpp"

namespace e2v::losses {

enum class ReconstructionKind { L1, MSE };

struct LossConfig {
  double lambda_tc = 5.0;
  double alpha = 50.0;
  int l0 = 2;
  ReconstructionKind kind = ReconstructionKind::L1;

  void validate() const;
};

/// out(u) = image sampled bilinearly at u + flow(u), sample position clamped
/// to the image.
Image backward_warp(const Image& image, const FlowField& flow);

/// exp(-alpha * (I_k - W(I_{k-1}))^2) per pixel.
Image occlusion_mask(const Image& gt_k, const Image& gt_km1, const FlowField& flow, double alpha);

/// mean over pixels of M * |I_k - W(I_{k-1})|.
double temporal_loss(const Image& current, const Image& previous, const FlowField& flow, const Image& mask);
double reconstruction_loss(const Image& prediction, const Image& target, ReconstructionKind kind);

/// sum_{k=0}^{L} rec[k] + lambda_tc * sum_{k=L0}^{L} tc[k]; tc[k] for k < L0 is ignored.
double total_loss(std::span<const double> reconstruction, std::span<const double> temporal, const LossConfig& config);

// Graph versions. Images are [N, 1, H, W]; flows and masks are shared across
// the batch or given per item (size N*H*W).

/// Differentiable in `image`; the flow is a constant input.
template <typename T>
nn::Var backward_warp(nn::Graph<T>& g, nn::Var image, std::span<const FlowField> flows);

template <typename T>
nn::Var temporal_loss(nn::Graph<T>& g, nn::Var current, nn::Var previous, std::span<const FlowField> flows,
                      const nn::Tensor<T>& mask);

template <typename T>
nn::Var reconstruction_loss(nn::Graph<T>& g, nn::Var prediction, nn::Var target, ReconstructionKind kind);

}  // namespace e2v::losses
