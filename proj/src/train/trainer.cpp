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

#include "e2v/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "e2v/common.hpp"
#include "e2v/losses/losses.hpp"
#include "e2v/metrics/metrics.hpp"

namespace e2v::train {

namespace {

nn::Tensor<float> stack_tensors(std::span<const TrainSample* const> batch, std::size_t k) {
  const auto& first = batch[0]->tensors[k];
  nn::Tensor<float> out({static_cast<int>(batch.size()), first.bins, first.height, first.width});
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const auto& t = batch[n]->tensors[k];
    if (t.bins != first.bins || t.height != first.height || t.width != first.width)
      throw UsageError("batch samples differ in tensor shape");
    std::copy(t.values.begin(), t.values.end(), out.channel(static_cast<int>(n), 0));
  }
  return out;
}

nn::Tensor<float> stack_images(std::span<const Image* const> images) {
  const Image& first = *images[0];
  nn::Tensor<float> out({static_cast<int>(images.size()), 1, first.height, first.width});
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (!images[n]->same_shape(first)) throw UsageError("batch samples differ in frame shape");
    std::copy(images[n]->data.begin(), images[n]->data.end(), out.channel(static_cast<int>(n), 0));
  }
  return out;
}

nn::Tensor<float> to_input(const events::EventTensor& t) {
  nn::Tensor<float> out({1, t.bins, t.height, t.width});
  std::copy(t.values.begin(), t.values.end(), out.data.begin());
  return out;
}

Image to_image(const nn::Tensor<float>& t) {
  Image out(t.shape.w, t.shape.h);
  std::copy(t.data.begin(), t.data.begin() + static_cast<std::ptrdiff_t>(out.size()), out.data.begin());
  return out;
}

}  // namespace

std::string curves_csv(std::span<const EpochLog> logs) {
  std::string out = "epoch,steps,train_loss,train_rec,train_tc,val_rec,val_temporal,val_ssim\n";
  char buf[256];
  for (const auto& l : logs) {
    std::snprintf(buf, sizeof buf, "%d,%ld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", l.epoch, l.steps, l.train_loss,
                  l.train_rec, l.train_tc, l.val_rec, l.val_temporal, l.val_ssim);
    out += buf;
  }
  return out;
}

ValidationSnapshot score_predictions(std::span<const std::vector<Image>> predictions,
                                     std::span<const WindowedSequence> sequences, const losses::LossConfig& loss) {
  if (predictions.size() != sequences.size()) throw UsageError("validation: prediction count mismatch");
  ValidationSnapshot s;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& pred = predictions[i];
    const auto& seq = sequences[i];
    if (pred.size() != seq.targets.size()) throw UsageError("validation: prediction count mismatch");
    if (pred.empty()) continue;
    double rec = 0.0, ssim = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      rec += losses::reconstruction_loss(pred[k], seq.targets[k], loss.kind);
      ssim += metrics::ssim(pred[k], seq.targets[k]);
    }
    s.reconstruction += rec / static_cast<double>(pred.size());
    s.ssim += ssim / static_cast<double>(pred.size());
    s.temporal_error += metrics::temporal_error(pred, seq.flows, seq.targets, loss.alpha);
    ++s.sequences;
  }
  if (s.sequences > 0) {
    s.reconstruction /= s.sequences;
    s.ssim /= s.sequences;
    s.temporal_error /= s.sequences;
  }
  return s;
}

std::vector<Image> predict_sequence(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                                    const WindowedSequence& sequence) {
  std::vector<Image> out;
  nn::RecurrentState<float> state;
  for (const auto& t : sequence.tensors) {
    auto [image, next] = nn::e2vid_forward(to_input(t), state, weights, config, nn::Mode::Eval);
    out.push_back(to_image(image));
    state = std::move(next);
  }
  return out;
}

ValidationSnapshot validate(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                            std::span<const WindowedSequence> sequences, const losses::LossConfig& loss) {
  std::vector<std::vector<Image>> preds;
  preds.reserve(sequences.size());
  for (const auto& seq : sequences) preds.push_back(predict_sequence(weights, config, seq));
  return score_predictions(preds, sequences, loss);
}

StepLosses compute_gradients(nn::ModelWeights<float>& weights, const nn::NetworkConfig& config,
                             std::span<const TrainSample* const> batch, const losses::LossConfig& loss,
                             std::map<std::string, nn::Tensor<float>>* grads) {
  if (batch.empty()) throw UsageError("empty training batch");
  const std::size_t L = batch[0]->tensors.size();
  for (const TrainSample* s : batch)
    if (s->tensors.size() != L || s->frames.size() != L || s->flows.size() + 1 != L)
      throw UsageError("training samples must share the unroll length");

  nn::Graph<float> g(grads != nullptr);
  const nn::BoundModel<float> model = nn::bind_model(g, weights, config, grads != nullptr);
  nn::StateVars<float> state;
  nn::Var total, prev_image;
  StepLosses out;
  int tc_steps = 0;
  std::vector<const Image*> frames(batch.size()), prev_frames(batch.size());
  std::vector<FlowField> flows(batch.size());
  for (std::size_t k = 0; k < L; ++k) {
    const nn::Var input = g.constant(stack_tensors(batch, k));
    nn::StepOutput<float> step = nn::forward_step(g, model, input, state, nn::Mode::Train);
    state = std::move(step.state);
    for (std::size_t n = 0; n < batch.size(); ++n) frames[n] = &batch[n]->frames[k];
    const nn::Var target = g.constant(stack_images(frames));
    const nn::Var rec = losses::reconstruction_loss(g, step.image, target, loss.kind);
    out.reconstruction += g.value(rec).data[0];
    total = total.valid() ? nn::add(g, total, rec) : rec;

    if (k >= 1 && k >= static_cast<std::size_t>(loss.l0)) {
      nn::Tensor<float> mask({static_cast<int>(batch.size()), 1, frames[0]->height, frames[0]->width});
      for (std::size_t n = 0; n < batch.size(); ++n) {
        flows[n] = batch[n]->flows[k - 1];
        const Image m = losses::occlusion_mask(*frames[n], *prev_frames[n], flows[n], loss.alpha);
        std::copy(m.data.begin(), m.data.end(), mask.channel(static_cast<int>(n), 0));
      }
      const nn::Var tc = losses::temporal_loss(g, step.image, prev_image, std::span<const FlowField>(flows), mask);
      out.temporal += g.value(tc).data[0];
      ++tc_steps;
      if (loss.lambda_tc > 0.0) total = nn::add(g, total, nn::scale(g, tc, loss.lambda_tc));
    }
    prev_image = step.image;
    prev_frames = frames;
  }
  out.total = g.value(total).data[0];
  out.reconstruction /= static_cast<double>(L);
  if (tc_steps > 0) out.temporal /= tc_steps;
  if (!std::isfinite(out.total)) throw NumericError("non-finite training loss");
  if (grads) {
    g.backward(total);
    grads->clear();
    for (const auto& [key, var] : model.vars) grads->emplace(key, g.grad(var));
  }
  return out;
}

std::vector<EpochLog> train(nn::ModelWeights<float>& weights, const nn::NetworkConfig& network,
                            const TrainConfig& config, std::span<const TrainSample> samples,
                            std::span<const WindowedSequence> validation, TrainState& state,
                            const TrainCallbacks& callbacks) {
  config.validate();
  network.validate();
  if (samples.empty()) throw UsageError("training set is empty");
  const int W = samples[0].frames.at(0).width, H = samples[0].frames.at(0).height;
  const int crop = std::min({config.crop, W, H});
  const nn::AdamOptions adam{config.lr};

  std::vector<EpochLog> logs;
  std::vector<std::size_t> order(samples.size());
  std::map<std::string, nn::Tensor<float>> grads;
  for (int e = 0; e < config.epochs; ++e) {
    if (callbacks.max_steps > 0 && state.optimizer.step >= callbacks.max_steps) break;
    const int epoch = state.epochs_done + 1;
    std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    EpochLog log;
    log.epoch = epoch;
    int batches = 0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(config.batch_size)) {
      if (callbacks.max_steps > 0 && state.optimizer.step >= callbacks.max_steps) break;
      std::vector<TrainSample> prepared;
      for (std::size_t i = b; i < std::min(order.size(), b + static_cast<std::size_t>(config.batch_size)); ++i) {
        const TrainSample& s = samples[order[i]];
        if (config.augment) {
          prepared.push_back(augment(s, rng, crop, config));
        } else if (crop < W || crop < H) {
          Augmentation a = identity_augmentation(W, H);
          a.crop_x = (W - crop) / 2;
          a.crop_y = (H - crop) / 2;
          a.out_width = a.out_height = crop;
          prepared.push_back(apply_augmentation(s, a));
        } else {
          prepared.push_back(s);
        }
      }
      std::vector<const TrainSample*> batch;
      for (const auto& s : prepared) batch.push_back(&s);
      const StepLosses l = compute_gradients(weights, network, batch, config.loss, &grads);
      nn::adam_step(weights.params, grads, state.optimizer, adam);
      log.train_loss += l.total;
      log.train_rec += l.reconstruction;
      log.train_tc += l.temporal;
      ++batches;
    }
    if (batches > 0) {
      log.train_loss /= batches;
      log.train_rec /= batches;
      log.train_tc /= batches;
    }
    log.steps = state.optimizer.step;
    if (!validation.empty()) {
      const ValidationSnapshot v = validate(weights, network, validation, config.loss);
      log.val_rec = v.reconstruction;
      log.val_temporal = v.temporal_error;
      log.val_ssim = v.ssim;
    }
    state.epochs_done = epoch;
    logs.push_back(log);
    if (callbacks.on_epoch) callbacks.on_epoch(log, weights, state);
  }
  return logs;
}

}  // namespace e2v::train
