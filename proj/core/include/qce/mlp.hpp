// SPDX-License-Identifier: Apache-2.0
//
// qce - channel estimation for coarsely quantized MIMO receivers
// Copyright (C) 2026 The qce authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qce/autodiff.hpp"
#include "qce/random.hpp"
#include "qce/types.hpp"

namespace qce {

enum class Activation { Linear, Relu };

struct DenseLayer {
  RMatrix weight;  // in x out
  RMatrix bias;    // 1 x out
  Activation activation = Activation::Linear;
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.rows()); }
  std::size_t output_dim() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.cols()); }
  std::size_t parameter_count() const;
  void collect(std::vector<RMatrix*>& out);
};

// widths = {in, hidden..., out}. He-uniform weights, zero biases; hidden
// layers use `hidden`, the last layer `output`.
MlpParams make_mlp(const std::vector<std::size_t>& widths, Activation hidden, Activation output, Rng& rng);

// Rows of x are samples.
RMatrix mlp_forward(const MlpParams& mlp, const RMatrix& x);

// Tape version; `params` holds weight and bias variables per layer in order.
ad::Var mlp_forward(const MlpParams& mlp, const std::vector<ad::Var>& params, std::size_t offset,
                    const ad::Var& x);

struct TrainOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 256;
  std::size_t epochs = 200;
  double validation_fraction = 0.1;
  double snr_min_db = -10.0;  // channel-mode training draws one SNR per sample
  double snr_max_db = 20.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainReport {
  double initial_val_loss = 0.0;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0 means the initial parameters were kept
  double best_val_loss = 0.0;
};

using ProgressSink = std::function<void(const EpochRecord&)>;

class Adam {
 public:
  Adam(std::vector<RMatrix*> params, const TrainOptions& options);
  void step(const std::vector<RMatrix>& grads);

 private:
  std::vector<RMatrix*> params_;
  std::vector<RMatrix> m_;
  std::vector<RMatrix> v_;
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
};

// Stacks complex columns into real rows [Re x^T, Im x^T].
RMatrix stack_real(const CMatrix& x);
CMatrix unstack_real(const RMatrix& x);

// Aborts training when the epoch loss exceeds 10 |initial| three epochs in a row.
class DivergenceGuard {
 public:
  explicit DivergenceGuard(double initial) : limit_(10.0 * std::abs(initial)) {}
  void update(double loss, const char* who);

 private:
  double limit_;
  int streak_ = 0;
};

}  // namespace qce
