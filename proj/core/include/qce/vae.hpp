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
#include <vector>

#include "qce/frontend.hpp"
#include "qce/mlp.hpp"
#include "qce/random.hpp"
#include "qce/types.hpp"

namespace qce {

struct VaeArchitecture {
  std::size_t antennas = 0;
  std::size_t pilots = 1;
  std::size_t latent = 0;
  std::vector<std::size_t> conv_channels;   // 2P ... 2; empty for P = 1
  std::vector<std::size_t> encoder_widths;  // 2N ... 2L
  std::vector<std::size_t> decoder_widths;  // L ... N
};

// Encoder 2N -> max(2N, 128) -> geometric taper -> 2L over four layers,
// decoder mirrored to N outputs; P/2 1x1 conv layers for P > 1.
VaeArchitecture make_vae_architecture(std::size_t antennas, std::size_t pilots, std::size_t latent);

struct VaeModel {
  VaeArchitecture arch;
  std::vector<RMatrix> conv_weights;  // c_in x c_out
  std::vector<RMatrix> conv_biases;   // 1 x c_out
  MlpParams encoder;
  MlpParams decoder;

  // Fixed order: conv (w, b)..., encoder (w, b)..., decoder (w, b)...
  std::vector<RMatrix*> parameters();
  std::vector<const RMatrix*> parameters() const;
  std::size_t parameter_count() const;
};

VaeModel make_vae(const VaeArchitecture& arch, Rng& rng);

enum class ObservationKind { Channel, Quantized };

// What the decoder covariance is compared against. Quantized targets use
// c_r = rho^2 (c + sigma2) + (1 - rho^2) mean(c + sigma2) with rho the
// Bussgang gain at the mean level, capped at one.
struct ElboTarget {
  ObservationKind kind = ObservationKind::Channel;
  double sigma2 = 0.0;
  QuantizerSpec quantizer;
};

struct ElboResult {
  double loss = 0.0;                 // mean negative ELBO over the batch
  std::vector<RMatrix> gradients;    // aligned with VaeModel::parameters()
};

// encoder_input is NP x B, target N x B, eps B x L (reparameterization noise).
ElboResult elbo_batch(const VaeModel& model, const CMatrix& encoder_input, const CMatrix& target,
                      const RMatrix& eps, const ElboTarget& target_model, bool with_gradients = true);

// Single-sample losses with one latent draw from rng.
ElboResult elbo_loss(const VaeModel& model, const CVector& h, Rng& rng);
ElboResult elbo_loss_quantized(const VaeModel& model, const CVector& r, double sigma2,
                               const QuantizerSpec& q, Rng& rng);

struct GradCheckReport {
  std::vector<double> max_relative_error;  // one per parameter block

  double worst() const;
};

// Central differences against reverse mode. Relative error per entry is
// |a - n| / max(|a|, |n|, floor).
GradCheckReport gradient_check(const VaeModel& model, const CMatrix& encoder_input, const CMatrix& target,
                               const RMatrix& eps, const ElboTarget& target_model, double step = 1e-5,
                               double floor = 1e-6);

// Channel mode: encoder sees r = Q(A h + n) at a random SNR per sample and
// epoch; the loss uses h. bits = 0 trains for unquantized observations.
VaeModel train_vae(const CMatrix& channels, const PilotConfig& pilots, int bits,
                   const VaeArchitecture& arch, const TrainOptions& options, Rng& rng,
                   TrainReport* report = nullptr, const ProgressSink& progress = {});

// Quantized mode: single-snapshot observations only.
VaeModel train_vae_quantized(const CMatrix& observations, double sigma2, const QuantizerSpec& q,
                             const VaeArchitecture& arch, const TrainOptions& options, Rng& rng,
                             TrainReport* report = nullptr, const ProgressSink& progress = {});

// Latent mean per column of the encoder input (B x L).
RMatrix vae_latent_mean(const VaeModel& model, const CMatrix& encoder_input);
// Decoder spectra c (B x N), strictly positive.
RMatrix vae_decode(const VaeModel& model, const RMatrix& z);

CMatrix estimate_bvae(const VaeModel& model, const CMatrix& r, const PilotConfig& pilots, double sigma2,
                      const QuantizerSpec& q);

// DNN baseline: 2NP -> 2N^2 -> 2N^2 -> 2N, ReLU hidden layers, MSE loss.
MlpParams make_dnn(std::size_t antennas, std::size_t pilots, Rng& rng);
MlpParams train_dnn(const CMatrix& channels, const PilotConfig& pilots, int bits,
                    const TrainOptions& options, Rng& rng, TrainReport* report = nullptr,
                    const ProgressSink& progress = {});
CMatrix estimate_dnn(const MlpParams& dnn, const CMatrix& r);

}  // namespace qce
