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

#include <cstdint>
#include <functional>
#include <vector>

#include "qce/frontend.hpp"
#include "qce/mlp.hpp"

namespace qce::detail {

struct BatchLoss {
  double loss = 0.0;
  std::vector<RMatrix> gradients;
};

// Loss over the samples `index`. `epoch` selects the observation noise
// realization; validation passes kValidationEpoch and with_gradients = false.
using BatchLossFn = std::function<BatchLoss(const std::vector<std::size_t>& index, std::uint64_t epoch,
                                            bool with_gradients, Rng& rng)>;

inline constexpr std::uint64_t kValidationEpoch = 0xffffffffull;

// Minibatch Adam over `params` with a validation split; params end at the
// best-validation iterate.
void run_training(const std::vector<RMatrix*>& params, std::size_t count, const TrainOptions& options,
                  Rng& rng, const BatchLossFn& loss, TrainReport* report, const ProgressSink& progress,
                  const char* who);

// Encoder inputs r = Q(A h + n) for the listed channels; SNR uniform in the
// configured range, drawn from a per-(epoch, sample) substream of `root`.
CMatrix simulate_observations(const CMatrix& channels, const std::vector<std::size_t>& index,
                              const PilotConfig& pilots, int bits, const TrainOptions& options,
                              const Rng& root, std::uint64_t epoch);

}  // namespace qce::detail
