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

#include "qce/vae.hpp"
#include "training.hpp"

namespace qce {

MlpParams make_dnn(std::size_t antennas, std::size_t pilots, Rng& rng) {
  if (antennas == 0 || pilots == 0) throw std::invalid_argument("make_dnn: N and P must be >= 1");
  const std::size_t hidden = 2 * antennas * antennas;
  return make_mlp({2 * antennas * pilots, hidden, hidden, 2 * antennas}, Activation::Relu, Activation::Linear, rng);
}

MlpParams train_dnn(const CMatrix& channels, const PilotConfig& pilots, int bits, const TrainOptions& options,
                    Rng& rng, TrainReport* report, const ProgressSink& progress) {
  const auto n = static_cast<std::size_t>(channels.rows());
  MlpParams dnn = make_dnn(n, pilots.count(), rng);
  std::vector<RMatrix*> params;
  dnn.collect(params);
  const Rng noise_root = rng.substream(0x0d22);
  auto loss = [&](const std::vector<std::size_t>& idx, std::uint64_t epoch, bool grads, Rng&) {
    const CMatrix input = detail::simulate_observations(channels, idx, pilots, bits, options, noise_root, epoch);
    CMatrix target(channels.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) target.col(static_cast<Eigen::Index>(i)) = channels.col(static_cast<Eigen::Index>(idx[i]));
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (RMatrix* p : params) vars.push_back(tape.variable(*p));
    const ad::Var out = mlp_forward(dnn, vars, 0, tape.constant(stack_real(input)));
    const ad::Var diff = ad::sub(out, tape.constant(stack_real(target)));
    const ad::Var mse = ad::scale(ad::sum(ad::square(diff)), 1.0 / static_cast<double>(idx.size()));
    detail::BatchLoss bl;
    bl.loss = mse.value()(0, 0);
    if (grads) {
      tape.backward(mse);
      for (std::size_t i = 0; i < vars.size(); ++i) bl.gradients.push_back(vars[i].grad());
    }
    return bl;
  };
  detail::run_training(params, static_cast<std::size_t>(channels.cols()), options, rng, loss, report, progress,
                       "train_dnn");
  return dnn;
}

CMatrix estimate_dnn(const MlpParams& dnn, const CMatrix& r) {
  if (static_cast<std::size_t>(r.rows()) * 2 != dnn.input_dim()) {
    throw std::invalid_argument("estimate_dnn: observation length does not match the network");
  }
  return unstack_real(mlp_forward(dnn, stack_real(r)));
}

}  // namespace qce
