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

#include "training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qce/log.hpp"

namespace qce::detail {

void run_training(const std::vector<RMatrix*>& params, std::size_t count, const TrainOptions& options,
                  Rng& rng, const BatchLossFn& loss, TrainReport* report, const ProgressSink& progress,
                  const char* who) {
  if (count < 2) throw std::invalid_argument(std::string(who) + ": need at least two training samples");
  if (options.batch_size == 0) throw std::invalid_argument(std::string(who) + ": batch_size must be >= 1");
  if (!(options.validation_fraction > 0.0 && options.validation_fraction < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": validation_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(options.validation_fraction * static_cast<double>(count))), 1, count - 1);
  const std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<long>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<long>(n_val), order.end());

  const Rng val_root = rng.substream(0x5eed);
  auto validation_loss = [&]() {
    double acc = 0.0;
    for (std::size_t b = 0; b < val.size(); b += options.batch_size) {
      const std::vector<std::size_t> idx(val.begin() + static_cast<long>(b),
                                         val.begin() + static_cast<long>(std::min(val.size(), b + options.batch_size)));
      Rng eps_rng = val_root.substream(b);
      acc += loss(idx, kValidationEpoch, false, eps_rng).loss * static_cast<double>(idx.size());
    }
    return acc / static_cast<double>(val.size());
  };

  TrainReport local;
  local.initial_val_loss = validation_loss();
  if (!std::isfinite(local.initial_val_loss)) {
    throw NumericalError(std::string(who) + ": non-finite initial loss");
  }
  local.best_val_loss = local.initial_val_loss;
  std::vector<RMatrix> best;
  for (const RMatrix* p : params) best.push_back(*p);

  Adam adam(params, options);
  DivergenceGuard guard(local.initial_val_loss);
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng.engine());
    double acc = 0.0;
    for (std::size_t b = 0; b < train.size(); b += options.batch_size) {
      const std::vector<std::size_t> idx(train.begin() + static_cast<long>(b),
                                         train.begin() + static_cast<long>(std::min(train.size(), b + options.batch_size)));
      BatchLoss bl = loss(idx, epoch, true, rng);
      if (!std::isfinite(bl.loss)) throw NumericalError(std::string(who) + ": non-finite training loss");
      acc += bl.loss * static_cast<double>(idx.size());
      adam.step(bl.gradients);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = acc / static_cast<double>(train.size());
    rec.val_loss = validation_loss();
    local.epochs.push_back(rec);
    if (progress) progress(rec);
    guard.update(rec.train_loss, who);
    if (rec.val_loss < local.best_val_loss) {
      local.best_val_loss = rec.val_loss;
      local.best_epoch = epoch;
      for (std::size_t i = 0; i < params.size(); ++i) best[i] = *params[i];
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best[i];
  if (report != nullptr) *report = std::move(local);
}

CMatrix simulate_observations(const CMatrix& channels, const std::vector<std::size_t>& index,
                              const PilotConfig& pilots, int bits, const TrainOptions& options,
                              const Rng& root, std::uint64_t epoch) {
  const auto t_count = static_cast<std::uint64_t>(channels.cols());
  CMatrix out(channels.rows() * static_cast<Eigen::Index>(pilots.count()), static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    Rng s = root.substream(epoch * t_count + index[i]);
    const double sigma2 = snr_db_to_sigma2(s.uniform(options.snr_min_db, options.snr_max_db));
    const QuantizerSpec q = bits == 0 ? QuantizerSpec::infinite() : make_quantizer(bits, sigma2);
    out.col(static_cast<Eigen::Index>(i)) =
        observe(channels.col(static_cast<Eigen::Index>(index[i])), pilots, sigma2, q, s);
  }
  return out;
}

}  // namespace qce::detail
