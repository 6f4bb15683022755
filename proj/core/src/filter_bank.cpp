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

#include "qce/filter_bank.hpp"

#include <algorithm>
#include <numeric>

#include "qce/parallel.hpp"

namespace qce {
namespace {

// Strict weak order on (weight, covariance entries) used for canonical ordering.
bool component_less(const GmmModel& m, std::size_t a, std::size_t b) {
  const double wa = m.weights(static_cast<Eigen::Index>(a));
  const double wb = m.weights(static_cast<Eigen::Index>(b));
  if (wa != wb) return wa < wb;
  const CMatrix& ca = m.covariances[a];
  const CMatrix& cb = m.covariances[b];
  for (Eigen::Index i = 0; i < ca.size(); ++i) {
    const Complex x = ca.data()[i];
    const Complex y = cb.data()[i];
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return a < b;
}

}  // namespace

MixtureEstimator::MixtureEstimator(const GmmModel& model, const PilotConfig& pilots, double sigma2,
                                   const QuantizerSpec& q, CovarianceMode mode) {
  const std::size_t k = model.components();
  if (k == 0 || model.covariances.size() != k) {
    throw std::invalid_argument("MixtureEstimator: empty or inconsistent model");
  }
  order_.resize(k);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(),
            [&](std::size_t a, std::size_t b) { return component_less(model, a, b); });
  weights_ = model.weights;
  c_r_.resize(k);
  filters_.resize(k);
  parallel_for(k, [&](std::size_t c) {
    const BussgangContext ctx = BussgangContext::make(model.covariances[c], pilots, sigma2, q, mode);
    c_r_[c] = ctx.c_r;
    filters_[c] = conditional_lmmse(ctx, model.covariances[c], pilots);
  });
}

RMatrix MixtureEstimator::responsibilities(const CMatrix& r) const {
  RVector w(static_cast<Eigen::Index>(order_.size()));
  std::vector<CMatrix> covs;
  covs.reserve(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = weights_(static_cast<Eigen::Index>(order_[i]));
    covs.push_back(c_r_[order_[i]]);
  }
  RMatrix canon = component_log_densities(w, covs, r);
  normalize_responsibilities(canon);
  RMatrix out(canon.rows(), canon.cols());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    out.col(static_cast<Eigen::Index>(order_[i])) = canon.col(static_cast<Eigen::Index>(i));
  }
  return out;
}

CMatrix MixtureEstimator::estimate_with(const CMatrix& r, const RMatrix& resp) const {
  if (resp.rows() != r.cols() || resp.cols() != static_cast<Eigen::Index>(order_.size())) {
    throw std::invalid_argument("MixtureEstimator: responsibilities shape mismatch");
  }
  const Eigen::Index n = filters_.front().matrix.rows();
  CMatrix out = CMatrix::Zero(n, r.cols());
  for (std::size_t c : order_) {
    const auto col = static_cast<Eigen::Index>(c);
    out += filters_[c].apply(r) * resp.col(col).cast<Complex>().asDiagonal();
  }
  return out;
}

CMatrix MixtureEstimator::estimate(const CMatrix& r) const { return estimate_with(r, responsibilities(r)); }

FilterBank::FilterBank(GmmModel model, PilotConfig pilots, QuantizerSpec q, CovarianceMode mode)
    : model_(std::move(model)), pilots_(std::move(pilots)), q_(std::move(q)), mode_(mode) {}

const MixtureEstimator& FilterBank::at(double sigma2) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(sigma2);
  if (it == cache_.end()) {
    it = cache_.emplace(sigma2, std::make_unique<MixtureEstimator>(model_, pilots_, sigma2, q_, mode_)).first;
  }
  return *it->second;
}

RMatrix responsibilities_quantized(const GmmModel& model, const CMatrix& r, const PilotConfig& pilots,
                                   double sigma2, const QuantizerSpec& q) {
  return MixtureEstimator(model, pilots, sigma2, q).responsibilities(r);
}

CMatrix estimate_bgmm(const GmmModel& model, const CMatrix& r, const PilotConfig& pilots,
                      double sigma2, const QuantizerSpec& q) {
  return MixtureEstimator(model, pilots, sigma2, q).estimate(r);
}

CMatrix estimate_bmfa(const MfaModel& model, const CMatrix& r, const PilotConfig& pilots,
                      double sigma2, const QuantizerSpec& q) {
  return MixtureEstimator(model.as_gmm(), pilots, sigma2, q).estimate(r);
}

}  // namespace qce
