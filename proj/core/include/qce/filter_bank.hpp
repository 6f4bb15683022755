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

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "qce/bussgang.hpp"
#include "qce/mixtures.hpp"

namespace qce {

// Componentwise Bussgang estimator of a zero-mean mixture at one noise level:
// h = sum_k p(k | r) W_k r. Components are processed in a canonical order, so
// relabeling the mixture gives bit-identical estimates.
class MixtureEstimator {
 public:
  MixtureEstimator(const GmmModel& model, const PilotConfig& pilots, double sigma2,
                   const QuantizerSpec& q, CovarianceMode mode = CovarianceMode::Approximate);

  std::size_t components() const { return order_.size(); }

  // T x K responsibilities (original component order), one row per column of r.
  RMatrix responsibilities(const CMatrix& r) const;
  CMatrix estimate(const CMatrix& r) const;
  // Convex combination with given responsibilities (original order).
  CMatrix estimate_with(const CMatrix& r, const RMatrix& responsibilities) const;

  const LmmseFilter& filter(std::size_t k) const { return filters_[k]; }
  const CMatrix& quantized_covariance(std::size_t k) const { return c_r_[k]; }

 private:
  std::vector<std::size_t> order_;  // canonical position -> component
  RVector weights_;
  std::vector<CMatrix> c_r_;
  std::vector<LmmseFilter> filters_;
};

// Lazily built estimators, one per noise level.
class FilterBank {
 public:
  FilterBank(GmmModel model, PilotConfig pilots, QuantizerSpec q,
             CovarianceMode mode = CovarianceMode::Approximate);

  const MixtureEstimator& at(double sigma2);

 private:
  GmmModel model_;
  PilotConfig pilots_;
  QuantizerSpec q_;
  CovarianceMode mode_;
  std::mutex mutex_;
  std::map<double, std::unique_ptr<MixtureEstimator>> cache_;
};

RMatrix responsibilities_quantized(const GmmModel& model, const CMatrix& r, const PilotConfig& pilots,
                                   double sigma2, const QuantizerSpec& q);

CMatrix estimate_bgmm(const GmmModel& model, const CMatrix& r, const PilotConfig& pilots,
                      double sigma2, const QuantizerSpec& q);
CMatrix estimate_bmfa(const MfaModel& model, const CMatrix& r, const PilotConfig& pilots,
                      double sigma2, const QuantizerSpec& q);

}  // namespace qce
