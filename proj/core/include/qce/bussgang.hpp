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

#include <vector>

#include "qce/channels.hpp"
#include "qce/frontend.hpp"
#include "qce/types.hpp"

namespace qce {

// How C_r is formed for multi-bit quantizers. One-bit always uses the
// arcsine law; the infinite-resolution quantizer always returns C_y.
enum class CovarianceMode {
  Approximate,    // rho^2 C_y + (1 - rho^2) diag(C_y)
  ExactDiagonal,  // exact diagonal, off-diagonal nondiag(B C_y B^H)
};

// Per-entry gain for a real-or-complex entry of variance `variance`
// (complex variance, i.e. E|y|^2).
double bussgang_gain(double variance, const QuantizerSpec& q);

// Diagonal of the Bussgang gain matrix. Throws std::invalid_argument on a
// nonpositive diagonal entry.
RVector bussgang_gain(const CMatrix& c_y, const QuantizerSpec& q);

// E|Q(y)|^2 for y ~ CN(0, variance).
double quantized_variance(double variance, const QuantizerSpec& q);

CMatrix quantized_covariance(const CMatrix& c_y, const QuantizerSpec& q,
                             CovarianceMode mode = CovarianceMode::Approximate);

// A C_h A^H + sigma2 I without forming A.
CMatrix receive_covariance(const CMatrix& c_h, const PilotConfig& pilots, double sigma2);

struct BussgangContext {
  CMatrix c_y;
  RVector gain;
  CMatrix c_r;
  double rho = 1.0;  // min(mean gain, 1)

  static BussgangContext make(const CMatrix& c_h, const PilotConfig& pilots, double sigma2,
                              const QuantizerSpec& q,
                              CovarianceMode mode = CovarianceMode::Approximate);
};

struct LmmseFilter {
  CMatrix matrix;  // N x NP

  CVector apply(const CVector& r) const { return matrix * r; }
  CMatrix apply(const CMatrix& r) const { return matrix * r; }
};

// W = C_h A^H B^H C_r^{-1} for the Gaussian condition C_h.
LmmseFilter conditional_lmmse(const CMatrix& c_h, const PilotConfig& pilots, double sigma2,
                              const QuantizerSpec& q,
                              CovarianceMode mode = CovarianceMode::Approximate);

LmmseFilter conditional_lmmse(const BussgangContext& ctx, const CMatrix& c_h,
                              const PilotConfig& pilots);

// Same filter for a circulant C_h = F^H diag(spectrum) F. C_r is block
// circulant, so the inverse reduces to one P x P solve per DFT bin.
class CirculantLmmse {
 public:
  CirculantLmmse(const RVector& spectrum, const PilotConfig& pilots, double sigma2,
                 const QuantizerSpec& q);

  CVector apply(const CVector& r) const;
  CMatrix dense() const;

  std::size_t antennas() const { return n_; }
  std::size_t pilots() const { return p_; }

 private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  CMatrix bins_;  // N x P, frequency response of each pilot block
};

// Baseline estimators; r holds one observation per column.
CMatrix estimate_buss_genie(const CMatrix& r, const std::vector<ClusterParams>& params,
                            std::size_t antennas, const PilotConfig& pilots, double sigma2,
                            const QuantizerSpec& q);
CMatrix estimate_buss_scov(const CMatrix& r, const CMatrix& sample_cov, const PilotConfig& pilots,
                           double sigma2, const QuantizerSpec& q);
// h = A^+ B^+ r with B from the sample covariance.
CMatrix estimate_bls(const CMatrix& r, const CMatrix& sample_cov, const PilotConfig& pilots,
                     double sigma2, const QuantizerSpec& q);

}  // namespace qce
