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
#include "qce/mixtures.hpp"
#include "qce/types.hpp"

namespace qce {

// Q_1 applied to already quantized samples: (sign Re + j sign Im) / sqrt(2).
CMatrix one_bit_reduce(const CMatrix& r);

// Inverse-arcsine correlation estimate from the one-bit reduced samples.
// `weights` may be empty (uniform). Unit diagonal; may be indefinite.
CMatrix recover_correlation(const CMatrix& r, const RVector& weights = RVector());

struct GaussNewtonOptions {
  std::size_t max_iter = 50;
  double tolerance = 1e-5;  // absolute change of the real variance xi^2
  std::size_t max_halvings = 10;
  double min_xi = 1e-8;
};

// Result of fitting erf(tau_i / (sqrt(2) xi)) = p_i in the least-squares sense.
struct VarianceSolve {
  double xi = 0.0;        // real-part standard deviation
  double variance = 0.0;  // complex variance 2 xi^2
  std::size_t iterations = 0;
  bool converged = false;
  bool identifiable = true;  // false if every p_i was 0 or 1
};

// thresholds and probabilities are paired; effective_count is the sample
// count used to clamp degenerate probabilities (1/(2T), 1 - 1/(2T)).
VarianceSolve solve_half_normal(const std::vector<double>& thresholds,
                                const std::vector<double>& probabilities, double effective_count,
                                const GaussNewtonOptions& options = {});

struct VarianceRecovery {
  RVector variances;                  // complex variance per entry
  std::vector<VarianceSolve> solves;  // one per entry, or one if shared
};

// Half-normal CDF fit per entry (or pooled over all entries when
// shared_variance). Requires a finite quantizer with bits >= 2.
VarianceRecovery recover_variances(const CMatrix& r, const RVector& weights, const QuantizerSpec& q,
                                   bool shared_variance = false,
                                   const GaussNewtonOptions& options = {});

// diag(C)^{1/2} R diag(C)^{1/2}.
CMatrix recover_covariance(const CMatrix& r, const RVector& weights, const QuantizerSpec& q,
                           bool shared_variance = false, const GaussNewtonOptions& options = {});

// Quantized-domain covariance of one mixture component used during training:
// exact diagonal, off-diagonals nondiag(B C_y B^H). Clamped if indefinite.
CMatrix training_quantized_covariance(const CMatrix& c_y, const QuantizerSpec& q);

// GMM fit from single-snapshot quantized observations r_t = Q(h_t + n_t).
// The returned model holds channel covariances (structure Full).
GmmModel fit_gmm_quantized(const CMatrix& r, std::size_t components, double sigma2,
                           const QuantizerSpec& q, const EmOptions& options, Rng& rng,
                           FitReport* report = nullptr);

}  // namespace qce
