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

#include "qce/random.hpp"
#include "qce/types.hpp"

namespace qce {

// Pilot vector a with ||a||^2 = P. Entries follow equidistant amplitude and
// phase spacing: beta_i exp(j pi (i-1) / (2P)), beta_i = 1/2 + (i-1)/(2(P-1)),
// rescaled to the power constraint. P = 1 uses a = [1].
struct PilotConfig {
  std::vector<Complex> a;

  std::size_t count() const { return a.size(); }
  // A = a (x) I_N, shape (N P) x N.
  CMatrix matrix(std::size_t antennas) const;
  // A h without materializing A.
  CVector apply(const CVector& h) const;
};

PilotConfig make_pilots(std::size_t pilots);

// Uniform mid-rise quantizer applied independently to real and imaginary parts.
// Thresholds sit at integer multiples of the step, labels at the cell midpoints;
// the two outer cells extend to +-infinity and map to the outermost labels.
// bits == 0 is the infinite-resolution pass-through.
struct QuantizerSpec {
  int bits = 0;
  double step = 0.0;
  std::vector<double> thresholds;  // tau_1 .. tau_{2^B - 1} (finite ones only)
  std::vector<double> labels;      // l_1 .. l_{2^B}

  bool is_infinite() const { return bits == 0; }
  std::size_t levels() const { return labels.size(); }

  double quantize(double x) const;
  Complex quantize(Complex y) const { return {quantize(y.real()), quantize(y.imag())}; }

  // Strictly positive finite thresholds tau_{2^{B-1}+1} .. tau_{2^B - 1}.
  std::vector<double> positive_thresholds() const;

  static QuantizerSpec infinite();
  static QuantizerSpec uniform(int bits, double step);
};

inline constexpr int kMaxBits = 8;

// Step size minimizing E[(x - Q(x))^2] for x ~ N(0, 1) with 2^bits uniform
// levels. Computed once per process by grid search (0.01) and golden-section
// refinement (1e-6).
double optimal_uniform_step(int bits);

// Mean squared quantization error for standard normal input.
double uniform_quantizer_mse(int bits, double step);

// Quantizer for input variance (1 + sigma2) per complex entry:
// step = sqrt((1 + sigma2) / 2) * optimal_uniform_step(bits). One-bit
// quantizers always use step sqrt(2), i.e. labels +-1/sqrt(2).
QuantizerSpec make_quantizer(int bits, double sigma2);

CVector quantize(const CVector& y, const QuantizerSpec& q);
CMatrix quantize(const CMatrix& y, const QuantizerSpec& q);

// r = Q(A h + n) with n ~ CN(0, sigma2 I).
CVector observe(const CVector& h, const PilotConfig& pilots, double sigma2,
                const QuantizerSpec& q, Rng& rng);

inline double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

}  // namespace qce
