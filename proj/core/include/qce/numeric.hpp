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

#include "qce/types.hpp"

namespace qce {

/// Standard normal CDF via erfc; absolute error is at the double rounding level.
double normal_cdf(double x);
double normal_pdf(double x);

/// Inverse error function on [0, 1). Newton iteration on erf, seeded at
/// sqrt(2) * sqrt(-ln(1 - p)) and safeguarded by bisection. The residual is
/// evaluated through erfc, so the result keeps relative accuracy near p = 1.
double erf_inv(double p);

CMatrix hermitian_part(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double rel_tol = 1e-10);
bool is_toeplitz(const CMatrix& m, double rel_tol = 1e-10);

double min_eigenvalue(const CMatrix& hermitian);

// Eigenvalue clamping onto the PSD cone. `floor` is the smallest eigenvalue
// kept (default 0).
CMatrix project_psd(const CMatrix& hermitian, double floor = 0.0);

// Unitary DFT matrix, F(k, n) = exp(-j 2 pi k n / N) / sqrt(N).
CMatrix unitary_dft(std::size_t n);

double relative_frobenius_error(const CMatrix& estimate, const CMatrix& truth);

/// Solves A X = B for Hermitian A with an LDLT factorization. When the
/// reciprocal condition estimate drops below 1e-12 a jitter of
/// 1e-10 * trace(A) / dim is added to the diagonal once; if that still fails a
/// NumericalError is thrown.
CMatrix solve_hermitian(const CMatrix& a, const CMatrix& b);

/// Cholesky factor of a Hermitian positive definite matrix with the same
/// single-jitter fallback as solve_hermitian. Used for Gaussian log-densities.
class HermitianFactor {
 public:
  HermitianFactor() = default;
  explicit HermitianFactor(const CMatrix& a);

  std::size_t dim() const { return static_cast<std::size_t>(llt_.rows()); }
  double log_det() const { return log_det_; }

  // r^H A^{-1} r for each column of `samples`.
  RVector quadratic_forms(const CMatrix& samples) const;
  double quadratic_form(const CVector& r) const;

  // -dim log(pi) - log det A - r^H A^{-1} r for each column (circular complex Gaussian).
  RVector log_density(const CMatrix& samples) const;

  CMatrix solve(const CMatrix& b) const { return llt_.solve(b); }

 private:
  Eigen::LLT<CMatrix> llt_;
  double log_det_ = 0.0;
};

// Numerically stable log(sum(exp(values))).
double log_sum_exp(const double* values, std::size_t count);

}  // namespace qce
