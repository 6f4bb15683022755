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

#include "qce/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qce {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double erf_inv(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("erf_inv: argument must lie in [0, 1)");
  }
  if (p == 0.0) return 0.0;

  // Bracket [lo, hi] kept around the root so Newton can never escape. The
  // residual is taken on erfc against 1 - p so it keeps full relative
  // precision as p approaches one.
  const double tail = 1.0 - p;
  double lo = 0.0;
  double hi = 1.0;
  while (std::erfc(hi) > tail) hi *= 2.0;

  double x = std::sqrt(2.0) * std::sqrt(-std::log1p(-p));
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double residual = tail - std::erfc(x);  // erf(x) - p
    if (residual == 0.0) break;
    if (residual > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double slope = 2.0 / std::sqrt(kPi) * std::exp(-x * x);
    double next = x - residual / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double delta = std::abs(next - x);
    x = next;
    if (delta <= 1e-15 * std::max(1.0, x)) break;
  }
  return x;
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

bool is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

bool is_toeplitz(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
  double dev = 0.0;
  for (Eigen::Index i = 1; i < m.rows(); ++i) {
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      dev = std::max(dev, std::abs(m(i, j) - m(i - 1, j - 1)));
    }
  }
  return dev <= rel_tol * scale;
}

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

CMatrix project_psd(const CMatrix& hermitian, double floor) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(hermitian));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("project_psd: eigendecomposition failed");
  }
  const RVector clamped = eig.eigenvalues().cwiseMax(floor);
  const CMatrix& v = eig.eigenvectors();
  CMatrix out = v * clamped.cast<Complex>().asDiagonal() * v.adjoint();
  return hermitian_part(out);
}

CMatrix unitary_dft(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  CMatrix f(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (Eigen::Index m = 0; m < dim; ++m) {
      // Reduce the exponent modulo n first so large products stay exact.
      const auto idx = static_cast<double>((k * m) % dim);
      const double angle = -2.0 * kPi * idx / static_cast<double>(n);
      f(k, m) = std::polar(scale, angle);
    }
  }
  return f;
}

double relative_frobenius_error(const CMatrix& estimate, const CMatrix& truth) {
  return (estimate - truth).norm() / truth.norm();
}

CMatrix solve_hermitian(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("solve_hermitian: dimension mismatch");
  }
  constexpr double kMinRcond = 1e-12;
  Eigen::LDLT<CMatrix> ldlt(a);
  if (ldlt.info() == Eigen::Success && ldlt.rcond() >= kMinRcond) {
    return ldlt.solve(b);
  }
  const double dim = static_cast<double>(a.rows());
  const double jitter = 1e-10 * std::abs(a.trace().real()) / dim;
  CMatrix shifted = a;
  shifted.diagonal().array() += jitter;
  ldlt.compute(shifted);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < kMinRcond) {
    throw NumericalError("solve_hermitian: matrix is numerically singular after jitter");
  }
  return ldlt.solve(b);
}

HermitianFactor::HermitianFactor(const CMatrix& a) {
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    const double jitter = 1e-10 * std::abs(a.trace().real()) / static_cast<double>(a.rows());
    CMatrix shifted = a;
    shifted.diagonal().array() += std::max(jitter, std::numeric_limits<double>::min());
    llt_.compute(shifted);
    if (llt_.info() != Eigen::Success) {
      throw NumericalError("HermitianFactor: matrix is not positive definite");
    }
  }
  const CMatrix& l = llt_.matrixLLT();
  log_det_ = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det_ += 2.0 * std::log(l(i, i).real());
}

RVector HermitianFactor::quadratic_forms(const CMatrix& samples) const {
  const CMatrix z = llt_.matrixL().solve(samples);
  return z.colwise().squaredNorm().transpose();
}

double HermitianFactor::quadratic_form(const CVector& r) const {
  const CVector z = llt_.matrixL().solve(r);
  return z.squaredNorm();
}

RVector HermitianFactor::log_density(const CMatrix& samples) const {
  const double offset = -static_cast<double>(dim()) * std::log(kPi) - log_det_;
  return (-quadratic_forms(samples).array() + offset).matrix();
}

double log_sum_exp(const double* values, std::size_t count) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) peak = std::max(peak, values[i]);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) acc += std::exp(values[i] - peak);
  return peak + std::log(acc);
}

}  // namespace qce
