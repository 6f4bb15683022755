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

#include "qce/bussgang.hpp"

#include <algorithm>
#include <cmath>

#include "qce/log.hpp"
#include "qce/numeric.hpp"
#include "qce/parallel.hpp"

namespace qce {

double bussgang_gain(double variance, const QuantizerSpec& q) {
  if (!(variance > 0.0)) throw std::invalid_argument("bussgang_gain: variance must be positive");
  if (q.is_infinite()) return 1.0;
  if (q.bits == 1) return std::sqrt(2.0 / (kPi * variance));
  // Gaussian sum over the finite thresholds m * step, |m| < 2^{B-1}.
  const long half = 1L << (q.bits - 1);
  double acc = 0.0;
  for (long m = 1 - half; m <= half - 1; ++m) {
    const double t = q.step * static_cast<double>(m);
    acc += std::exp(-t * t / variance);
  }
  return q.step / std::sqrt(kPi * variance) * acc;
}

RVector bussgang_gain(const CMatrix& c_y, const QuantizerSpec& q) {
  RVector g(c_y.rows());
  for (Eigen::Index i = 0; i < c_y.rows(); ++i) g(i) = bussgang_gain(c_y(i, i).real(), q);
  return g;
}

double quantized_variance(double variance, const QuantizerSpec& q) {
  if (!(variance > 0.0)) throw std::invalid_argument("quantized_variance: variance must be positive");
  if (q.is_infinite()) return variance;
  // Each real part is N(0, variance / 2); sum cell probabilities times label^2.
  const double scale = std::sqrt(2.0 / variance);
  double acc = 0.0;
  double lower = 0.0;  // Phi at the previous threshold
  for (std::size_t i = 0; i < q.labels.size(); ++i) {
    const double upper = i < q.thresholds.size() ? normal_cdf(q.thresholds[i] * scale) : 1.0;
    acc += 2.0 * q.labels[i] * q.labels[i] * (upper - lower);
    lower = upper;
  }
  return acc;
}

namespace {

void require_positive_diagonal(const CMatrix& c_y, const char* who) {
  for (Eigen::Index i = 0; i < c_y.rows(); ++i) {
    if (!(c_y(i, i).real() > 0.0)) {
      throw std::invalid_argument(std::string(who) + ": C_y diagonal must be positive");
    }
  }
}

CMatrix arcsine_law(const CMatrix& c_y) {
  const auto n = c_y.rows();
  RVector inv_sd(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sd(i) = 1.0 / std::sqrt(c_y(i, i).real());
  CMatrix c_r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex v = c_y(i, j) * (inv_sd(i) * inv_sd(j));
      const double re = std::clamp(v.real(), -1.0, 1.0);
      const double im = std::clamp(v.imag(), -1.0, 1.0);
      c_r(i, j) = Complex(std::asin(re), std::asin(im)) * (2.0 / kPi);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) c_r(i, i) = 1.0;
  return c_r;
}

double mean_gain_rho(const RVector& gain) { return std::min(gain.mean(), 1.0); }

}  // namespace

CMatrix quantized_covariance(const CMatrix& c_y, const QuantizerSpec& q, CovarianceMode mode) {
  if (c_y.rows() != c_y.cols()) throw std::invalid_argument("quantized_covariance: C_y must be square");
  require_positive_diagonal(c_y, "quantized_covariance");
  if (q.is_infinite()) return c_y;
  if (q.bits == 1) return arcsine_law(c_y);

  const RVector gain = bussgang_gain(c_y, q);
  if (mode == CovarianceMode::Approximate) {
    const double rho = mean_gain_rho(gain);
    CMatrix c_r = (rho * rho) * c_y;
    c_r.diagonal() = c_y.diagonal();
    return c_r;
  }
  CMatrix c_r = gain.cast<Complex>().asDiagonal() * c_y * gain.cast<Complex>().asDiagonal();
  for (Eigen::Index i = 0; i < c_y.rows(); ++i) c_r(i, i) = quantized_variance(c_y(i, i).real(), q);
  return c_r;
}

CMatrix receive_covariance(const CMatrix& c_h, const PilotConfig& pilots, double sigma2) {
  const auto n = c_h.rows();
  const auto p = static_cast<Eigen::Index>(pilots.count());
  CMatrix c_y(n * p, n * p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      c_y.block(i * n, j * n, n, n) = (pilots.a[i] * std::conj(pilots.a[j])) * c_h;
    }
  }
  c_y.diagonal().array() += sigma2;
  return c_y;
}

BussgangContext BussgangContext::make(const CMatrix& c_h, const PilotConfig& pilots, double sigma2,
                                      const QuantizerSpec& q, CovarianceMode mode) {
  BussgangContext ctx;
  ctx.c_y = receive_covariance(c_h, pilots, sigma2);
  require_positive_diagonal(ctx.c_y, "BussgangContext");
  ctx.gain = bussgang_gain(ctx.c_y, q);
  ctx.rho = mean_gain_rho(ctx.gain);
  ctx.c_r = quantized_covariance(ctx.c_y, q, mode);
  return ctx;
}

LmmseFilter conditional_lmmse(const BussgangContext& ctx, const CMatrix& c_h,
                              const PilotConfig& pilots) {
  const auto n = c_h.rows();
  const auto p = static_cast<Eigen::Index>(pilots.count());
  // W^H = C_r^{-1} B A C_h, built block by block.
  CMatrix rhs(n * p, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    rhs.middleRows(i * n, n) = ctx.gain.segment(i * n, n).cast<Complex>().asDiagonal() * c_h;
    rhs.middleRows(i * n, n) *= pilots.a[i];
  }
  LmmseFilter f;
  f.matrix = solve_hermitian(ctx.c_r, rhs).adjoint();
  if (!f.matrix.allFinite()) throw NumericalError("conditional_lmmse: non-finite filter");
  return f;
}

LmmseFilter conditional_lmmse(const CMatrix& c_h, const PilotConfig& pilots, double sigma2,
                              const QuantizerSpec& q, CovarianceMode mode) {
  return conditional_lmmse(BussgangContext::make(c_h, pilots, sigma2, q, mode), c_h, pilots);
}

namespace {

// lambda_k = sum_m col(m) exp(-j 2 pi k m / N) for the circulant with first column col.
CVector circulant_eigenvalues(const CVector& col) {
  const auto n = col.size();
  CVector lam = CVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const double angle = -2.0 * kPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      lam(k) += col(m) * std::polar(1.0, angle);
    }
  }
  return lam;
}

// Inverse: first column from eigenvalues.
CVector circulant_column(const RVector& spectrum) {
  const auto n = spectrum.size();
  CVector col = CVector::Zero(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double angle = 2.0 * kPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      col(m) += spectrum(k) * std::polar(1.0, angle);
    }
    col(m) /= static_cast<double>(n);
  }
  return col;
}

}  // namespace

CirculantLmmse::CirculantLmmse(const RVector& spectrum, const PilotConfig& pilots, double sigma2,
                               const QuantizerSpec& q)
    : n_(static_cast<std::size_t>(spectrum.size())), p_(pilots.count()) {
  if (spectrum.size() == 0 || pilots.count() == 0) {
    throw std::invalid_argument("CirculantLmmse: empty spectrum or pilots");
  }
  if ((spectrum.array() < 0.0).any()) {
    throw std::invalid_argument("CirculantLmmse: spectrum must be nonnegative");
  }
  const auto n = spectrum.size();
  const auto p = static_cast<Eigen::Index>(p_);
  const CVector col_h = circulant_column(spectrum);
  const double level = spectrum.mean();  // diagonal of C_h

  // Block (i, j) of C_y is a_i conj(a_j) C_h (+ sigma2 I on i == j); diagonal
  // is constant per block, so gains and normalizations are per block.
  RVector var(p), gain(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    var(i) = std::norm(pilots.a[i]) * level + sigma2;
    gain(i) = bussgang_gain(var(i), q);
  }
  const double rho = std::min(gain.mean(), 1.0);

  // Per-bin P x P spectra of every block of C_r.
  std::vector<CMatrix> s(static_cast<std::size_t>(n), CMatrix(p, p));
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      CVector col = (pilots.a[i] * std::conj(pilots.a[j])) * col_h;
      if (i == j) col(0) += sigma2;
      if (q.bits == 1) {
        const double norm = 1.0 / std::sqrt(var(i) * var(j));
        for (Eigen::Index m = 0; m < n; ++m) {
          const Complex v = col(m) * norm;
          col(m) = Complex(std::asin(std::clamp(v.real(), -1.0, 1.0)),
                           std::asin(std::clamp(v.imag(), -1.0, 1.0))) * (2.0 / kPi);
        }
        if (i == j) col(0) = 1.0;
      } else if (!q.is_infinite()) {
        const double diag = i == j ? col(0).real() : 0.0;
        col *= rho * rho;
        if (i == j) col(0) = diag;
      }
      const CVector lam = circulant_eigenvalues(col);
      for (Eigen::Index k = 0; k < n; ++k) s[static_cast<std::size_t>(k)](i, j) = lam(k);
    }
  }

  // Per bin: w_k^H = S_k^{-1} (g_i a_i c_k)_i, bins_(k, i) = conj(w_k^H)(i).
  bins_.resize(n, p);
  for (Eigen::Index k = 0; k < n; ++k) {
    CMatrix rhs(p, 1);
    for (Eigen::Index i = 0; i < p; ++i) rhs(i, 0) = gain(i) * pilots.a[i] * spectrum(k);
    const CMatrix& sk = s[static_cast<std::size_t>(k)];
    const CMatrix x = solve_hermitian(hermitian_part(sk), rhs);
    for (Eigen::Index i = 0; i < p; ++i) bins_(k, i) = std::conj(x(i, 0));
  }
}

CVector CirculantLmmse::apply(const CVector& r) const {
  const auto n = static_cast<Eigen::Index>(n_);
  if (r.size() != n * static_cast<Eigen::Index>(p_)) {
    throw std::invalid_argument("CirculantLmmse::apply: observation length mismatch");
  }
  // h = F^H sum_i diag(bins_.col(i)) F r_i with the unitary DFT.
  CVector acc = CVector::Zero(n);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(p_); ++i) {
    const CVector fr = circulant_eigenvalues(r.segment(i * n, n)) / std::sqrt(static_cast<double>(n));
    acc += bins_.col(i).cwiseProduct(fr);
  }
  CVector out(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    Complex v(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double angle = 2.0 * kPi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      v += acc(k) * std::polar(1.0, angle);
    }
    out(m) = v / std::sqrt(static_cast<double>(n));
  }
  return out;
}

CMatrix CirculantLmmse::dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  const CMatrix f = unitary_dft(n_);
  CMatrix w(n, n * static_cast<Eigen::Index>(p_));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(p_); ++i) {
    w.middleCols(i * n, n) = f.adjoint() * bins_.col(i).asDiagonal() * f;
  }
  return w;
}

CMatrix estimate_buss_genie(const CMatrix& r, const std::vector<ClusterParams>& params,
                            std::size_t antennas, const PilotConfig& pilots, double sigma2,
                            const QuantizerSpec& q) {
  if (params.size() != static_cast<std::size_t>(r.cols())) {
    throw std::invalid_argument("estimate_buss_genie: one ClusterParams per observation required");
  }
  CMatrix out(static_cast<Eigen::Index>(antennas), r.cols());
  parallel_for(params.size(), [&](std::size_t t) {
    const GenieCovariance cov = genie_covariance(params[t], antennas);
    const LmmseFilter f = conditional_lmmse(cov.matrix, pilots, sigma2, q);
    out.col(static_cast<Eigen::Index>(t)) = f.apply(CVector(r.col(static_cast<Eigen::Index>(t))));
  });
  return out;
}

CMatrix estimate_buss_scov(const CMatrix& r, const CMatrix& sample_cov, const PilotConfig& pilots,
                           double sigma2, const QuantizerSpec& q) {
  return conditional_lmmse(sample_cov, pilots, sigma2, q).apply(r);
}

CMatrix estimate_bls(const CMatrix& r, const CMatrix& sample_cov, const PilotConfig& pilots,
                     double sigma2, const QuantizerSpec& q) {
  const RVector gain = bussgang_gain(receive_covariance(sample_cov, pilots, sigma2), q);
  const auto n = sample_cov.rows();
  const double p = static_cast<double>(pilots.count());
  // A^+ = A^H / P since A^H A = ||a||^2 I = P I.
  CMatrix out = CMatrix::Zero(n, r.cols());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(pilots.count()); ++i) {
    const RVector inv = gain.segment(i * n, n).cwiseInverse();
    out += std::conj(pilots.a[i]) * (inv.cast<Complex>().asDiagonal() * r.middleRows(i * n, n));
  }
  return out / p;
}

}  // namespace qce
