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
#include <string>
#include <vector>

#include "qce/random.hpp"
#include "qce/types.hpp"

namespace qce {

enum class CovarianceStructure { Full, Toeplitz, Circulant };

std::string to_string(CovarianceStructure s);
CovarianceStructure parse_structure(const std::string& name);

// Zero-mean Gaussian mixture. For the circulant structure `spectra[k]` holds
// c_k with C_k = F^H diag(c_k) F and `covariances[k]` is kept in sync.
struct GmmModel {
  CovarianceStructure structure = CovarianceStructure::Full;
  RVector weights;
  std::vector<CMatrix> covariances;
  std::vector<RVector> spectra;

  std::size_t components() const { return static_cast<std::size_t>(weights.size()); }
  std::size_t antennas() const {
    return covariances.empty() ? 0 : static_cast<std::size_t>(covariances.front().rows());
  }
  // Mean per-sample log-likelihood of column-wise samples.
  double log_likelihood(const CMatrix& samples) const;
};

// Mixture of factor analyzers, C_k = W_k W_k^H + psi_k I, zero means.
struct MfaModel {
  RVector weights;
  std::vector<CMatrix> loadings;  // N x L
  std::vector<double> psi;

  std::size_t components() const { return static_cast<std::size_t>(weights.size()); }
  std::size_t antennas() const {
    return loadings.empty() ? 0 : static_cast<std::size_t>(loadings.front().rows());
  }
  std::size_t latent_dim() const {
    return loadings.empty() ? 0 : static_cast<std::size_t>(loadings.front().cols());
  }
  CMatrix covariance(std::size_t k) const;
  GmmModel as_gmm() const;
  double log_likelihood(const CMatrix& samples) const;
};

struct EmOptions {
  std::size_t max_iter = 100;
  double tol = 1e-6;          // relative change of the mean log-likelihood
  double regularization = 1e-6;  // times trace / N, added to every M-step covariance
  std::size_t kmeans_iter = 10;
};

struct FitReport {
  std::vector<double> log_likelihood;  // before each M-step, mean per sample
  std::vector<std::size_t> reinit_iterations;  // iterations with a collapsed component
  std::size_t iterations = 0;
  bool converged = false;
};

// Samples are column-wise (N x T). Requires T >= 10 K.
GmmModel fit_gmm(const CMatrix& samples, std::size_t components, CovarianceStructure structure,
                 const EmOptions& options, Rng& rng, FitReport* report = nullptr);

// Requires 1 <= L < N and T >= 10 K.
MfaModel fit_mfa(const CMatrix& samples, std::size_t components, std::size_t latent_dim,
                 const EmOptions& options, Rng& rng, FitReport* report = nullptr);

// k-means++ seeding plus Lloyd iterations on phase-aligned samples
// h exp(-j arg h_0). Returns a cluster label per sample.
std::vector<std::size_t> kmeans_labels(const CMatrix& samples, std::size_t clusters,
                                       std::size_t iterations, Rng& rng);

// T x K matrix of log pi_k + log N_C(x_t; 0, C_k).
RMatrix component_log_densities(const RVector& weights, const std::vector<CMatrix>& covariances,
                                const CMatrix& samples);

// Normalizes rows of log densities in place into responsibilities and returns
// the summed log-likelihood. Rows whose entries are all -inf become uniform.
double normalize_responsibilities(RMatrix& log_densities);

// (1/N_k) sum_t gamma_tk x_t x_t^H with N_k = sum_t gamma_tk.
CMatrix weighted_scatter(const CMatrix& samples, const RVector& gamma);

// Toeplitz components are parametrized as C = Q^H diag(c) Q, where Q holds
// the first N columns of the unitary 2N-point DFT and c >= 0 has length 2N.
// Every such C is Toeplitz and PSD.
CMatrix toeplitz_from_grid(const RVector& grid);
// Bartlett estimate c_g = a_g^H S a_g / N, a_g the steering vector of grid point g.
RVector toeplitz_grid_init(const CMatrix& scatter);
// One EM step on -(log det C + tr(C^{-1} S)) treating h = Q^H x with
// x ~ CN(0, diag(c)). The objective never decreases and c stays nonnegative.
RVector toeplitz_grid_step(const RVector& grid, const CMatrix& scatter);

RVector circulant_spectrum(const CMatrix& scatter);
CMatrix circulant_from_spectrum(const RVector& spectrum);

}  // namespace qce
