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

#include <algorithm>
#include <cmath>
#include <limits>

#include "qce/log.hpp"
#include "qce/mixtures.hpp"
#include "qce/numeric.hpp"
#include "qce/parallel.hpp"

namespace qce {

CMatrix MfaModel::covariance(std::size_t k) const {
  CMatrix c = loadings[k] * loadings[k].adjoint();
  c.diagonal().array() += psi[k];
  return hermitian_part(c);
}

GmmModel MfaModel::as_gmm() const {
  GmmModel g;
  g.structure = CovarianceStructure::Full;
  g.weights = weights;
  for (std::size_t k = 0; k < components(); ++k) g.covariances.push_back(covariance(k));
  return g;
}

double MfaModel::log_likelihood(const CMatrix& samples) const { return as_gmm().log_likelihood(samples); }

namespace {

// Probabilistic PCA fit of one scatter matrix: top-L eigenpairs, psi the mean
// of the discarded eigenvalues.
void ppca(const CMatrix& scatter, std::size_t latent, CMatrix& w, double& psi) {
  const auto n = scatter.rows();
  const auto l = static_cast<Eigen::Index>(latent);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(scatter));
  if (eig.info() != Eigen::Success) throw NumericalError("fit_mfa: eigendecomposition failed");
  const RVector& lam = eig.eigenvalues();  // ascending
  const double level = std::max(lam.mean(), std::numeric_limits<double>::min());
  psi = std::max(lam.head(n - l).mean(), 1e-6 * level);
  w.resize(n, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    const Eigen::Index src = n - 1 - j;
    w.col(j) = eig.eigenvectors().col(src) * std::sqrt(std::max(lam(src) - psi, 0.0));
  }
}

}  // namespace

MfaModel fit_mfa(const CMatrix& samples, std::size_t components, std::size_t latent_dim,
                 const EmOptions& options, Rng& rng, FitReport* report) {
  if (components == 0) throw std::invalid_argument("fit_mfa: K must be >= 1");
  const auto n = static_cast<std::size_t>(samples.rows());
  if (latent_dim == 0 || latent_dim >= n) throw std::invalid_argument("fit_mfa: need 1 <= L < N");
  const auto t_count = static_cast<std::size_t>(samples.cols());
  if (t_count < 10 * components) throw std::invalid_argument("fit_mfa: need T >= 10 K samples");

  MfaModel model;
  model.weights = RVector::Zero(static_cast<Eigen::Index>(components));
  model.loadings.resize(components);
  model.psi.resize(components);
  {
    const std::vector<std::size_t> labels = kmeans_labels(samples, components, options.kmeans_iter, rng);
    const double level = samples.colwise().squaredNorm().mean() / static_cast<double>(n);
    for (std::size_t k = 0; k < components; ++k) {
      RVector gamma = RVector::Zero(samples.cols());
      for (Eigen::Index t = 0; t < samples.cols(); ++t) gamma(t) = labels[static_cast<std::size_t>(t)] == k ? 1.0 : 0.0;
      if (gamma.sum() < 1.0) gamma(static_cast<Eigen::Index>(rng.index(t_count))) = 1.0;
      model.weights(static_cast<Eigen::Index>(k)) = gamma.sum();
      CMatrix scatter = weighted_scatter(samples, gamma);
      scatter.diagonal().array() += 1e-3 * level;
      ppca(scatter, latent_dim, model.loadings[k], model.psi[k]);
    }
    model.weights /= model.weights.sum();
  }

  FitReport local;
  double previous = -std::numeric_limits<double>::infinity();
  const double collapse = 1.0 / (100.0 * static_cast<double>(t_count));
  const auto l = static_cast<Eigen::Index>(latent_dim);

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    std::vector<CMatrix> covs(components);
    for (std::size_t k = 0; k < components; ++k) covs[k] = model.covariance(k);
    RMatrix gamma = component_log_densities(model.weights, covs, samples);
    const double ll = normalize_responsibilities(gamma) / static_cast<double>(t_count);
    if (!std::isfinite(ll)) throw NumericalError("fit_mfa: non-finite log-likelihood");
    local.log_likelihood.push_back(ll);
    local.iterations = it + 1;
    if (it > 0 && std::abs(ll - previous) <= options.tol * std::abs(previous)) {
      local.converged = true;
      break;
    }
    previous = ll;

    const RVector nk = gamma.colwise().sum().transpose();
    parallel_for(components, [&](std::size_t k) {
      const auto col = static_cast<Eigen::Index>(k);
      if (nk(col) / static_cast<double>(t_count) < collapse) return;
      const CMatrix s = weighted_scatter(samples, gamma.col(col));
      const CMatrix& w = model.loadings[k];
      // beta = W^H C^{-1}; E[z z^H] averaged over the component's samples.
      const CMatrix beta = HermitianFactor(covs[k]).solve(w).adjoint();
      const CMatrix ezz = CMatrix::Identity(l, l) - beta * w + beta * s * beta.adjoint();
      const CMatrix sb = s * beta.adjoint();
      const CMatrix w_new = solve_hermitian(hermitian_part(ezz), sb.adjoint()).adjoint();
      const double psi = (s - w_new * beta * s).trace().real() / static_cast<double>(n);
      const double level = s.trace().real() / static_cast<double>(n);
      model.loadings[k] = w_new;
      model.psi[k] = std::max(psi, 1e-12 * std::max(level, std::numeric_limits<double>::min()));
    });
    model.weights = nk / static_cast<double>(t_count);
    bool reinit = false;
    for (std::size_t k = 0; k < components; ++k) {
      if (nk(static_cast<Eigen::Index>(k)) / static_cast<double>(t_count) >= collapse) continue;
      const CVector h = samples.col(static_cast<Eigen::Index>(rng.index(t_count)));
      model.loadings[k] = CMatrix::Zero(static_cast<Eigen::Index>(n), l);
      model.loadings[k].col(0) = h;
      model.psi[k] = 0.1 * std::max(h.squaredNorm() / static_cast<double>(n), 1e-12);
      model.weights(static_cast<Eigen::Index>(k)) = 1.0 / static_cast<double>(components);
      reinit = true;
      log_warning("fit_mfa: component " + std::to_string(k) + " collapsed at iteration " +
                  std::to_string(it) + "; reinitialized from a random sample");
    }
    if (reinit) {
      model.weights /= model.weights.sum();
      local.reinit_iterations.push_back(it);
    }
  }
  if (report != nullptr) *report = std::move(local);
  return model;
}

}  // namespace qce
