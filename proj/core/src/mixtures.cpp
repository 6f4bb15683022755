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

#include "qce/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qce/log.hpp"
#include "qce/numeric.hpp"
#include "qce/parallel.hpp"

namespace qce {

std::string to_string(CovarianceStructure s) {
  switch (s) {
    case CovarianceStructure::Full: return "full";
    case CovarianceStructure::Toeplitz: return "toeplitz";
    case CovarianceStructure::Circulant: return "circulant";
  }
  return "full";
}

CovarianceStructure parse_structure(const std::string& name) {
  if (name == "full") return CovarianceStructure::Full;
  if (name == "toeplitz") return CovarianceStructure::Toeplitz;
  if (name == "circulant") return CovarianceStructure::Circulant;
  throw std::invalid_argument("unknown covariance structure '" + name + "'");
}

RMatrix component_log_densities(const RVector& weights, const std::vector<CMatrix>& covariances,
                                const CMatrix& samples) {
  const auto k = static_cast<Eigen::Index>(covariances.size());
  RMatrix out(samples.cols(), k);
  parallel_for(covariances.size(), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    const double log_w = weights(col) > 0.0 ? std::log(weights(col))
                                            : -std::numeric_limits<double>::infinity();
    const HermitianFactor factor(covariances[c]);
    out.col(col) = factor.log_density(samples).array() + log_w;
  });
  return out;
}

double normalize_responsibilities(RMatrix& log_densities) {
  double total = 0.0;
  std::size_t degenerate = 0;
  const auto k = log_densities.cols();
  for (Eigen::Index t = 0; t < log_densities.rows(); ++t) {
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c) peak = std::max(peak, log_densities(t, c));
    if (!std::isfinite(peak)) {
      log_densities.row(t).setConstant(1.0 / static_cast<double>(k));
      ++degenerate;
      continue;
    }
    double acc = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double e = std::exp(log_densities(t, c) - peak);
      log_densities(t, c) = e;
      acc += e;
    }
    log_densities.row(t) /= acc;
    total += peak + std::log(acc);
  }
  if (degenerate > 0) {
    log_warning("responsibilities: " + std::to_string(degenerate) +
                " samples had no finite component density; set uniform");
  }
  return total;
}

CMatrix weighted_scatter(const CMatrix& samples, const RVector& gamma) {
  const double nk = gamma.sum();
  if (!(nk > 0.0)) throw NumericalError("weighted_scatter: zero total weight");
  const CMatrix scaled = samples * gamma.cwiseSqrt().cast<Complex>().asDiagonal();
  CMatrix s = CMatrix::Zero(samples.rows(), samples.rows());
  s.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 1.0 / nk);
  CMatrix full = s.selfadjointView<Eigen::Lower>();
  return full;
}

namespace {

// Rows of Q: the first N columns of the unitary G-point DFT.
CMatrix toeplitz_grid_basis(std::size_t grid_size, std::size_t n) {
  return unitary_dft(grid_size).leftCols(static_cast<Eigen::Index>(n));
}

}  // namespace

CMatrix toeplitz_from_grid(const RVector& grid) {
  if (grid.size() < 2 || grid.size() % 2 != 0) {
    throw std::invalid_argument("toeplitz_from_grid: grid length must be even and positive");
  }
  const auto g = grid.size();
  const auto n = g / 2;
  // C(i, j) = (1/G) sum_g c_g exp(j 2 pi g (i - j) / G); assemble from the first column.
  CVector col(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < g; ++k) {
      const auto idx = static_cast<double>((k * m) % g);
      acc += grid(k) * std::polar(1.0, 2.0 * kPi * idx / static_cast<double>(g));
    }
    col(m) = acc / static_cast<double>(g);
  }
  col(0) = col(0).real();
  CMatrix t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = i >= j ? col(i - j) : std::conj(col(j - i));
  }
  return t;
}

RVector toeplitz_grid_init(const CMatrix& scatter) {
  const auto n = static_cast<std::size_t>(scatter.rows());
  const CMatrix q = toeplitz_grid_basis(2 * n, n);
  const CMatrix qs = q * scatter;
  // q_g^H S q_g scaled by G / N so that S = I maps to c = 1.
  const RVector quad = (qs.cwiseProduct(q.conjugate())).rowwise().sum().real();
  return (quad * 2.0).cwiseMax(0.0);
}

RVector toeplitz_grid_step(const RVector& grid, const CMatrix& scatter) {
  const auto n = static_cast<std::size_t>(scatter.rows());
  if (static_cast<std::size_t>(grid.size()) != 2 * n) {
    throw std::invalid_argument("toeplitz_grid_step: grid length must be 2N");
  }
  const CMatrix q = toeplitz_grid_basis(2 * n, n);
  const HermitianFactor f(toeplitz_from_grid(grid));
  const CMatrix c_inv = f.solve(CMatrix::Identity(scatter.rows(), scatter.cols()));
  // Posterior second moment of x: c - c^2 diag(Q (C^-1 - C^-1 S C^-1) Q^H).
  const CMatrix m = hermitian_part(c_inv - c_inv * scatter * c_inv);
  const CMatrix qm = q * m;
  const RVector d = (qm.cwiseProduct(q.conjugate())).rowwise().sum().real();
  return (grid.array() - grid.array().square() * d.array()).cwiseMax(0.0).matrix();
}

RVector circulant_spectrum(const CMatrix& scatter) {
  const CMatrix f = unitary_dft(static_cast<std::size_t>(scatter.rows()));
  const CMatrix d = f * scatter * f.adjoint();
  return d.diagonal().real().cwiseMax(0.0);
}

CMatrix circulant_from_spectrum(const RVector& spectrum) {
  const CMatrix f = unitary_dft(static_cast<std::size_t>(spectrum.size()));
  return hermitian_part(f.adjoint() * spectrum.cast<Complex>().asDiagonal() * f);
}

std::vector<std::size_t> kmeans_labels(const CMatrix& samples, std::size_t clusters,
                                       std::size_t iterations, Rng& rng) {
  const auto t_count = static_cast<std::size_t>(samples.cols());
  if (clusters == 0 || t_count < clusters) {
    throw std::invalid_argument("kmeans_labels: need at least one sample per cluster");
  }
  // Remove the arbitrary global phase so samples of one direction cluster.
  CMatrix x = samples;
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const double mag = std::abs(x(0, t));
    if (mag > 0.0) x.col(t) *= std::conj(x(0, t)) / mag;
  }
  const Eigen::Index n = x.rows();
  CMatrix centers(n, static_cast<Eigen::Index>(clusters));
  RVector dist = RVector::Constant(static_cast<Eigen::Index>(t_count),
                                   std::numeric_limits<double>::infinity());

  centers.col(0) = x.col(static_cast<Eigen::Index>(rng.index(t_count)));
  for (std::size_t c = 1; c <= clusters; ++c) {
    const CVector last = centers.col(static_cast<Eigen::Index>(c - 1));
    for (Eigen::Index t = 0; t < x.cols(); ++t) dist(t) = std::min(dist(t), (x.col(t) - last).squaredNorm());
    if (c == clusters) break;
    const double total = dist.sum();
    std::size_t pick = rng.index(t_count);
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (Eigen::Index t = 0; t < x.cols(); ++t) {
        u -= dist(t);
        if (u <= 0.0) {
          pick = static_cast<std::size_t>(t);
          break;
        }
      }
    }
    centers.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(pick));
  }

  std::vector<std::size_t> labels(t_count, 0);
  for (std::size_t it = 0; it <= iterations; ++it) {
    parallel_for(t_count, [&](std::size_t t) {
      const auto col = static_cast<Eigen::Index>(t);
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < centers.cols(); ++c) {
        const double d = (x.col(col) - centers.col(c)).squaredNorm();
        if (d < best) {
          best = d;
          labels[t] = static_cast<std::size_t>(c);
        }
      }
    });
    if (it == iterations) break;
    CMatrix sums = CMatrix::Zero(n, centers.cols());
    std::vector<std::size_t> counts(clusters, 0);
    for (std::size_t t = 0; t < t_count; ++t) {
      sums.col(static_cast<Eigen::Index>(labels[t])) += x.col(static_cast<Eigen::Index>(t));
      ++counts[labels[t]];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] > 0) {
        centers.col(static_cast<Eigen::Index>(c)) = sums.col(static_cast<Eigen::Index>(c)) /
                                                    static_cast<double>(counts[c]);
      } else {
        centers.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(rng.index(t_count)));
      }
    }
  }
  return labels;
}

namespace {

void add_regularization(CMatrix& c, double reg) {
  const double level = std::max(c.trace().real() / static_cast<double>(c.rows()),
                                std::numeric_limits<double>::min());
  c.diagonal().array() += reg * level;
}

// Expected complete-data objective of one component, up to constants:
// -(log det C + tr(C^{-1} S)) per unit weight.
double component_objective(const CMatrix& c, const CMatrix& scatter) {
  const HermitianFactor f(c);
  return -(f.log_det() + f.solve(scatter).trace().real());
}

constexpr std::size_t kGridInitSteps = 20;
constexpr std::size_t kGridSteps = 5;

// `grid` carries the Toeplitz parametrization between M-steps; an empty grid
// is seeded from the scatter.
void structure_covariance(GmmModel& model, std::size_t k, const CMatrix& scatter, double reg, RVector& grid) {
  switch (model.structure) {
    case CovarianceStructure::Full: {
      CMatrix c = hermitian_part(scatter);
      add_regularization(c, reg);
      model.covariances[k] = c;
      break;
    }
    case CovarianceStructure::Toeplitz: {
      std::size_t steps = kGridSteps;
      if (grid.size() == 0) {
        grid = toeplitz_grid_init(scatter);
        grid.array() += reg * std::max(grid.mean(), std::numeric_limits<double>::min());
        steps = kGridInitSteps;
      }
      for (std::size_t i = 0; i < steps; ++i) grid = toeplitz_grid_step(grid, scatter);
      grid.array() += reg * std::max(grid.mean(), std::numeric_limits<double>::min());
      model.covariances[k] = toeplitz_from_grid(grid);
      break;
    }
    case CovarianceStructure::Circulant: {
      RVector spec = circulant_spectrum(scatter);
      spec.array() += reg * std::max(spec.mean(), std::numeric_limits<double>::min());
      model.spectra[k] = spec;
      model.covariances[k] = circulant_from_spectrum(spec);
      break;
    }
  }
}

GmmModel initialize_gmm(const CMatrix& samples, std::size_t components, CovarianceStructure structure,
                        const EmOptions& options, Rng& rng, std::vector<RVector>& grids) {
  const auto t_count = samples.cols();
  const std::vector<std::size_t> labels = kmeans_labels(samples, components, options.kmeans_iter, rng);
  GmmModel model;
  model.structure = structure;
  model.weights = RVector::Zero(static_cast<Eigen::Index>(components));
  model.covariances.resize(components);
  if (structure == CovarianceStructure::Circulant) model.spectra.resize(components);
  for (std::size_t k = 0; k < components; ++k) {
    RVector gamma = RVector::Zero(t_count);
    for (Eigen::Index t = 0; t < t_count; ++t) gamma(t) = labels[static_cast<std::size_t>(t)] == k ? 1.0 : 0.0;
    if (gamma.sum() < 1.0) gamma(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(t_count)))) = 1.0;
    model.weights(static_cast<Eigen::Index>(k)) = gamma.sum();
    CMatrix scatter = weighted_scatter(samples, gamma);
    // Tiny clusters give singular scatters; blend in the global level.
    const double level = samples.colwise().squaredNorm().mean() / static_cast<double>(samples.rows());
    scatter.diagonal().array() += 1e-3 * level;
    structure_covariance(model, k, scatter, options.regularization, grids[k]);
  }
  model.weights /= model.weights.sum();
  return model;
}

}  // namespace

double GmmModel::log_likelihood(const CMatrix& samples) const {
  RMatrix ld = component_log_densities(weights, covariances, samples);
  return normalize_responsibilities(ld) / static_cast<double>(samples.cols());
}

GmmModel fit_gmm(const CMatrix& samples, std::size_t components, CovarianceStructure structure,
                 const EmOptions& options, Rng& rng, FitReport* report) {
  if (components == 0) throw std::invalid_argument("fit_gmm: K must be >= 1");
  const auto t_count = static_cast<std::size_t>(samples.cols());
  if (t_count < 10 * components) throw std::invalid_argument("fit_gmm: need T >= 10 K samples");

  std::vector<RVector> grids(components);
  GmmModel model = initialize_gmm(samples, components, structure, options, rng, grids);
  FitReport local;
  double previous = -std::numeric_limits<double>::infinity();
  const double collapse = 1.0 / (100.0 * static_cast<double>(t_count));

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    RMatrix gamma = component_log_densities(model.weights, model.covariances, samples);
    const double ll = normalize_responsibilities(gamma) / static_cast<double>(t_count);
    if (!std::isfinite(ll)) throw NumericalError("fit_gmm: non-finite log-likelihood");
    local.log_likelihood.push_back(ll);
    local.iterations = it + 1;
    if (it > 0 && std::abs(ll - previous) <= options.tol * std::abs(previous)) {
      local.converged = true;
      break;
    }
    previous = ll;

    const RVector nk = gamma.colwise().sum().transpose();
    std::vector<std::size_t> collapsed;
    parallel_for(components, [&](std::size_t k) {
      const auto col = static_cast<Eigen::Index>(k);
      if (nk(col) / static_cast<double>(t_count) < collapse) return;
      const CMatrix scatter = weighted_scatter(samples, gamma.col(col));
      const CMatrix old = model.covariances[k];
      const RVector old_spec = model.spectra.empty() ? RVector() : model.spectra[k];
      const RVector old_grid = grids[k];
      const double before = component_objective(old, scatter);
      structure_covariance(model, k, scatter, options.regularization, grids[k]);
      // Generalized EM: never accept a structured step that lowers the objective.
      if (component_objective(model.covariances[k], scatter) < before) {
        model.covariances[k] = old;
        grids[k] = old_grid;
        if (old_spec.size() > 0) model.spectra[k] = old_spec;
      }
    });
    for (std::size_t k = 0; k < components; ++k) {
      if (nk(static_cast<Eigen::Index>(k)) / static_cast<double>(t_count) < collapse) collapsed.push_back(k);
    }
    model.weights = nk / static_cast<double>(t_count);
    for (std::size_t k : collapsed) {
      const CVector h = samples.col(static_cast<Eigen::Index>(rng.index(t_count)));
      CMatrix c = h * h.adjoint();
      c.diagonal().array() += 0.1 * std::max(h.squaredNorm() / static_cast<double>(h.size()), 1e-12);
      if (model.structure == CovarianceStructure::Circulant) {
        model.spectra[k] = circulant_spectrum(c);
        model.covariances[k] = circulant_from_spectrum(model.spectra[k]);
      } else if (model.structure == CovarianceStructure::Toeplitz) {
        grids[k] = toeplitz_grid_init(c);
        model.covariances[k] = toeplitz_from_grid(grids[k]);
      } else {
        model.covariances[k] = c;
      }
      model.weights(static_cast<Eigen::Index>(k)) = 1.0 / static_cast<double>(components);
      log_warning("fit_gmm: component " + std::to_string(k) + " collapsed at iteration " +
                  std::to_string(it) + "; reinitialized from a random sample");
    }
    if (!collapsed.empty()) {
      model.weights /= model.weights.sum();
      local.reinit_iterations.push_back(it);
    }
  }
  if (report != nullptr) *report = std::move(local);
  return model;
}

}  // namespace qce
