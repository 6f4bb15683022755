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

#include "qce/quantized_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qce/bussgang.hpp"
#include "qce/log.hpp"
#include "qce/numeric.hpp"
#include "qce/parallel.hpp"

namespace qce {

CMatrix one_bit_reduce(const CMatrix& r) {
  const double s = 1.0 / std::sqrt(2.0);
  return r.unaryExpr([s](const Complex& v) {
    return Complex(v.real() < 0.0 ? -s : s, v.imag() < 0.0 ? -s : s);
  });
}

namespace {

RVector normalized_weights(const RVector& weights, Eigen::Index count) {
  if (weights.size() == 0) return RVector::Constant(count, 1.0 / static_cast<double>(count));
  if (weights.size() != count) throw std::invalid_argument("weights length must equal sample count");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("weights must be nonnegative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw std::invalid_argument("weights must not all be zero");
  return weights / total;
}

double effective_count(const RVector& w) {
  const double sq = w.squaredNorm();
  return sq > 0.0 ? 1.0 / sq : 1.0;
}

}  // namespace

CMatrix recover_correlation(const CMatrix& r, const RVector& weights) {
  if (r.cols() < 2) throw std::invalid_argument("recover_correlation: need T >= 2");
  const RVector w = normalized_weights(weights, r.cols());
  const CMatrix c1 = weighted_scatter(one_bit_reduce(r), w);
  CMatrix out = c1.unaryExpr([](const Complex& v) {
    return Complex(std::sin(kPi / 2.0 * v.real()), std::sin(kPi / 2.0 * v.imag()));
  });
  out.diagonal().setOnes();
  return out;
}

VarianceSolve solve_half_normal(const std::vector<double>& thresholds,
                                const std::vector<double>& probabilities, double effective_count,
                                const GaussNewtonOptions& options) {
  if (thresholds.empty() || thresholds.size() != probabilities.size()) {
    throw std::invalid_argument("solve_half_normal: need matching, non-empty thresholds and probabilities");
  }
  const std::size_t m = thresholds.size();
  const double lo_p = 1.0 / (2.0 * std::max(effective_count, 1.0));

  // Initial point from the equation at the largest threshold.
  std::size_t top = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (thresholds[i] > thresholds[top]) top = i;
  }
  const double p_top = std::clamp(probabilities[top], lo_p, 1.0 - lo_p);
  VarianceSolve out;
  out.xi = std::max(thresholds[top] / (std::sqrt(2.0) * erf_inv(p_top)), options.min_xi);

  bool informative = false;
  for (double p : probabilities) informative = informative || (p > 0.0 && p < 1.0);
  if (!informative) {
    out.identifiable = false;
    out.variance = 2.0 * out.xi * out.xi;
    return out;
  }

  auto sse = [&](double xi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = std::erf(thresholds[i] / (std::sqrt(2.0) * xi)) - probabilities[i];
      acc += e * e;
    }
    return acc;
  };

  double xi = out.xi;
  double cost = sse(xi);
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    double jtj = 0.0;
    double jte = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double u = thresholds[i] / (std::sqrt(2.0) * xi);
      const double e = std::erf(u) - probabilities[i];
      const double j = -2.0 / std::sqrt(kPi) * std::exp(-u * u) * u / xi;
      jtj += j * j;
      jte += j * e;
    }
    out.iterations = it + 1;
    if (!(jtj > 0.0)) break;
    double step = -jte / jtj;
    double next = std::max(xi + step, options.min_xi);
    double next_cost = sse(next);
    for (std::size_t h = 0; h < options.max_halvings && next_cost > cost; ++h) {
      step *= 0.5;
      next = std::max(xi + step, options.min_xi);
      next_cost = sse(next);
    }
    if (next_cost > cost) {
      // No descent along the Gauss-Newton direction: xi is a stationary point.
      out.converged = true;
      break;
    }
    const double change = std::abs(next * next - xi * xi);
    xi = next;
    cost = next_cost;
    if (change < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    log_warning("solve_half_normal: no convergence after " + std::to_string(options.max_iter) +
                " iterations; returning the last iterate");
  }
  out.xi = xi;
  out.variance = 2.0 * xi * xi;
  return out;
}

namespace {

void require_multibit(const QuantizerSpec& q, const char* who) {
  if (q.is_infinite() || q.bits < 2) {
    throw std::invalid_argument(std::string(who) +
                                ": variance recovery needs a finite quantizer with at least 2 bits");
  }
}

// Weighted fraction of |Re| and |Im| below each positive threshold, per entry.
// Returns a (rows x thresholds) pair of matrices for real and imaginary parts.
void threshold_probabilities(const CMatrix& r, const RVector& w, const std::vector<double>& tau,
                             RMatrix& p_re, RMatrix& p_im) {
  const auto n = r.rows();
  const auto m = static_cast<Eigen::Index>(tau.size());
  p_re = RMatrix::Zero(n, m);
  p_im = RMatrix::Zero(n, m);
  for (Eigen::Index t = 0; t < r.cols(); ++t) {
    if (w(t) == 0.0) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = std::abs(r(i, t).real());
      const double im = std::abs(r(i, t).imag());
      for (Eigen::Index j = 0; j < m; ++j) {
        if (re < tau[static_cast<std::size_t>(j)]) p_re(i, j) += w(t);
        if (im < tau[static_cast<std::size_t>(j)]) p_im(i, j) += w(t);
      }
    }
  }
}

}  // namespace

VarianceRecovery recover_variances(const CMatrix& r, const RVector& weights, const QuantizerSpec& q,
                                   bool shared_variance, const GaussNewtonOptions& options) {
  require_multibit(q, "recover_variances");
  const std::vector<double> tau = q.positive_thresholds();
  if (tau.empty()) throw std::invalid_argument("recover_variances: quantizer has no positive threshold");
  const RVector w = normalized_weights(weights, r.cols());
  const double t_eff = effective_count(w);
  RMatrix p_re, p_im;
  threshold_probabilities(r, w, tau, p_re, p_im);

  const auto n = r.rows();
  VarianceRecovery out;
  out.variances.resize(n);
  if (shared_variance) {
    std::vector<double> th, pr;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < tau.size(); ++j) {
        th.push_back(tau[j]);
        pr.push_back(p_re(i, static_cast<Eigen::Index>(j)));
        th.push_back(tau[j]);
        pr.push_back(p_im(i, static_cast<Eigen::Index>(j)));
      }
    }
    out.solves.push_back(solve_half_normal(th, pr, t_eff * static_cast<double>(n), options));
    out.variances.setConstant(out.solves.front().variance);
    return out;
  }
  out.solves.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    std::vector<double> th, pr;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      th.push_back(tau[j]);
      pr.push_back(p_re(row, static_cast<Eigen::Index>(j)));
      th.push_back(tau[j]);
      pr.push_back(p_im(row, static_cast<Eigen::Index>(j)));
    }
    out.solves[i] = solve_half_normal(th, pr, t_eff, options);
    out.variances(row) = out.solves[i].variance;
  });
  return out;
}

CMatrix recover_covariance(const CMatrix& r, const RVector& weights, const QuantizerSpec& q,
                           bool shared_variance, const GaussNewtonOptions& options) {
  require_multibit(q, "recover_covariance");
  const CMatrix corr = recover_correlation(r, weights);
  const RVector sd = recover_variances(r, weights, q, shared_variance, options).variances.cwiseSqrt();
  return sd.cast<Complex>().asDiagonal() * corr * sd.cast<Complex>().asDiagonal();
}

CMatrix training_quantized_covariance(const CMatrix& c_y, const QuantizerSpec& q) {
  CMatrix c_r = quantized_covariance(c_y, q, CovarianceMode::ExactDiagonal);
  const double lo = min_eigenvalue(c_r);
  const double trace = c_r.trace().real();
  if (lo < -1e-8 * trace / static_cast<double>(c_r.rows())) {
    log_warning("fit_gmm_quantized: quantized covariance indefinite (min eigenvalue " +
                std::to_string(lo) + "); clamped");
    c_r = project_psd(c_r);
  }
  return c_r;
}

namespace {

// Algorithm-style M-step for one component: recover C_y, subtract noise,
// project onto the PSD cone.
CMatrix channel_covariance_from(const CMatrix& r, const RVector& gamma, const QuantizerSpec& q,
                                double sigma2, double reg) {
  CMatrix c_y = recover_covariance(r, gamma, q, false);
  c_y.diagonal().array() -= sigma2;
  CMatrix c_h = project_psd(c_y);
  const double level = std::max(c_h.trace().real() / static_cast<double>(c_h.rows()),
                                std::numeric_limits<double>::min());
  c_h.diagonal().array() += reg * level;
  return c_h;
}

CMatrix receive_quantized(const CMatrix& c_h, double sigma2, const QuantizerSpec& q) {
  CMatrix c_y = c_h;
  c_y.diagonal().array() += sigma2;
  return training_quantized_covariance(c_y, q);
}

}  // namespace

GmmModel fit_gmm_quantized(const CMatrix& r, std::size_t components, double sigma2,
                           const QuantizerSpec& q, const EmOptions& options, Rng& rng,
                           FitReport* report) {
  require_multibit(q, "fit_gmm_quantized");
  if (components == 0) throw std::invalid_argument("fit_gmm_quantized: K must be >= 1");
  if (sigma2 < 0.0) throw std::invalid_argument("fit_gmm_quantized: sigma2 must be >= 0");
  const auto t_count = static_cast<std::size_t>(r.cols());
  if (t_count < 10 * components) throw std::invalid_argument("fit_gmm_quantized: need T >= 10 K samples");

  GmmModel model;
  model.structure = CovarianceStructure::Full;
  model.weights = RVector::Zero(static_cast<Eigen::Index>(components));
  model.covariances.resize(components);
  std::vector<CMatrix> c_r(components);
  {
    const std::vector<std::size_t> labels = kmeans_labels(r, components, options.kmeans_iter, rng);
    for (std::size_t k = 0; k < components; ++k) {
      RVector gamma = RVector::Zero(r.cols());
      for (Eigen::Index t = 0; t < r.cols(); ++t) gamma(t) = labels[static_cast<std::size_t>(t)] == k ? 1.0 : 0.0;
      while (gamma.sum() < 2.0) gamma(static_cast<Eigen::Index>(rng.index(t_count))) = 1.0;
      model.weights(static_cast<Eigen::Index>(k)) = gamma.sum();
      model.covariances[k] = channel_covariance_from(r, gamma, q, sigma2, options.regularization);
      c_r[k] = receive_quantized(model.covariances[k], sigma2, q);
    }
    model.weights /= model.weights.sum();
  }

  FitReport local;
  double previous = -std::numeric_limits<double>::infinity();
  const double collapse = 1.0 / (100.0 * static_cast<double>(t_count));
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    RMatrix gamma = component_log_densities(model.weights, c_r, r);
    const double ll = normalize_responsibilities(gamma) / static_cast<double>(t_count);
    if (!std::isfinite(ll)) throw NumericalError("fit_gmm_quantized: non-finite log-likelihood");
    local.log_likelihood.push_back(ll);
    local.iterations = it + 1;
    if (it > 0 && std::abs(ll - previous) <= options.tol * std::abs(previous)) {
      local.converged = true;
      break;
    }
    previous = ll;

    const RVector nk = gamma.colwise().sum().transpose();
    std::vector<char> collapsed(components, 0);
    for (std::size_t k = 0; k < components; ++k) {
      collapsed[k] = nk(static_cast<Eigen::Index>(k)) / static_cast<double>(t_count) < collapse ? 1 : 0;
    }
    parallel_for(components, [&](std::size_t k) {
      if (collapsed[k]) return;
      model.covariances[k] =
          channel_covariance_from(r, gamma.col(static_cast<Eigen::Index>(k)), q, sigma2, options.regularization);
      c_r[k] = receive_quantized(model.covariances[k], sigma2, q);
    });
    model.weights = nk / static_cast<double>(t_count);
    bool reinit = false;
    for (std::size_t k = 0; k < components; ++k) {
      if (!collapsed[k]) continue;
      // Reseed from a random subset a tenth of the data size.
      RVector g = RVector::Zero(r.cols());
      const std::size_t pick = std::max<std::size_t>(t_count / (10 * components), 2);
      for (std::size_t s = 0; s < pick; ++s) g(static_cast<Eigen::Index>(rng.index(t_count))) = 1.0;
      model.covariances[k] = channel_covariance_from(r, g, q, sigma2, 0.1);
      c_r[k] = receive_quantized(model.covariances[k], sigma2, q);
      model.weights(static_cast<Eigen::Index>(k)) = 1.0 / static_cast<double>(components);
      reinit = true;
      log_warning("fit_gmm_quantized: component " + std::to_string(k) + " collapsed at iteration " +
                  std::to_string(it) + "; reinitialized");
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
