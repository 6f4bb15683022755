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

#include "qce/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "qce/bussgang.hpp"
#include "qce/filter_bank.hpp"
#include "qce/log.hpp"
#include "qce/parallel.hpp"
#include "qce/quantized_learning.hpp"

namespace qce {

double nmse(const CMatrix& truth, const CMatrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw std::invalid_argument("nmse: shape mismatch");
  }
  if (truth.size() == 0) throw std::invalid_argument("nmse: empty batch");
  // Per-column sums keep the result independent of the column order up to rounding.
  const RVector err = (truth - estimate).colwise().squaredNorm().transpose();
  return err.sum() / static_cast<double>(truth.size());
}

RateBound rate_lower_bound(const CMatrix& estimates, const CMatrix& truths, double sigma2,
                           const QuantizerSpec& q, const CMatrix& c_h) {
  const Eigen::Index n = truths.rows();
  if (estimates.rows() != n || estimates.cols() != truths.cols()) {
    throw std::invalid_argument("rate_lower_bound: shape mismatch");
  }
  if (c_h.rows() != n || c_h.cols() != n) throw std::invalid_argument("rate_lower_bound: C_h must be N x N");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("rate_lower_bound: sigma2 must be positive");

  const BussgangContext ctx = BussgangContext::make(c_h, make_pilots(1), sigma2, q);
  const CVector gain = ctx.gain.cast<Complex>();
  const CMatrix c_q = ctx.c_r - gain.asDiagonal() * c_h * gain.asDiagonal();

  RateBound out;
  std::vector<Complex> x;
  double noise = 0.0;
  for (Eigen::Index t = 0; t < truths.cols(); ++t) {
    const double norm2 = estimates.col(t).squaredNorm();
    if (norm2 == 0.0) {
      ++out.excluded;
      continue;
    }
    const CVector g = estimates.col(t) / norm2;
    x.push_back(g.dot(gain.cwiseProduct(truths.col(t))));
    noise += g.dot(c_q * g).real();
  }
  if (out.excluded > 0) log_warning("rate_lower_bound: excluded " + std::to_string(out.excluded) + " zero estimates");
  out.used = x.size();
  if (x.empty()) return out;
  const double count = static_cast<double>(x.size());
  Complex mean = 0.0;
  for (const Complex& v : x) mean += v;
  mean /= count;
  double var = 0.0;
  for (const Complex& v : x) var += std::norm(v - mean);
  var /= count;
  out.mean_gain = mean;
  out.mean_gain_stderr = std::sqrt(var / count);
  out.signal = std::norm(mean);
  out.interference = var + noise / count;
  out.rate = out.interference > 0.0 ? std::log2(1.0 + out.signal / out.interference) : 0.0;
  if (!std::isfinite(out.rate)) throw NumericalError("rate_lower_bound: non-finite rate");
  out.rate = std::max(out.rate, 0.0);
  return out;
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::BussGenie: return "buss_genie";
    case EstimatorKind::BussScov: return "buss_scov";
    case EstimatorKind::Bls: return "bls";
    case EstimatorKind::Bgmm: return "bgmm";
    case EstimatorKind::Bmfa: return "bmfa";
    case EstimatorKind::Bvae: return "bvae";
    case EstimatorKind::Dnn: return "dnn";
  }
  return "unknown";
}

EstimatorKind parse_estimator(const std::string& name) {
  for (EstimatorKind k : {EstimatorKind::BussGenie, EstimatorKind::BussScov, EstimatorKind::Bls,
                          EstimatorKind::Bgmm, EstimatorKind::Bmfa, EstimatorKind::Bvae, EstimatorKind::Dnn}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

namespace {

void require(bool ok, const EstimatorSpec& spec, const char* what) {
  if (!ok) throw std::invalid_argument("estimator " + spec.id() + ": " + what);
}

struct Cell {
  const CMatrix* truths;
  const std::vector<ClusterParams>* params;
  CMatrix r;
  PilotConfig pilots;
  double sigma2;
  QuantizerSpec q;
  int bits;
};

CMatrix run_estimator(const EstimatorSpec& spec, const Cell& cell, const SweepConfig& cfg) {
  const auto n = static_cast<std::size_t>(cell.truths->rows());
  switch (spec.kind) {
    case EstimatorKind::BussGenie:
      return estimate_buss_genie(cell.r, *cell.params, n, cell.pilots, cell.sigma2, cell.q);
    case EstimatorKind::BussScov:
      require(cfg.train_covariance.rows() == static_cast<Eigen::Index>(n), spec, "needs a training covariance");
      return estimate_buss_scov(cell.r, cfg.train_covariance, cell.pilots, cell.sigma2, cell.q);
    case EstimatorKind::Bls:
      require(cfg.train_covariance.rows() == static_cast<Eigen::Index>(n), spec, "needs a training covariance");
      return estimate_bls(cell.r, cfg.train_covariance, cell.pilots, cell.sigma2, cell.q);
    case EstimatorKind::Bgmm:
      require(spec.gmm != nullptr, spec, "no GMM model");
      return estimate_bgmm(*spec.gmm, cell.r, cell.pilots, cell.sigma2, cell.q);
    case EstimatorKind::Bmfa:
      require(spec.mfa != nullptr, spec, "no MFA model");
      return estimate_bmfa(*spec.mfa, cell.r, cell.pilots, cell.sigma2, cell.q);
    case EstimatorKind::Bvae:
      require(spec.vae != nullptr, spec, "no VAE model");
      return estimate_bvae(*spec.vae, cell.r, cell.pilots, cell.sigma2, cell.q);
    case EstimatorKind::Dnn:
      require(spec.dnn != nullptr, spec, "no DNN model");
      return estimate_dnn(*spec.dnn, cell.r);
  }
  throw std::invalid_argument("unknown estimator kind");
}

std::size_t components_of(const EstimatorSpec& s) {
  if (s.gmm) return s.gmm->components();
  if (s.mfa) return s.mfa->components();
  return 0;
}

std::size_t latent_of(const EstimatorSpec& s) {
  if (s.mfa) return s.mfa->latent_dim();
  if (s.vae) return s.vae->arch.latent;
  return 0;
}

}  // namespace

std::vector<EvalRecord> run_sweep(const SweepConfig& config) {
  if (config.t_test == 0) throw std::invalid_argument("run_sweep: t_test must be positive");
  if (config.pilots == 0) throw std::invalid_argument("run_sweep: pilots must be positive");
  const Rng root(config.seed);
  const ChannelDataset test = build_dataset_H(config.scenario, config.t_test, root.substream(1));
  const CMatrix c_h = sample_covariance(test.samples);
  const PilotConfig pilots = make_pilots(config.pilots);

  std::vector<EvalRecord> records;
  for (std::size_t bi = 0; bi < config.bits.size(); ++bi) {
    const int bits = config.bits[bi];
    for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
      const double snr = config.snr_db[si];
      Cell cell;
      cell.truths = &test.samples;
      cell.params = &test.params;
      cell.pilots = pilots;
      cell.sigma2 = snr_db_to_sigma2(snr);
      cell.bits = bits;
      cell.q = bits == 0 ? QuantizerSpec::infinite() : make_quantizer(bits, cell.sigma2);
      const Rng noise = root.substream(2).substream(bi).substream(si);
      cell.r = observe_dataset(test, pilots, cell.sigma2, cell.q, noise).observations;

      for (const EstimatorSpec& spec : config.estimators) {
        if (spec.bits_only >= 0 && spec.bits_only != bits) continue;
        if (!std::isnan(spec.snr_only) && spec.snr_only != snr) continue;
        const auto start = std::chrono::steady_clock::now();
        const CMatrix estimate = run_estimator(spec, cell, config);
        const auto stop = std::chrono::steady_clock::now();
        const RateBound rate = rate_lower_bound(estimate, test.samples, cell.sigma2, cell.q, c_h);

        EvalRecord rec;
        rec.estimator = spec.id();
        rec.scenario = config.scenario.name;
        rec.snr_db = snr;
        rec.bits = bits;
        rec.pilots = config.pilots;
        rec.antennas = config.scenario.antennas;
        rec.K = components_of(spec);
        rec.L = latent_of(spec);
        rec.nmse = nmse(test.samples, estimate);
        rec.rate_lb = rate.rate;
        rec.t_test = config.t_test;
        rec.excluded = rate.excluded;
        if (config.record_timing) rec.seconds = std::chrono::duration<double>(stop - start).count();
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

void write_results_csv(std::ostream& out, const std::vector<EvalRecord>& records) {
  out << kResultsHeader << '\n';
  char buf[512];
  for (const EvalRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%s,%zu,%zu,%zu,%zu,%.10e,%.10e,%zu,%.6f\n", r.estimator.c_str(),
                  r.scenario.c_str(), r.snr_db, r.bits == 0 ? "inf" : std::to_string(r.bits).c_str(), r.pilots,
                  r.antennas, r.K, r.L, r.nmse, r.rate_lb, r.t_test, r.seconds);
    out << buf;
  }
}

std::vector<RecoveryRecord> run_recovery(const RecoveryConfig& config) {
  if (config.trials == 0) throw std::invalid_argument("run_recovery: trials must be positive");
  for (int b : config.bits) {
    if (b < 2) throw std::invalid_argument("run_recovery: variance recovery needs at least 2 bits");
  }
  const Rng root(config.seed);
  const std::size_t n = config.scenario.antennas;
  std::vector<RecoveryRecord> records;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    Rng trial_rng = root.substream(trial);
    const ClusterParams params =
        draw_cluster_params(trial_rng, config.scenario.clusters, deg_to_rad(config.scenario.angle_spread_deg));
    const GenieCovariance cov = genie_covariance(params, n);
    const double norm2 = cov.matrix.squaredNorm();
    for (std::size_t si = 0; si < config.sizes.size(); ++si) {
      const std::size_t t = config.sizes[si];
      Rng sample_rng = trial_rng.substream(si + 1);
      const CMatrix h = sample_channels(cov, t, sample_rng).samples;

      RecoveryRecord unquant;
      unquant.method = "scov_unquant";
      unquant.samples = t;
      unquant.trial = trial;
      unquant.nmse = (sample_covariance(h) - cov.matrix).squaredNorm() / norm2;
      records.push_back(unquant);

      for (int bits : config.bits) {
        const QuantizerSpec q = make_quantizer(bits, 0.0);
        const CMatrix r = quantize(h, q);

        RecoveryRecord scov;
        scov.method = "scov_quant";
        scov.bits = bits;
        scov.samples = t;
        scov.trial = trial;
        scov.nmse = (sample_covariance(r) - cov.matrix).squaredNorm() / norm2;
        records.push_back(scov);

        const VarianceRecovery var = recover_variances(r, RVector(), q);
        const CMatrix corr = recover_correlation(r);
        const RVector sd = var.variances.cwiseSqrt();
        const CMatrix est = sd.cast<Complex>().asDiagonal() * corr * sd.cast<Complex>().asDiagonal();

        RecoveryRecord rec;
        rec.method = "recovered";
        rec.bits = bits;
        rec.samples = t;
        rec.trial = trial;
        rec.nmse = (est - cov.matrix).squaredNorm() / norm2;
        for (const VarianceSolve& s : var.solves) {
          rec.iterations.push_back(s.iterations);
          if (s.converged) ++rec.converged;
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

void write_recovery_csv(std::ostream& out, const std::vector<RecoveryRecord>& records) {
  out << kRecoveryHeader << '\n';
  char buf[256];
  for (const RecoveryRecord& r : records) {
    double mean_iter = 0.0;
    for (std::size_t i : r.iterations) mean_iter += static_cast<double>(i);
    if (!r.iterations.empty()) mean_iter /= static_cast<double>(r.iterations.size());
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%.10e,%.4f,%zu\n", r.method.c_str(),
                  r.bits == 0 ? "inf" : std::to_string(r.bits).c_str(), r.samples, r.trial, r.nmse, mean_iter,
                  r.converged);
    out << buf;
  }
}

}  // namespace qce
