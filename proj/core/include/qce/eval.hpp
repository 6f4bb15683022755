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
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "qce/channels.hpp"
#include "qce/frontend.hpp"
#include "qce/mixtures.hpp"
#include "qce/mlp.hpp"
#include "qce/types.hpp"
#include "qce/vae.hpp"

namespace qce {

// (1 / (N T)) sum_t ||h_t - h_hat_t||^2 over column-wise batches.
double nmse(const CMatrix& truth, const CMatrix& estimate);

struct RateBound {
  double rate = 0.0;          // bits/s/Hz
  Complex mean_gain;          // sample mean of g^H B h
  double mean_gain_stderr = 0.0;
  double signal = 0.0;        // |E[g^H B h]|^2
  double interference = 0.0;  // var[g^H B h] + E[g^H C_q g]
  std::size_t used = 0;
  std::size_t excluded = 0;   // samples with a zero estimate
};

// Use-and-then-forget bound for the data model r = Q(h s + n) with MRC
// g = h_hat / ||h_hat||^2. B and C_r come from C_y = c_h + sigma2 I and
// C_q = C_r - B c_h B. Expectations are sample means over the columns.
RateBound rate_lower_bound(const CMatrix& estimates, const CMatrix& truths, double sigma2,
                           const QuantizerSpec& q, const CMatrix& c_h);

enum class EstimatorKind { BussGenie, BussScov, Bls, Bgmm, Bmfa, Bvae, Dnn };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string& name);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::BussGenie;
  std::string label;  // CSV estimator id; defaults to to_string(kind)
  std::shared_ptr<const GmmModel> gmm;
  std::shared_ptr<const MfaModel> mfa;
  std::shared_ptr<const VaeModel> vae;
  std::shared_ptr<const MlpParams> dnn;
  // Trained for one bit width only (e.g. models learned from quantized data);
  // -1 accepts every width.
  int bits_only = -1;
  // Trained for one noise level only; NaN accepts every SNR.
  double snr_only = std::numeric_limits<double>::quiet_NaN();

  std::string id() const { return label.empty() ? to_string(kind) : label; }
};

struct SweepConfig {
  ScenarioConfig scenario;
  std::size_t pilots = 1;
  std::vector<int> bits{1};  // 0 = infinite resolution
  std::vector<double> snr_db{0.0};
  std::size_t t_test = 1000;
  std::vector<EstimatorSpec> estimators;
  CMatrix train_covariance;  // sample covariance for buss_scov / bls
  std::uint64_t seed = 0;
  bool record_timing = false;  // off keeps the CSV byte-reproducible
};

struct EvalRecord {
  std::string estimator;
  std::string scenario;
  double snr_db = 0.0;
  int bits = 0;
  std::size_t pilots = 1;
  std::size_t antennas = 0;
  std::size_t K = 0;
  std::size_t L = 0;
  double nmse = 0.0;
  double rate_lb = 0.0;
  std::size_t t_test = 0;
  double seconds = 0.0;
  std::size_t excluded = 0;
};

// Every estimator sees the same test channels and, per (bits, SNR) cell, the
// same observations. Rows are ordered bits, SNR, estimator.
std::vector<EvalRecord> run_sweep(const SweepConfig& config);

inline constexpr const char* kResultsHeader =
    "estimator,scenario,snr_db,bits,pilots,antennas,K,L,nmse,rate_lb,t_test,seconds";

void write_results_csv(std::ostream& out, const std::vector<EvalRecord>& records);

// Noise-free covariance recovery: per trial one genie covariance, T samples
// h ~ CN(0, C), r = Q_B(h). The same channel draws are reused for every B.
struct RecoveryConfig {
  ScenarioConfig scenario;
  std::vector<int> bits{2, 3};
  std::vector<std::size_t> sizes{1000, 100000};
  std::size_t trials = 20;
  std::uint64_t seed = 0;
};

struct RecoveryRecord {
  std::string method;  // recovered, scov_quant, scov_unquant
  int bits = 0;
  std::size_t samples = 0;
  std::size_t trial = 0;
  double nmse = 0.0;  // ||C - C_hat||_F^2 / ||C||_F^2
  std::vector<std::size_t> iterations;  // Gauss-Newton iterations per entry (recovered only)
  std::size_t converged = 0;            // entries whose solve converged
};

std::vector<RecoveryRecord> run_recovery(const RecoveryConfig& config);

inline constexpr const char* kRecoveryHeader = "method,bits,samples,trial,nmse,mean_iterations,converged";

void write_recovery_csv(std::ostream& out, const std::vector<RecoveryRecord>& records);

}  // namespace qce
