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
#include <string>
#include <vector>

#include "qce/frontend.hpp"
#include "qce/random.hpp"
#include "qce/types.hpp"

namespace qce {

inline constexpr double kDefaultAngleSpreadDeg = 2.0;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Propagation clusters of one 3GPP-style channel realization.
struct ClusterParams {
  std::vector<double> angles;  // mean angles in [0, 2 pi)
  std::vector<double> gains;   // nonnegative, sum to one
  double angle_spread = deg_to_rad(kDefaultAngleSpreadDeg);  // Laplacian std per cluster [rad]

  std::size_t count() const { return angles.size(); }
};

ClusterParams draw_cluster_params(Rng& rng, std::size_t num_clusters,
                                  double angle_spread = deg_to_rad(kDefaultAngleSpreadDeg));

// ULA steering vector t(gamma)_n = exp(j pi n sin(gamma)).
CVector steering_vector(double angle, std::size_t antennas);

// Spatial covariance of a ULA for a power angular density that is a
// gain-weighted sum of Laplace densities, normalized to trace N. The matrix
// is Hermitian Toeplitz and PSD (negative rounding eigenvalues clamped).
struct GenieCovariance {
  CMatrix matrix;
  CMatrix factor;  // matrix = factor * factor^H
  ClusterParams params;
};

GenieCovariance genie_covariance(const ClusterParams& params, std::size_t antennas);

// Symmetric square-root factor L with cov = L L^H, valid for singular PSD input.
CMatrix psd_factor(const CMatrix& cov);

struct ScenarioConfig {
  std::string name = "3gpp";
  std::size_t antennas = 16;
  std::size_t clusters = 1;
  double angle_spread_deg = kDefaultAngleSpreadDeg;
};

// Channel samples stored column-wise: samples is N x T, column t = h_t.
struct ChannelDataset {
  CMatrix samples;
  std::vector<ClusterParams> params;  // per-sample clusters; empty if not simulated
  ScenarioConfig scenario;
  std::uint64_t seed = 0;

  std::size_t antennas() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(samples.cols()); }
};

// h = L w with w ~ CN(0, I); L from psd_factor.
ChannelDataset sample_channels(const GenieCovariance& cov, std::size_t count, Rng& rng);
ChannelDataset sample_channels(const CMatrix& cov, std::size_t count, Rng& rng);

// Fresh clusters per sample, then one channel per cluster draw. Sample t uses
// rng.substream(t), so the dataset is identical for any thread count.
ChannelDataset build_dataset_H(const ScenarioConfig& scenario, std::size_t count, const Rng& rng);

// Quantized pilot observations, column t = r_t = Q(A h_t + n_t) (length N P).
struct QuantizedDataset {
  CMatrix observations;
  std::size_t antennas = 0;
  PilotConfig pilots;
  double sigma2 = 0.0;
  QuantizerSpec quantizer;

  std::size_t size() const { return static_cast<std::size_t>(observations.cols()); }
};

QuantizedDataset observe_dataset(const ChannelDataset& channels, const PilotConfig& pilots,
                                 double sigma2, const QuantizerSpec& q, const Rng& rng);

QuantizedDataset build_dataset_R(const ScenarioConfig& scenario, std::size_t count, double snr_db,
                                 const QuantizerSpec& q, const PilotConfig& pilots, const Rng& rng);

// Sample covariance (1/T) sum h h^H of a column-wise sample matrix.
CMatrix sample_covariance(const CMatrix& samples);

}  // namespace qce
