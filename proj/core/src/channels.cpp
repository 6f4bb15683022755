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

#include "qce/channels.hpp"

#include <algorithm>
#include <cmath>

#include "qce/numeric.hpp"
#include "qce/parallel.hpp"

namespace qce {

ClusterParams draw_cluster_params(Rng& rng, std::size_t num_clusters, double angle_spread) {
  if (num_clusters == 0) {
    throw std::invalid_argument("draw_cluster_params: num_clusters must be >= 1");
  }
  ClusterParams p;
  p.angle_spread = angle_spread;
  p.angles.resize(num_clusters);
  p.gains.resize(num_clusters);
  double total = 0.0;
  for (std::size_t c = 0; c < num_clusters; ++c) {
    p.angles[c] = rng.uniform(0.0, 2.0 * kPi);
    p.gains[c] = rng.uniform();
    total += p.gains[c];
  }
  if (num_clusters == 1) {
    p.gains[0] = 1.0;
  } else {
    for (auto& g : p.gains) g /= total;
  }
  return p;
}

CVector steering_vector(double angle, std::size_t antennas) {
  CVector t(static_cast<Eigen::Index>(antennas));
  const double s = std::sin(angle);
  for (Eigen::Index n = 0; n < t.size(); ++n) t(n) = std::polar(1.0, kPi * static_cast<double>(n) * s);
  return t;
}

CMatrix psd_factor(const CMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(cov));
  if (eig.info() != Eigen::Success) throw NumericalError("psd_factor: eigendecomposition failed");
  const RVector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.cast<Complex>().asDiagonal();
}

GenieCovariance genie_covariance(const ClusterParams& params, std::size_t antennas) {
  if (antennas == 0) throw std::invalid_argument("genie_covariance: N must be >= 1");
  if (!(params.angle_spread > 0.0)) {
    throw std::invalid_argument("genie_covariance: angle_spread must be positive");
  }
  if (params.angles.size() != params.gains.size() || params.angles.empty()) {
    throw std::invalid_argument("genie_covariance: angles and gains must be non-empty and equal length");
  }
  const auto n = static_cast<Eigen::Index>(antennas);
  const double scale = params.angle_spread / std::sqrt(2.0);  // Laplace scale b
  const double half_width = std::min(kPi, 12.0 * params.angle_spread);
  const double max_spacing = std::min(scale / 10.0, 0.2 / (kPi * static_cast<double>(antennas)));
  auto half_points = static_cast<long>(std::ceil(half_width / max_spacing));
  half_points += half_points % 2;  // composite Simpson on each side of the kink at u = 0
  const double spacing = half_width / static_cast<double>(half_points);

  // Toeplitz: only the first column c(m) = int w(g) exp(j pi m sin g) dg is needed.
  CVector column = CVector::Zero(n);
  for (std::size_t c = 0; c < params.count(); ++c) {
    if (params.gains[c] <= 0.0) continue;
    CVector cluster = CVector::Zero(n);
    double mass = 0.0;
    for (long i = -half_points; i <= half_points; ++i) {
      const double u = static_cast<double>(i) * spacing;
      const long k = std::abs(i);
      const double simpson = k == half_points ? 1.0 : (k == 0 ? 2.0 : (k % 2 == 1 ? 4.0 : 2.0));
      const double w = std::exp(-std::abs(u) / scale) / (2.0 * scale) * spacing * simpson / 3.0;
      mass += w;
      const double s = std::sin(params.angles[c] + u);
      const Complex step = std::polar(1.0, kPi * s);
      Complex phase(1.0, 0.0);
      for (Eigen::Index m = 0; m < n; ++m) {
        cluster(m) += w * phase;
        phase *= step;
      }
    }
    column += (params.gains[c] / mass) * cluster;
  }

  CMatrix cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cov(i, j) = i >= j ? column(i - j) : std::conj(column(j - i));
    }
  }
  const double trace = cov.trace().real();
  cov *= static_cast<double>(antennas) / trace;

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("genie_covariance: eigendecomposition failed");
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-8 * cov.trace().real() / static_cast<double>(antennas)) {
    throw NumericalError("genie_covariance: quadrature produced an indefinite matrix");
  }
  GenieCovariance out;
  out.params = params;
  if (min_eig < 0.0) {
    const RVector clamped = eig.eigenvalues().cwiseMax(0.0);
    out.matrix = hermitian_part(eig.eigenvectors() * clamped.cast<Complex>().asDiagonal() *
                                eig.eigenvectors().adjoint());
    out.factor = eig.eigenvectors() * clamped.cwiseSqrt().cast<Complex>().asDiagonal();
  } else {
    out.matrix = cov;
    out.factor = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cast<Complex>().asDiagonal();
  }
  return out;
}

namespace {

ChannelDataset sample_with_factor(const CMatrix& factor, std::size_t count, Rng& rng) {
  const auto n = factor.rows();
  ChannelDataset out;
  out.samples.resize(n, static_cast<Eigen::Index>(count));
  for (std::size_t t = 0; t < count; ++t) {
    const CVector w = rng.complex_normal_vector(static_cast<std::size_t>(factor.cols()));
    out.samples.col(static_cast<Eigen::Index>(t)) = factor * w;
  }
  out.seed = rng.seed();
  return out;
}

}  // namespace

ChannelDataset sample_channels(const GenieCovariance& cov, std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("sample_channels: count must be >= 1");
  ChannelDataset out = sample_with_factor(cov.factor, count, rng);
  out.scenario.antennas = static_cast<std::size_t>(cov.matrix.rows());
  out.scenario.clusters = cov.params.count();
  return out;
}

ChannelDataset sample_channels(const CMatrix& cov, std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("sample_channels: count must be >= 1");
  ChannelDataset out = sample_with_factor(psd_factor(cov), count, rng);
  out.scenario.antennas = static_cast<std::size_t>(cov.rows());
  out.scenario.clusters = 0;
  return out;
}

ChannelDataset build_dataset_H(const ScenarioConfig& scenario, std::size_t count, const Rng& rng) {
  if (count == 0) throw std::invalid_argument("build_dataset_H: count must be >= 1");
  if (scenario.antennas == 0) throw std::invalid_argument("build_dataset_H: antennas must be >= 1");
  ChannelDataset out;
  out.scenario = scenario;
  out.seed = rng.seed();
  out.samples.resize(static_cast<Eigen::Index>(scenario.antennas), static_cast<Eigen::Index>(count));
  out.params.resize(count);
  const double spread = deg_to_rad(scenario.angle_spread_deg);
  parallel_for(count, [&](std::size_t t) {
    Rng local = rng.substream(t);
    ClusterParams params = draw_cluster_params(local, scenario.clusters, spread);
    const GenieCovariance cov = genie_covariance(params, scenario.antennas);
    const CVector w = local.complex_normal_vector(scenario.antennas);
    out.samples.col(static_cast<Eigen::Index>(t)) = cov.factor * w;
    out.params[t] = std::move(params);
  });
  return out;
}

QuantizedDataset observe_dataset(const ChannelDataset& channels, const PilotConfig& pilots,
                                 double sigma2, const QuantizerSpec& q, const Rng& rng) {
  QuantizedDataset out;
  out.antennas = channels.antennas();
  out.pilots = pilots;
  out.sigma2 = sigma2;
  out.quantizer = q;
  const auto rows = static_cast<Eigen::Index>(channels.antennas() * pilots.count());
  out.observations.resize(rows, static_cast<Eigen::Index>(channels.size()));
  parallel_for(channels.size(), [&](std::size_t t) {
    Rng local = rng.substream(t);
    out.observations.col(static_cast<Eigen::Index>(t)) =
        observe(channels.samples.col(static_cast<Eigen::Index>(t)), pilots, sigma2, q, local);
  });
  return out;
}

QuantizedDataset build_dataset_R(const ScenarioConfig& scenario, std::size_t count, double snr_db,
                                 const QuantizerSpec& q, const PilotConfig& pilots, const Rng& rng) {
  const ChannelDataset channels = build_dataset_H(scenario, count, rng.substream(0));
  return observe_dataset(channels, pilots, snr_db_to_sigma2(snr_db), q, rng.substream(1));
}

CMatrix sample_covariance(const CMatrix& samples) {
  const auto n = samples.rows();
  CMatrix cov = CMatrix::Zero(n, n);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(samples, 1.0 / static_cast<double>(samples.cols()));
  CMatrix full = cov.selfadjointView<Eigen::Lower>();
  return full;
}

}  // namespace qce
