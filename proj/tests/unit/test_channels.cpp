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

#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"
#include "qce/channels.hpp"
#include "qce/numeric.hpp"
#include "qce/parallel.hpp"
#include "qce/random.hpp"
#include "test_util.hpp"

namespace qce {
namespace {

ClusterParams one_cluster(double angle, double spread_deg) {
  ClusterParams p;
  p.angles = {angle};
  p.gains = {1.0};
  p.angle_spread = deg_to_rad(spread_deg);
  return p;
}

TEST(ClusterParams, SingleClusterGainIsOne) {
  Rng rng(1);
  const ClusterParams p = draw_cluster_params(rng, 1);
  ASSERT_EQ(p.count(), 1u);
  EXPECT_EQ(p.gains[0], 1.0);
  EXPECT_GE(p.angles[0], 0.0);
  EXPECT_LT(p.angles[0], 2.0 * kPi);
}

TEST(ClusterParams, GainsSumToOne) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const ClusterParams p = draw_cluster_params(rng, 3);
    double total = 0.0;
    for (double g : p.gains) {
      EXPECT_GE(g, 0.0);
      total += g;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_THROW(draw_cluster_params(rng, 0), std::invalid_argument);
}

TEST(ClusterParams, DeterministicForSeed) {
  Rng a(77);
  Rng b(77);
  const ClusterParams pa = draw_cluster_params(a, 3);
  const ClusterParams pb = draw_cluster_params(b, 3);
  EXPECT_EQ(pa.angles, pb.angles);
  EXPECT_EQ(pa.gains, pb.gains);
}

TEST(GenieCovariance, OneClusterMatchesQuadratureOracle) {
  const GenieCovariance c = genie_covariance(one_cluster(0.7, 2.0), 8);
  const CVector expected = test::to_vector(oracle::kGenieOneCluster);
  EXPECT_LT((c.matrix.col(0) - expected).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(GenieCovariance, TwoClustersMatchQuadratureOracle) {
  ClusterParams p;
  p.angles = {0.3, 2.6};
  p.gains = {0.35, 0.65};
  p.angle_spread = deg_to_rad(5.0);
  const GenieCovariance c = genie_covariance(p, 8);
  const CVector expected = test::to_vector(oracle::kGenieTwoClusters);
  EXPECT_LT((c.matrix.col(0) - expected).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(GenieCovariance, InvariantsHold) {
  Rng rng(3);
  for (std::size_t clusters : {1u, 2u, 3u}) {
    for (int i = 0; i < 20; ++i) {
      const GenieCovariance c = genie_covariance(draw_cluster_params(rng, clusters), 16);
      EXPECT_LT((c.matrix - c.matrix.adjoint()).norm(), 1e-10 * c.matrix.norm());
      EXPECT_GE(min_eigenvalue(c.matrix), -1e-8 * 16.0 / 16.0);
      EXPECT_NEAR(c.matrix.trace().real(), 16.0, 1e-9);
      EXPECT_EQ(c.matrix(0, 0).imag(), 0.0);
      EXPECT_TRUE(is_toeplitz(c.matrix, 1e-12));
      EXPECT_LT((c.factor * c.factor.adjoint() - c.matrix).norm(), 1e-9 * c.matrix.norm());
    }
  }
}

TEST(GenieCovariance, NarrowSpreadIsRankOne) {
  const double angle = 1.1;
  const GenieCovariance c = genie_covariance(one_cluster(angle, 0.1), 16);
  const CVector t = steering_vector(angle, 16);
  const CMatrix outer = t * t.adjoint();
  EXPECT_LT((c.matrix - outer).norm() / c.matrix.norm(), 0.05);
}

TEST(GenieCovariance, SymmetricClustersMatchBruteForceSpectrum) {
  const double g0 = 0.4;
  ClusterParams p;
  p.angles = {g0, 2.0 * kPi - g0};
  p.gains = {0.5, 0.5};
  p.angle_spread = deg_to_rad(3.0);
  const std::size_t n = 8;
  const GenieCovariance c = genie_covariance(p, n);

  // Brute force: plain Riemann sum of the wrapped Laplace mixture over a fine uniform grid on [-pi, pi).
  const double b = p.angle_spread / std::sqrt(2.0);
  const long points = 400000;
  const double h = 2.0 * kPi / static_cast<double>(points);
  CMatrix brute = CMatrix::Zero(8, 8);
  for (long i = 0; i < points; ++i) {
    const double g = -kPi + static_cast<double>(i) * h;
    double w = 0.0;
    for (double mu : p.angles) {
      const double d = std::remainder(g - mu, 2.0 * kPi);
      w += 0.5 * std::exp(-std::abs(d) / b);
    }
    const CVector t = steering_vector(g, n);
    brute.noalias() += w * t * t.adjoint();
  }
  brute *= static_cast<double>(n) / brute.trace().real();

  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(c.matrix).eigenvalues();
  const RVector eb = Eigen::SelfAdjointEigenSolver<CMatrix>(brute).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    EXPECT_NEAR(ev(i), eb(i), 1e-3 * std::max(1.0, eb(i))) << "eigenvalue " << i;
  }
}

TEST(GenieCovariance, RejectsBadInput) {
  EXPECT_THROW(genie_covariance(one_cluster(0.1, 2.0), 0), std::invalid_argument);
  EXPECT_THROW(genie_covariance(one_cluster(0.1, 0.0), 4), std::invalid_argument);
}

TEST(SampleChannels, IdentityCovariance) {
  Rng rng(4);
  const std::size_t n = 4;
  const std::size_t count = 100000;
  const ChannelDataset d = sample_channels(CMatrix::Identity(4, 4), count, rng);
  const double err = (sample_covariance(d.samples) - CMatrix::Identity(4, 4)).norm();
  EXPECT_LT(err, 5.0 * static_cast<double>(n) / std::sqrt(static_cast<double>(count)));
}

TEST(SampleChannels, RankOneSamplesAreProportionalToEigenvector) {
  Rng rng(5);
  CVector u = CVector::Random(5);
  u.normalize();
  const ChannelDataset d = sample_channels(CMatrix(u * u.adjoint()), 200, rng);
  for (Eigen::Index t = 0; t < 200; ++t) {
    const CVector h = d.samples.col(t);
    const CVector residual = h - u * u.dot(h);
    EXPECT_LT(residual.norm(), 1e-6 * std::max(1.0, h.norm()));
  }
}

TEST(SampleChannels, GenieCovarianceMatchesSampleCovariance) {
  Rng rng(6);
  const GenieCovariance c = genie_covariance(one_cluster(2.0, 2.0), 16);
  const ChannelDataset d = sample_channels(c, 100000, rng);
  EXPECT_LT(relative_frobenius_error(sample_covariance(d.samples), c.matrix), 0.05);
}

TEST(Datasets, NormalizationOfChannelPower) {
  ScenarioConfig s;
  s.antennas = 8;
  const ChannelDataset d = build_dataset_H(s, 100000, Rng(8));
  const double mean = d.samples.colwise().squaredNorm().mean() / 8.0;
  EXPECT_GE(mean, 0.97);
  EXPECT_LE(mean, 1.03);
  EXPECT_EQ(d.params.size(), 100000u);
}

TEST(Datasets, DeterministicAndThreadIndependent) {
  ScenarioConfig s;
  s.antennas = 8;
  s.clusters = 3;
  set_num_threads(1);
  const ChannelDataset a = build_dataset_H(s, 500, Rng(9));
  set_num_threads(4);
  const ChannelDataset b = build_dataset_H(s, 500, Rng(9));
  set_num_threads(0);
  EXPECT_TRUE(a.samples == b.samples);
  const ChannelDataset c = build_dataset_H(s, 500, Rng(10));
  EXPECT_FALSE(a.samples == c.samples);

  const QuantizerSpec q = make_quantizer(2, 0.1);
  const QuantizedDataset ra = build_dataset_R(s, 300, 10.0, q, make_pilots(2), Rng(11));
  const QuantizedDataset rb = build_dataset_R(s, 300, 10.0, q, make_pilots(2), Rng(11));
  EXPECT_TRUE(ra.observations == rb.observations);
  EXPECT_EQ(ra.observations.rows(), 16);
  EXPECT_NEAR(ra.sigma2, 0.1, 1e-15);
}

TEST(Datasets, ObservationsAreQuantizerLabels) {
  ScenarioConfig s;
  s.antennas = 4;
  const QuantizerSpec q = make_quantizer(2, 1.0);
  const QuantizedDataset r = build_dataset_R(s, 200, 0.0, q, make_pilots(1), Rng(12));
  for (Eigen::Index t = 0; t < r.observations.cols(); ++t) {
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(q.quantize(r.observations(i, t)), r.observations(i, t));
  }
}

}  // namespace
}  // namespace qce
