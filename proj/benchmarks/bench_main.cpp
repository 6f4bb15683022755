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

#include <benchmark/benchmark.h>

#include "qce/bussgang.hpp"
#include "qce/channels.hpp"
#include "qce/filter_bank.hpp"
#include "qce/mixtures.hpp"
#include "qce/numeric.hpp"
#include "qce/quantized_learning.hpp"
#include "qce/vae.hpp"

namespace {

using namespace qce;

CMatrix observations(std::size_t n, std::size_t count, const QuantizerSpec& q, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix r(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  for (Eigen::Index t = 0; t < r.cols(); ++t) r.col(t) = quantize(CVector(rng.complex_normal_vector(n)), q);
  return r;
}

void BM_Quantize(benchmark::State& state) {
  const QuantizerSpec q = make_quantizer(static_cast<int>(state.range(0)), 0.1);
  const CMatrix y = observations(64, 1000, QuantizerSpec::infinite(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(quantize(y, q));
  state.SetItemsProcessed(state.iterations() * y.size());
}
BENCHMARK(BM_Quantize)->Arg(1)->Arg(3)->Arg(8);

void BM_GenieCovariance(benchmark::State& state) {
  Rng rng(2);
  const ClusterParams p = draw_cluster_params(rng, 3);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(genie_covariance(p, n));
}
BENCHMARK(BM_GenieCovariance)->Arg(16)->Arg(32)->Arg(64);

void BM_ConditionalLmmse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const GenieCovariance c = genie_covariance(draw_cluster_params(rng, 1), n);
  const QuantizerSpec q = make_quantizer(static_cast<int>(state.range(1)), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(conditional_lmmse(c.matrix, make_pilots(1), 0.1, q).matrix);
}
BENCHMARK(BM_ConditionalLmmse)->Args({16, 1})->Args({32, 1})->Args({64, 1})->Args({64, 3});

void BM_CirculantLmmseApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RVector spectrum = RVector::LinSpaced(static_cast<Eigen::Index>(n), 0.1, 2.0);
  const QuantizerSpec q = make_quantizer(1, 0.1);
  const CMatrix r = observations(n, 1, q, 4);
  for (auto _ : state) {
    const CirculantLmmse w(spectrum, make_pilots(1), 0.1, q);
    benchmark::DoNotOptimize(w.apply(r.col(0)));
  }
}
BENCHMARK(BM_CirculantLmmseApply)->Arg(32)->Arg(64);

void BM_GmmEStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  ScenarioConfig s;
  s.antennas = n;
  const ChannelDataset h = build_dataset_H(s, 2000, Rng(5));
  std::vector<CMatrix> covs;
  for (std::size_t i = 0; i < k; ++i) covs.push_back(genie_covariance(h.params[i], n).matrix + 0.01 * CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  const RVector weights = RVector::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
  for (auto _ : state) {
    RMatrix logd = component_log_densities(weights, covs, h.samples);
    benchmark::DoNotOptimize(normalize_responsibilities(logd));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_GmmEStep)->Args({16, 8})->Args({32, 16});

void BM_BgmmEstimate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ScenarioConfig s;
  s.antennas = n;
  const ChannelDataset h = build_dataset_H(s, 4000, Rng(6));
  EmOptions options;
  options.max_iter = 5;
  Rng rng(7);
  const GmmModel m = fit_gmm(h.samples, 8, CovarianceStructure::Full, options, rng);
  const QuantizerSpec q = make_quantizer(1, 0.1);
  const MixtureEstimator est(m, make_pilots(1), 0.1, q);
  const CMatrix r = observations(n, 1000, q, 8);
  for (auto _ : state) benchmark::DoNotOptimize(est.estimate(r));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_BgmmEstimate)->Arg(16)->Arg(32);

void BM_HalfNormalSolve(benchmark::State& state) {
  const std::vector<double> thr{0.5, 1.0, 1.5};
  const std::vector<double> prob{0.30, 0.56, 0.76};
  for (auto _ : state) benchmark::DoNotOptimize(solve_half_normal(thr, prob, 1e5));
}
BENCHMARK(BM_HalfNormalSolve);

void BM_ElboBatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(9);
  const VaeModel m = make_vae(make_vae_architecture(n, 1, 4), rng);
  const std::size_t batch = 256;
  CMatrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(batch));
  for (Eigen::Index t = 0; t < h.cols(); ++t) h.col(t) = rng.complex_normal_vector(n);
  RMatrix eps(static_cast<Eigen::Index>(batch), 4);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(elbo_batch(m, h, h, eps, ElboTarget{}).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ElboBatch)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
