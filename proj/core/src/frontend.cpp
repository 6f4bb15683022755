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

#include "qce/frontend.hpp"

#include <array>
#include <cmath>
#include <mutex>

#include "qce/numeric.hpp"

namespace qce {

CMatrix PilotConfig::matrix(std::size_t antennas) const {
  const auto n = static_cast<Eigen::Index>(antennas);
  const auto p = static_cast<Eigen::Index>(a.size());
  CMatrix out = CMatrix::Zero(n * p, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    out.block(i * n, 0, n, n).diagonal().setConstant(a[static_cast<std::size_t>(i)]);
  }
  return out;
}

CVector PilotConfig::apply(const CVector& h) const {
  const Eigen::Index n = h.size();
  CVector out(n * static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * n, n) = a[i] * h;
  }
  return out;
}

PilotConfig make_pilots(std::size_t pilots) {
  if (pilots == 0) throw std::invalid_argument("make_pilots: pilot count must be >= 1");
  PilotConfig cfg;
  if (pilots == 1) {
    cfg.a = {Complex(1.0, 0.0)};
    return cfg;
  }
  const double p = static_cast<double>(pilots);
  cfg.a.resize(pilots);
  double power = 0.0;
  for (std::size_t i = 0; i < pilots; ++i) {
    const double idx = static_cast<double>(i);
    const double beta = 0.5 + idx / (2.0 * (p - 1.0));
    cfg.a[i] = std::polar(beta, kPi * idx / (2.0 * p));
    power += beta * beta;
  }
  const double scale = std::sqrt(p / power);
  for (auto& v : cfg.a) v *= scale;
  return cfg;
}

double QuantizerSpec::quantize(double x) const {
  if (bits == 0) return x;
  const long half = 1L << (bits - 1);
  long idx = static_cast<long>(std::floor(x / step)) + half;
  idx = std::clamp(idx, 0L, 2 * half - 1);
  return labels[static_cast<std::size_t>(idx)];
}

std::vector<double> QuantizerSpec::positive_thresholds() const {
  std::vector<double> out;
  for (double t : thresholds) {
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

QuantizerSpec QuantizerSpec::infinite() { return QuantizerSpec{}; }

QuantizerSpec QuantizerSpec::uniform(int bits, double step) {
  if (bits < 1 || bits > kMaxBits) {
    throw std::invalid_argument("QuantizerSpec: bits must lie in [1, 8]");
  }
  if (!(step > 0.0)) throw std::invalid_argument("QuantizerSpec: step must be positive");
  QuantizerSpec q;
  q.bits = bits;
  q.step = step;
  const long levels = 1L << bits;
  const long half = levels / 2;
  for (long i = 1; i < levels; ++i) q.thresholds.push_back(static_cast<double>(i - half) * step);
  for (long i = 1; i <= levels; ++i) {
    q.labels.push_back((static_cast<double>(i - half) - 0.5) * step);
  }
  return q;
}

double uniform_quantizer_mse(int bits, double step) {
  const QuantizerSpec q = QuantizerSpec::uniform(bits, step);
  // Per cell [a, b) with label l: int (x - l)^2 phi = int x^2 phi - 2 l int x phi + l^2 int phi,
  // int_a^b x^2 phi = Phi(b) - Phi(a) + a phi(a) - b phi(b), int_a^b x phi = phi(a) - phi(b).
  const auto x_phi = [](double x) { return std::isinf(x) ? 0.0 : x * normal_pdf(x); };
  const auto phi = [](double x) { return std::isinf(x) ? 0.0 : normal_pdf(x); };
  const auto cdf = [](double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return normal_cdf(x);
  };
  double mse = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.labels.size(); ++i) {
    const double a = i == 0 ? -inf : q.thresholds[i - 1];
    const double b = i + 1 == q.labels.size() ? inf : q.thresholds[i];
    const double l = q.labels[i];
    const double mass = cdf(b) - cdf(a);
    const double second = mass + x_phi(a) - x_phi(b);
    const double first = phi(a) - phi(b);
    mse += second - 2.0 * l * first + l * l * mass;
  }
  return mse;
}

namespace {

double search_optimal_step(int bits) {
  double best = 0.01;
  double best_mse = uniform_quantizer_mse(bits, best);
  for (double s = 0.02; s <= 4.0 + 1e-12; s += 0.01) {
    const double m = uniform_quantizer_mse(bits, s);
    if (m < best_mse) {
      best_mse = m;
      best = s;
    }
  }
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = std::max(1e-4, best - 0.01);
  double hi = best + 0.01;
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = uniform_quantizer_mse(bits, x1);
  double f2 = uniform_quantizer_mse(bits, x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = uniform_quantizer_mse(bits, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = uniform_quantizer_mse(bits, x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double optimal_uniform_step(int bits) {
  if (bits < 1 || bits > kMaxBits) {
    throw std::invalid_argument("optimal_uniform_step: bits must lie in [1, 8]");
  }
  static std::once_flag once;
  static std::array<double, kMaxBits + 1> table{};
  std::call_once(once, [] {
    for (int b = 1; b <= kMaxBits; ++b) table[static_cast<std::size_t>(b)] = search_optimal_step(b);
  });
  return table[static_cast<std::size_t>(bits)];
}

QuantizerSpec make_quantizer(int bits, double sigma2) {
  if (bits < 1 || bits > kMaxBits) {
    throw std::invalid_argument("make_quantizer: bits must lie in [1, 8]");
  }
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("make_quantizer: sigma2 must be >= 0");
  if (bits == 1) return QuantizerSpec::uniform(1, std::sqrt(2.0));
  return QuantizerSpec::uniform(bits, std::sqrt(0.5 * (1.0 + sigma2)) * optimal_uniform_step(bits));
}

CVector quantize(const CVector& y, const QuantizerSpec& q) {
  if (q.is_infinite()) return y;
  CVector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = q.quantize(y(i));
  return out;
}

CMatrix quantize(const CMatrix& y, const QuantizerSpec& q) {
  if (q.is_infinite()) return y;
  CMatrix out(y.rows(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) out(i, j) = q.quantize(y(i, j));
  }
  return out;
}

CVector observe(const CVector& h, const PilotConfig& pilots, double sigma2,
                const QuantizerSpec& q, Rng& rng) {
  CVector y = pilots.apply(h);
  if (sigma2 > 0.0) {
    const double s = std::sqrt(sigma2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += s * rng.complex_normal();
  }
  return quantize(y, q);
}

}  // namespace qce
