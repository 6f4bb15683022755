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

#include "qce/mlp.hpp"

#include <cmath>
#include <string>

namespace qce {

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void MlpParams::collect(std::vector<RMatrix*>& out) {
  for (auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
}

MlpParams make_mlp(const std::vector<std::size_t>& widths, Activation hidden, Activation output, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output width");
  MlpParams mlp;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(widths[i]);
    const auto out = static_cast<Eigen::Index>(widths[i + 1]);
    if (in == 0 || out == 0) throw std::invalid_argument("make_mlp: zero width");
    DenseLayer l;
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    l.weight.resize(in, out);
    for (Eigen::Index c = 0; c < out; ++c) {
      for (Eigen::Index r = 0; r < in; ++r) l.weight(r, c) = rng.uniform(-bound, bound);
    }
    l.bias = RMatrix::Zero(1, out);
    l.activation = i + 2 == widths.size() ? output : hidden;
    mlp.layers.push_back(std::move(l));
  }
  return mlp;
}

RMatrix mlp_forward(const MlpParams& mlp, const RMatrix& x) {
  RMatrix a = x;
  for (const auto& l : mlp.layers) {
    RMatrix z = a * l.weight;
    z.rowwise() += l.bias.row(0);
    if (l.activation == Activation::Relu) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

ad::Var mlp_forward(const MlpParams& mlp, const std::vector<ad::Var>& params, std::size_t offset,
                    const ad::Var& x) {
  ad::Var a = x;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    a = ad::add_row(ad::matmul(a, params[offset + 2 * i]), params[offset + 2 * i + 1]);
    if (mlp.layers[i].activation == Activation::Relu) a = ad::relu(a);
  }
  return a;
}

Adam::Adam(std::vector<RMatrix*> params, const TrainOptions& options)
    : params_(std::move(params)),
      lr_(options.learning_rate),
      b1_(options.beta1),
      b2_(options.beta2),
      eps_(options.epsilon) {
  for (const RMatrix* p : params_) {
    m_.push_back(RMatrix::Zero(p->rows(), p->cols()));
    v_.push_back(RMatrix::Zero(p->rows(), p->cols()));
  }
}

void Adam::step(const std::vector<RMatrix>& grads) {
  if (grads.size() != params_.size()) throw std::invalid_argument("Adam::step: gradient count mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (grads[i].size() == 0) continue;
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grads[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grads[i].cwiseAbs2();
    params_[i]->array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

RMatrix stack_real(const CMatrix& x) {
  RMatrix out(x.cols(), 2 * x.rows());
  out.leftCols(x.rows()) = x.real().transpose();
  out.rightCols(x.rows()) = x.imag().transpose();
  return out;
}

CMatrix unstack_real(const RMatrix& x) {
  const Eigen::Index n = x.cols() / 2;
  CMatrix out(n, x.rows());
  out.real() = x.leftCols(n).transpose();
  out.imag() = x.rightCols(n).transpose();
  return out;
}

void DivergenceGuard::update(double loss, const char* who) {
  if (!std::isfinite(loss)) throw NumericalError(std::string(who) + ": non-finite training loss");
  streak_ = loss > limit_ ? streak_ + 1 : 0;
  if (streak_ >= 3) {
    throw NumericalError(std::string(who) + ": training diverged (loss above 10x initial for 3 epochs)");
  }
}

}  // namespace qce
