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
#include <functional>
#include <vector>

#include "qce/autodiff.hpp"

namespace qce {
namespace {

using Builder = std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>;

RMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::srand(seed);
  RMatrix m = RMatrix::Random(rows, cols);
  return (m.array() + 1.0) * 0.5 * (hi - lo) + lo;
}

// Reduces op output to a scalar with fixed random weights so every output
// entry contributes a distinct amount.
double evaluate(const Builder& build, const std::vector<RMatrix>& inputs, std::vector<RMatrix>* grads) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  for (const RMatrix& x : inputs) vars.push_back(tape.variable(x));
  const ad::Var out = build(tape, vars);
  const ad::Var w = tape.constant(random_matrix(out.rows(), out.cols(), 99));
  const ad::Var loss = ad::sum(ad::mul(out, w));
  if (grads != nullptr) {
    tape.backward(loss);
    grads->clear();
    for (const ad::Var& v : vars) grads->push_back(v.grad());
  }
  return loss.value()(0, 0);
}

double max_relative_error(const Builder& build, const std::vector<RMatrix>& inputs) {
  std::vector<RMatrix> analytic;
  evaluate(build, inputs, &analytic);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (Eigen::Index j = 0; j < inputs[i].size(); ++j) {
      std::vector<RMatrix> plus = inputs;
      std::vector<RMatrix> minus = inputs;
      plus[i](j) += h;
      minus[i](j) -= h;
      const double numeric = (evaluate(build, plus, nullptr) - evaluate(build, minus, nullptr)) / (2.0 * h);
      const double a = analytic[i](j);
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  return worst;
}

struct OpCase {
  const char* name;
  Builder build;
  std::vector<RMatrix> inputs;
};

TEST(Autodiff, GradientsMatchFiniteDifferences) {
  const RMatrix a = random_matrix(3, 4, 1);
  const RMatrix b = random_matrix(4, 2, 2);
  const RMatrix c = random_matrix(3, 4, 3);
  const RMatrix row = random_matrix(1, 4, 4);
  const RMatrix col = random_matrix(3, 1, 5);
  const RMatrix pos = random_matrix(3, 4, 6, 0.2, 2.0);
  // Entries bounded away from zero so the ReLU kink is never crossed.
  RMatrix away = random_matrix(3, 4, 7, 0.1, 1.0);
  away(0, 1) *= -1.0;
  away(2, 3) *= -1.0;
  away(1, 0) *= -1.0;
  const RMatrix conv_x = random_matrix(2, 3 * 5, 8);
  const RMatrix conv_w = random_matrix(3, 2, 9);
  const RMatrix conv_b = random_matrix(1, 2, 10);

  const std::vector<OpCase> cases = {
      {"matmul", [](ad::Tape&, const auto& v) { return ad::matmul(v[0], v[1]); }, {a, b}},
      {"add", [](ad::Tape&, const auto& v) { return ad::add(v[0], v[1]); }, {a, c}},
      {"sub", [](ad::Tape&, const auto& v) { return ad::sub(v[0], v[1]); }, {a, c}},
      {"mul", [](ad::Tape&, const auto& v) { return ad::mul(v[0], v[1]); }, {a, c}},
      {"scale", [](ad::Tape&, const auto& v) { return ad::scale(v[0], -2.5); }, {a}},
      {"add_scalar", [](ad::Tape&, const auto& v) { return ad::add_scalar(v[0], 0.7); }, {a}},
      {"add_row", [](ad::Tape&, const auto& v) { return ad::add_row(v[0], v[1]); }, {a, row}},
      {"mul_col", [](ad::Tape&, const auto& v) { return ad::mul_col(v[0], v[1]); }, {a, col}},
      {"broadcast_cols", [](ad::Tape&, const auto& v) { return ad::broadcast_cols(v[0], 5); }, {col}},
      {"relu", [](ad::Tape&, const auto& v) { return ad::relu(v[0]); }, {away}},
      {"exp", [](ad::Tape&, const auto& v) { return ad::exp(v[0]); }, {a}},
      {"log", [](ad::Tape&, const auto& v) { return ad::log(v[0]); }, {pos}},
      {"softplus", [](ad::Tape&, const auto& v) { return ad::softplus(v[0]); }, {a}},
      {"square", [](ad::Tape&, const auto& v) { return ad::square(v[0]); }, {a}},
      {"sum", [](ad::Tape&, const auto& v) { return ad::sum(v[0]); }, {a}},
      {"row_mean", [](ad::Tape&, const auto& v) { return ad::row_mean(v[0]); }, {a}},
      {"slice_cols", [](ad::Tape&, const auto& v) { return ad::slice_cols(v[0], 1, 2); }, {a}},
      {"map", [](ad::Tape&, const auto& v) {
         return ad::map(v[0], [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
       }, {a}},
      {"conv1x1", [](ad::Tape&, const auto& v) { return ad::conv1x1(v[0], v[1], v[2], 5); }, {conv_x, conv_w, conv_b}},
      {"reused", [](ad::Tape&, const auto& v) { return ad::mul(ad::exp(v[0]), ad::add(v[0], v[0])); }, {a}},
  };
  for (const OpCase& op : cases) {
    EXPECT_LT(max_relative_error(op.build, op.inputs), 1e-6) << op.name;
  }
}

TEST(Autodiff, ReluForward) {
  ad::Tape tape;
  RMatrix x(1, 5);
  x << -2.0, -0.0, 0.0, 0.5, 3.25;
  const ad::Var y = ad::relu(tape.variable(x));
  EXPECT_GE(y.value().minCoeff(), 0.0);
  EXPECT_EQ(y.value()(0, 3), 0.5);
  EXPECT_EQ(y.value()(0, 4), 3.25);
  EXPECT_EQ(y.value()(0, 0), 0.0);
}

TEST(Autodiff, Conv1x1ChannelMajorLayout) {
  ad::Tape tape;
  // Two input channels over three positions: [c0p0 c0p1 c0p2 c1p0 c1p1 c1p2].
  RMatrix x(1, 6);
  x << 1, 2, 3, 10, 20, 30;
  RMatrix w(2, 1);
  w << 1.0, 0.5;
  RMatrix b(1, 1);
  b << -1.0;
  const ad::Var y = ad::conv1x1(tape.variable(x), tape.variable(w), tape.variable(b), 3);
  ASSERT_EQ(y.cols(), 3);
  EXPECT_DOUBLE_EQ(y.value()(0, 0), 1 + 5 - 1);
  EXPECT_DOUBLE_EQ(y.value()(0, 2), 3 + 15 - 1);
}

TEST(Autodiff, ConstantsReceiveNoGradient) {
  ad::Tape tape;
  const ad::Var v = tape.variable(RMatrix::Ones(2, 2));
  const ad::Var c = tape.constant(RMatrix::Constant(2, 2, 3.0));
  tape.backward(ad::sum(ad::mul(v, c)));
  EXPECT_TRUE(v.grad().isApprox(RMatrix::Constant(2, 2, 3.0)));
}

TEST(Autodiff, ShapeMismatchThrows) {
  ad::Tape tape;
  const ad::Var a = tape.variable(RMatrix::Ones(2, 3));
  const ad::Var b = tape.variable(RMatrix::Ones(2, 2));
  EXPECT_THROW(ad::add(a, b), std::invalid_argument);
  EXPECT_THROW(ad::matmul(a, a), std::invalid_argument);
}

}  // namespace
}  // namespace qce
