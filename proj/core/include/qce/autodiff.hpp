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
#include <deque>
#include <functional>

#include "qce/types.hpp"

// Minimal reverse-mode differentiation on dense real matrices. Batches are
// row-major in the sense that each row of a value is one sample.
namespace qce::ad {

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const RMatrix& value() const;
  const RMatrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const RMatrix& grad)>;

  Var variable(RMatrix value);  // leaf whose gradient is kept
  Var constant(RMatrix value);  // leaf, gradient ignored
  Var push(RMatrix value, Backward backward);

  const RMatrix& value(std::size_t id) const { return nodes_[id].value; }
  const RMatrix& grad(std::size_t id) const { return nodes_[id].grad; }
  void accumulate(std::size_t id, const RMatrix& g);

  // Seeds d(root)/d(root) = 1 for a 1 x 1 root and sweeps the tape backwards.
  void backward(const Var& root);
  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    RMatrix value;
    RMatrix grad;
    Backward backward;
    bool needs_grad = true;
  };
  std::deque<Node> nodes_;
};

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);       // elementwise
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var add_row(const Var& x, const Var& row);  // x + 1 row (row is 1 x cols)
Var mul_col(const Var& x, const Var& col);  // each row i scaled by col(i)
Var broadcast_cols(const Var& col, Eigen::Index cols);  // B x 1 -> B x cols
Var relu(const Var& x);
Var exp(const Var& x);
Var log(const Var& x);
Var softplus(const Var& x);
Var square(const Var& x);
Var sum(const Var& x);        // 1 x 1
Var row_mean(const Var& x);   // B x 1
Var slice_cols(const Var& x, Eigen::Index start, Eigen::Index count);
// Elementwise f with derivative df, both evaluated on the input value.
Var map(const Var& x, const std::function<double(double)>& f,
        const std::function<double(double)>& df);
// 1 x 1 convolution across channels. x is B x (c_in * n) with channel-major
// layout, w is c_in x c_out, bias 1 x c_out; result B x (c_out * n).
Var conv1x1(const Var& x, const Var& w, const Var& bias, Eigen::Index positions);

}  // namespace qce::ad
