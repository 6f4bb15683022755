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

#include "qce/autodiff.hpp"

#include <cmath>

namespace qce::ad {

const RMatrix& Var::value() const { return tape_->value(id_); }
const RMatrix& Var::grad() const { return tape_->grad(id_); }

Var Tape::variable(RMatrix value) {
  nodes_.push_back(Node{std::move(value), RMatrix(), nullptr, true});
  return {this, nodes_.size() - 1};
}

Var Tape::constant(RMatrix value) {
  nodes_.push_back(Node{std::move(value), RMatrix(), nullptr, false});
  return {this, nodes_.size() - 1};
}

Var Tape::push(RMatrix value, Backward backward) {
  nodes_.push_back(Node{std::move(value), RMatrix(), std::move(backward), true});
  return {this, nodes_.size() - 1};
}

void Tape::accumulate(std::size_t id, const RMatrix& g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::backward(const Var& root) {
  if (root.rows() != 1 || root.cols() != 1) throw std::invalid_argument("backward: root must be 1 x 1");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[root.id()].grad = RMatrix::Ones(1, 1);
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && n.grad.size() != 0) n.backward(*this, n.grad);
  }
}

namespace {

void check_same_shape(const Var& a, const Var& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(who) + ": shape mismatch");
  }
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->push(a.value() * b.value(), [ia, ib](Tape& t, const RMatrix& g) {
    t.accumulate(ia, g * t.value(ib).transpose());
    t.accumulate(ib, t.value(ia).transpose() * g);
  });
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->push(a.value() + b.value(), [ia, ib](Tape& t, const RMatrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->push(a.value() - b.value(), [ia, ib](Tape& t, const RMatrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, -g);
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->push(a.value().cwiseProduct(b.value()), [ia, ib](Tape& t, const RMatrix& g) {
    t.accumulate(ia, g.cwiseProduct(t.value(ib)));
    t.accumulate(ib, g.cwiseProduct(t.value(ia)));
  });
}

Var scale(const Var& a, double s) {
  const std::size_t ia = a.id();
  return a.tape()->push(a.value() * s, [ia, s](Tape& t, const RMatrix& g) { t.accumulate(ia, g * s); });
}

Var add_scalar(const Var& a, double s) {
  const std::size_t ia = a.id();
  return a.tape()->push(a.value().array() + s, [ia](Tape& t, const RMatrix& g) { t.accumulate(ia, g); });
}

Var add_row(const Var& x, const Var& row) {
  if (row.rows() != 1 || row.cols() != x.cols()) throw std::invalid_argument("add_row: bias shape mismatch");
  const std::size_t ix = x.id(), ir = row.id();
  RMatrix v = x.value().rowwise() + row.value().row(0);
  return x.tape()->push(std::move(v), [ix, ir](Tape& t, const RMatrix& g) {
    t.accumulate(ix, g);
    t.accumulate(ir, g.colwise().sum());
  });
}

Var mul_col(const Var& x, const Var& col) {
  if (col.cols() != 1 || col.rows() != x.rows()) throw std::invalid_argument("mul_col: shape mismatch");
  const std::size_t ix = x.id(), ic = col.id();
  RMatrix v = col.value().col(0).asDiagonal() * x.value();
  return x.tape()->push(std::move(v), [ix, ic](Tape& t, const RMatrix& g) {
    t.accumulate(ix, t.value(ic).col(0).asDiagonal() * g);
    t.accumulate(ic, g.cwiseProduct(t.value(ix)).rowwise().sum());
  });
}

Var broadcast_cols(const Var& col, Eigen::Index cols) {
  if (col.cols() != 1) throw std::invalid_argument("broadcast_cols: input must be a column");
  const std::size_t ic = col.id();
  RMatrix v = col.value().replicate(1, cols);
  return col.tape()->push(std::move(v), [ic](Tape& t, const RMatrix& g) { t.accumulate(ic, g.rowwise().sum()); });
}

Var relu(const Var& x) {
  const std::size_t ix = x.id();
  RMatrix v = x.value().cwiseMax(0.0);
  return x.tape()->push(std::move(v), [ix](Tape& t, const RMatrix& g) {
    t.accumulate(ix, (t.value(ix).array() > 0.0).select(g, 0.0));
  });
}

Var exp(const Var& x) {
  const std::size_t ix = x.id();
  RMatrix v = x.value().array().exp();
  Tape* tape = x.tape();
  const std::size_t self = tape->size();
  return tape->push(std::move(v), [ix, self](Tape& t, const RMatrix& g) {
    t.accumulate(ix, g.cwiseProduct(t.value(self)));
  });
}

Var log(const Var& x) {
  const std::size_t ix = x.id();
  RMatrix v = x.value().array().log();
  return x.tape()->push(std::move(v), [ix](Tape& t, const RMatrix& g) {
    t.accumulate(ix, g.cwiseQuotient(t.value(ix)));
  });
}

Var softplus(const Var& x) {
  return map(
      x, [](double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); },
      [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Var square(const Var& x) {
  const std::size_t ix = x.id();
  RMatrix v = x.value().array().square();
  return x.tape()->push(std::move(v), [ix](Tape& t, const RMatrix& g) {
    t.accumulate(ix, 2.0 * g.cwiseProduct(t.value(ix)));
  });
}

Var sum(const Var& x) {
  const std::size_t ix = x.id();
  const Eigen::Index r = x.rows(), c = x.cols();
  return x.tape()->push(RMatrix::Constant(1, 1, x.value().sum()), [ix, r, c](Tape& t, const RMatrix& g) {
    t.accumulate(ix, RMatrix::Constant(r, c, g(0, 0)));
  });
}

Var row_mean(const Var& x) {
  const std::size_t ix = x.id();
  const Eigen::Index c = x.cols();
  RMatrix v = x.value().rowwise().mean();
  return x.tape()->push(std::move(v), [ix, c](Tape& t, const RMatrix& g) {
    t.accumulate(ix, g.replicate(1, c) / static_cast<double>(c));
  });
}

Var slice_cols(const Var& x, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > x.cols()) throw std::invalid_argument("slice_cols: out of range");
  const std::size_t ix = x.id();
  const Eigen::Index r = x.rows(), c = x.cols();
  RMatrix v = x.value().middleCols(start, count);
  return x.tape()->push(std::move(v), [ix, r, c, start, count](Tape& t, const RMatrix& g) {
    RMatrix full = RMatrix::Zero(r, c);
    full.middleCols(start, count) = g;
    t.accumulate(ix, full);
  });
}

Var map(const Var& x, const std::function<double(double)>& f, const std::function<double(double)>& df) {
  const std::size_t ix = x.id();
  RMatrix v = x.value().unaryExpr(f);
  return x.tape()->push(std::move(v), [ix, df](Tape& t, const RMatrix& g) {
    t.accumulate(ix, g.cwiseProduct(t.value(ix).unaryExpr(df)));
  });
}

Var conv1x1(const Var& x, const Var& w, const Var& bias, Eigen::Index positions) {
  const Eigen::Index c_in = w.rows(), c_out = w.cols(), b = x.rows();
  if (x.cols() != c_in * positions || bias.rows() != 1 || bias.cols() != c_out) {
    throw std::invalid_argument("conv1x1: shape mismatch");
  }
  // Rearrange to (B * positions) x c_in so the convolution is one product.
  auto to_rows = [b, positions](const RMatrix& m, Eigen::Index ch) {
    RMatrix out(b * positions, ch);
    for (Eigen::Index s = 0; s < b; ++s) {
      for (Eigen::Index c = 0; c < ch; ++c) out.block(s * positions, c, positions, 1) = m.block(s, c * positions, 1, positions).transpose();
    }
    return out;
  };
  auto from_rows = [b, positions](const RMatrix& m, Eigen::Index ch) {
    RMatrix out(b, ch * positions);
    for (Eigen::Index s = 0; s < b; ++s) {
      for (Eigen::Index c = 0; c < ch; ++c) out.block(s, c * positions, 1, positions) = m.block(s * positions, c, positions, 1).transpose();
    }
    return out;
  };
  const RMatrix xr = to_rows(x.value(), c_in);
  RMatrix yr = xr * w.value();
  yr.rowwise() += bias.value().row(0);
  const std::size_t ix = x.id(), iw = w.id(), ib = bias.id();
  return x.tape()->push(from_rows(yr, c_out), [=](Tape& t, const RMatrix& g) {
    const RMatrix gr = to_rows(g, c_out);
    t.accumulate(iw, to_rows(t.value(ix), c_in).transpose() * gr);
    t.accumulate(ib, gr.colwise().sum());
    t.accumulate(ix, from_rows(gr * t.value(iw).transpose(), c_in));
  });
}

}  // namespace qce::ad
