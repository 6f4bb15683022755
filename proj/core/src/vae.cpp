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

#include "qce/vae.hpp"

#include <algorithm>
#include <cmath>

#include "qce/bussgang.hpp"
#include "qce/numeric.hpp"
#include "qce/parallel.hpp"
#include "training.hpp"

namespace qce {

VaeArchitecture make_vae_architecture(std::size_t antennas, std::size_t pilots, std::size_t latent) {
  if (antennas < 2) throw std::invalid_argument("make_vae_architecture: N must be >= 2");
  if (pilots == 0) throw std::invalid_argument("make_vae_architecture: P must be >= 1");
  if (latent == 0 || latent >= antennas) throw std::invalid_argument("make_vae_architecture: need 1 <= L < N");
  VaeArchitecture a;
  a.antennas = antennas;
  a.pilots = pilots;
  a.latent = latent;
  if (pilots > 1) {
    const std::size_t layers = std::max<std::size_t>(pilots / 2, 1);
    for (std::size_t i = 0; i <= layers; ++i) {
      const double c = 2.0 * static_cast<double>(pilots) +
                       (2.0 - 2.0 * static_cast<double>(pilots)) * static_cast<double>(i) / static_cast<double>(layers);
      a.conv_channels.push_back(static_cast<std::size_t>(std::lround(c)));
    }
  }
  const std::size_t in = 2 * antennas;
  const std::size_t out = 2 * latent;
  const std::size_t first = std::max<std::size_t>(in, 128);
  std::vector<std::size_t> hidden{first};
  for (int i = 1; i <= 2; ++i) {
    const double w = static_cast<double>(first) *
                     std::pow(static_cast<double>(out) / static_cast<double>(first), static_cast<double>(i) / 3.0);
    hidden.push_back(std::max<std::size_t>(static_cast<std::size_t>(std::lround(w)), out));
  }
  a.encoder_widths = {in, hidden[0], hidden[1], hidden[2], out};
  a.decoder_widths = {latent, hidden[2], hidden[1], hidden[0], antennas};
  return a;
}

std::vector<RMatrix*> VaeModel::parameters() {
  std::vector<RMatrix*> out;
  for (std::size_t i = 0; i < conv_weights.size(); ++i) {
    out.push_back(&conv_weights[i]);
    out.push_back(&conv_biases[i]);
  }
  encoder.collect(out);
  decoder.collect(out);
  return out;
}

std::vector<const RMatrix*> VaeModel::parameters() const {
  std::vector<RMatrix*> p = const_cast<VaeModel*>(this)->parameters();
  return {p.begin(), p.end()};
}

std::size_t VaeModel::parameter_count() const {
  std::size_t n = 0;
  for (const RMatrix* p : parameters()) n += static_cast<std::size_t>(p->size());
  return n;
}

VaeModel make_vae(const VaeArchitecture& arch, Rng& rng) {
  VaeModel m;
  m.arch = arch;
  for (std::size_t i = 0; i + 1 < arch.conv_channels.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(arch.conv_channels[i]);
    const auto out = static_cast<Eigen::Index>(arch.conv_channels[i + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    RMatrix w(in, out);
    for (Eigen::Index c = 0; c < out; ++c) {
      for (Eigen::Index r = 0; r < in; ++r) w(r, c) = rng.uniform(-bound, bound);
    }
    m.conv_weights.push_back(std::move(w));
    m.conv_biases.push_back(RMatrix::Zero(1, out));
  }
  m.encoder = make_mlp(arch.encoder_widths, Activation::Relu, Activation::Linear, rng);
  m.decoder = make_mlp(arch.decoder_widths, Activation::Relu, Activation::Linear, rng);
  // Small last-layer weights start the decoder near c = 1.
  m.decoder.layers.back().weight *= 0.1;
  return m;
}

namespace {

struct Forward {
  ad::Var mu;
  ad::Var logvar;
  std::vector<ad::Var> params;
};

ad::Var encode(const VaeModel& model, ad::Tape& tape, const std::vector<ad::Var>& params, const CMatrix& input) {
  const auto n = static_cast<Eigen::Index>(model.arch.antennas);
  if (input.rows() != n * static_cast<Eigen::Index>(model.arch.pilots)) {
    throw std::invalid_argument("VAE: encoder input length must be N P");
  }
  ad::Var x = tape.constant(stack_real(input));
  const std::size_t convs = model.conv_weights.size();
  for (std::size_t i = 0; i < convs; ++i) {
    x = ad::conv1x1(x, params[2 * i], params[2 * i + 1], n);
    if (i + 1 < convs) x = ad::relu(x);
  }
  return mlp_forward(model.encoder, params, 2 * convs, x);
}

std::size_t decoder_offset(const VaeModel& model) {
  return 2 * model.conv_weights.size() + 2 * model.encoder.layers.size();
}

// Bussgang gain of the constant diagonal level m, capped at one, and its derivative.
double capped_gain(double m, const QuantizerSpec& q) {
  if (q.is_infinite()) return 1.0;
  return std::min(bussgang_gain(m, q), 1.0);
}

double capped_gain_derivative(double m, const QuantizerSpec& q) {
  if (q.is_infinite() || bussgang_gain(m, q) >= 1.0) return 0.0;
  if (q.bits == 1) return -0.5 * bussgang_gain(m, q) / m;
  const long half = 1L << (q.bits - 1);
  double acc = 0.0;
  for (long j = 1 - half; j <= half - 1; ++j) {
    const double t2 = std::pow(q.step * static_cast<double>(j), 2);
    acc += std::exp(-t2 / m) * (-0.5 * std::pow(m, -1.5) + t2 * std::pow(m, -2.5));
  }
  return q.step / std::sqrt(kPi) * acc;
}

}  // namespace

ElboResult elbo_batch(const VaeModel& model, const CMatrix& encoder_input, const CMatrix& target,
                      const RMatrix& eps, const ElboTarget& tm, bool with_gradients) {
  const auto n = static_cast<Eigen::Index>(model.arch.antennas);
  const auto l = static_cast<Eigen::Index>(model.arch.latent);
  const Eigen::Index b = encoder_input.cols();
  if (target.rows() != n || target.cols() != b) throw std::invalid_argument("elbo_batch: target must be N x B");
  if (eps.rows() != b || eps.cols() != l) throw std::invalid_argument("elbo_batch: eps must be B x L");

  ad::Tape tape;
  const std::vector<const RMatrix*> ptrs = model.parameters();
  std::vector<ad::Var> params;
  params.reserve(ptrs.size());
  for (const RMatrix* p : ptrs) params.push_back(tape.variable(*p));

  const ad::Var enc = encode(model, tape, params, encoder_input);
  const ad::Var mu = ad::slice_cols(enc, 0, l);
  const ad::Var logvar = ad::slice_cols(enc, l, l);
  const ad::Var z = ad::add(mu, ad::mul(ad::exp(ad::scale(logvar, 0.5)), tape.constant(eps)));
  const ad::Var logc = mlp_forward(model.decoder, params, decoder_offset(model), z);

  const CMatrix f = unitary_dft(model.arch.antennas);
  const ad::Var power = tape.constant((f * target).cwiseAbs2().transpose());
  ad::Var data;
  if (tm.kind == ObservationKind::Channel) {
    data = ad::add(logc, ad::mul(power, ad::exp(ad::scale(logc, -1.0))));
  } else {
    const QuantizerSpec q = tm.quantizer;
    const ad::Var cy = ad::add_scalar(ad::exp(logc), tm.sigma2);
    const ad::Var level = ad::row_mean(cy);
    const ad::Var rho = ad::map(
        level, [q](double m) { return capped_gain(m, q); }, [q](double m) { return capped_gain_derivative(m, q); });
    const ad::Var rho2 = ad::square(rho);
    const ad::Var cr = ad::add(ad::mul_col(cy, rho2),
                               ad::mul_col(ad::broadcast_cols(level, n), ad::add_scalar(ad::scale(rho2, -1.0), 1.0)));
    const ad::Var inv = ad::map(
        cr, [](double v) { return 1.0 / v; }, [](double v) { return -1.0 / (v * v); });
    data = ad::add(ad::log(cr), ad::mul(power, inv));
  }
  // KL(N(mu, sigma^2) || N(0, 1)) summed over the latent dimensions.
  const ad::Var kl = ad::scale(
      ad::sub(ad::add(ad::square(mu), ad::exp(logvar)), ad::add_scalar(logvar, 1.0)), 0.5);
  const ad::Var total = ad::scale(ad::add(ad::sum(data), ad::sum(kl)), 1.0 / static_cast<double>(b));

  ElboResult out;
  out.loss = total.value()(0, 0);
  if (with_gradients) {
    tape.backward(total);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const RMatrix& g = params[i].grad();
      out.gradients.push_back(g.size() == 0 ? RMatrix::Zero(ptrs[i]->rows(), ptrs[i]->cols()) : g);
    }
  }
  return out;
}

namespace {

RMatrix draw_eps(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RMatrix e(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) e(i, j) = rng.normal();
  }
  return e;
}

}  // namespace

ElboResult elbo_loss(const VaeModel& model, const CVector& h, Rng& rng) {
  if (model.arch.pilots != 1) throw std::invalid_argument("elbo_loss: single-pilot model expected");
  const RMatrix eps = draw_eps(rng, 1, static_cast<Eigen::Index>(model.arch.latent));
  return elbo_batch(model, h, h, eps, ElboTarget{});
}

ElboResult elbo_loss_quantized(const VaeModel& model, const CVector& r, double sigma2,
                               const QuantizerSpec& q, Rng& rng) {
  if (model.arch.pilots != 1) throw std::invalid_argument("elbo_loss_quantized: single-snapshot model expected");
  const RMatrix eps = draw_eps(rng, 1, static_cast<Eigen::Index>(model.arch.latent));
  return elbo_batch(model, r, r, eps, ElboTarget{ObservationKind::Quantized, sigma2, q});
}

double GradCheckReport::worst() const {
  double w = 0.0;
  for (double e : max_relative_error) w = std::max(w, e);
  return w;
}

GradCheckReport gradient_check(const VaeModel& model, const CMatrix& encoder_input, const CMatrix& target,
                               const RMatrix& eps, const ElboTarget& tm, double step, double floor) {
  const ElboResult analytic = elbo_batch(model, encoder_input, target, eps, tm, true);
  VaeModel probe = model;
  std::vector<RMatrix*> ptrs = probe.parameters();
  GradCheckReport report;
  for (std::size_t blk = 0; blk < ptrs.size(); ++blk) {
    double worst = 0.0;
    RMatrix& p = *ptrs[blk];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + step;
      const double up = elbo_batch(probe, encoder_input, target, eps, tm, false).loss;
      p.data()[i] = saved - step;
      const double down = elbo_batch(probe, encoder_input, target, eps, tm, false).loss;
      p.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic.gradients[blk].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    report.max_relative_error.push_back(worst);
  }
  return report;
}

namespace {

void check_arch(const VaeArchitecture& arch, Eigen::Index antennas, std::size_t pilots, const char* who) {
  if (static_cast<Eigen::Index>(arch.antennas) != antennas || arch.pilots != pilots) {
    throw std::invalid_argument(std::string(who) + ": architecture does not match the data shape");
  }
}

CMatrix gather(const CMatrix& x, const std::vector<std::size_t>& index) {
  CMatrix out(x.rows(), static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = x.col(static_cast<Eigen::Index>(index[i]));
  return out;
}

}  // namespace

VaeModel train_vae(const CMatrix& channels, const PilotConfig& pilots, int bits, const VaeArchitecture& arch,
                   const TrainOptions& options, Rng& rng, TrainReport* report, const ProgressSink& progress) {
  check_arch(arch, channels.rows(), pilots.count(), "train_vae");
  VaeModel model = make_vae(arch, rng);
  const Rng noise_root = rng.substream(0x0b5e);
  const auto l = static_cast<Eigen::Index>(arch.latent);
  auto loss = [&](const std::vector<std::size_t>& idx, std::uint64_t epoch, bool grads, Rng& r) {
    const CMatrix input = detail::simulate_observations(channels, idx, pilots, bits, options, noise_root, epoch);
    const RMatrix eps = draw_eps(r, static_cast<Eigen::Index>(idx.size()), l);
    ElboResult e = elbo_batch(model, input, gather(channels, idx), eps, ElboTarget{}, grads);
    return detail::BatchLoss{e.loss, std::move(e.gradients)};
  };
  detail::run_training(model.parameters(), static_cast<std::size_t>(channels.cols()), options, rng, loss, report,
                       progress, "train_vae");
  return model;
}

VaeModel train_vae_quantized(const CMatrix& observations, double sigma2, const QuantizerSpec& q,
                             const VaeArchitecture& arch, const TrainOptions& options, Rng& rng,
                             TrainReport* report, const ProgressSink& progress) {
  check_arch(arch, observations.rows(), 1, "train_vae_quantized");
  VaeModel model = make_vae(arch, rng);
  const ElboTarget tm{ObservationKind::Quantized, sigma2, q};
  const auto l = static_cast<Eigen::Index>(arch.latent);
  auto loss = [&](const std::vector<std::size_t>& idx, std::uint64_t, bool grads, Rng& r) {
    const CMatrix x = gather(observations, idx);
    const RMatrix eps = draw_eps(r, static_cast<Eigen::Index>(idx.size()), l);
    ElboResult e = elbo_batch(model, x, x, eps, tm, grads);
    return detail::BatchLoss{e.loss, std::move(e.gradients)};
  };
  detail::run_training(model.parameters(), static_cast<std::size_t>(observations.cols()), options, rng, loss,
                       report, progress, "train_vae_quantized");
  return model;
}

RMatrix vae_latent_mean(const VaeModel& model, const CMatrix& encoder_input) {
  ad::Tape tape;
  std::vector<ad::Var> params;
  for (const RMatrix* p : model.parameters()) params.push_back(tape.constant(*p));
  const ad::Var enc = encode(model, tape, params, encoder_input);
  return enc.value().leftCols(static_cast<Eigen::Index>(model.arch.latent));
}

RMatrix vae_decode(const VaeModel& model, const RMatrix& z) {
  return mlp_forward(model.decoder, z).array().exp();
}

CMatrix estimate_bvae(const VaeModel& model, const CMatrix& r, const PilotConfig& pilots, double sigma2,
                      const QuantizerSpec& q) {
  check_arch(model.arch, r.rows() / static_cast<Eigen::Index>(std::max<std::size_t>(pilots.count(), 1)),
             pilots.count(), "estimate_bvae");
  const RMatrix spectra = vae_decode(model, vae_latent_mean(model, r));
  CMatrix out(static_cast<Eigen::Index>(model.arch.antennas), r.cols());
  parallel_for(static_cast<std::size_t>(r.cols()), [&](std::size_t t) {
    const auto col = static_cast<Eigen::Index>(t);
    const CirculantLmmse filter(spectra.row(col).transpose(), pilots, sigma2, q);
    out.col(col) = filter.apply(r.col(col));
  });
  return out;
}

}  // namespace qce
