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

#include "qce/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace qce {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

namespace {

constexpr std::array<char, 8> kDataMagic{'Q', 'C', 'E', 'D', 'A', 'T', 'A', '1'};
constexpr std::array<char, 8> kModelMagic{'Q', 'C', 'E', 'M', 'O', 'D', 'L', '1'};
constexpr std::array<char, 8> kNetMagic{'Q', 'C', 'E', 'N', 'N', 'E', 'T', '1'};

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void magic(const std::array<char, 8>& m) { out_.write(m.data(), 8); }
  void complex(Complex z) {
    put(z.real());
    put(z.imag());
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed for '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path + "'");
  }
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw IoError("'" + path_ + "' is truncated");
    return v;
  }
  void magic(const std::array<char, 8>& m, const char* what) {
    std::array<char, 8> got{};
    in_.read(got.data(), 8);
    if (!in_ || got != m) throw IoError("'" + path_ + "' is not a " + what + " file");
  }
  Complex complex() {
    const double re = get<double>();
    return {re, get<double>()};
  }
  std::uint32_t count(std::uint32_t limit, const char* what) {
    const auto v = get<std::uint32_t>();
    if (v > limit) throw IoError("'" + path_ + "': implausible " + what + " " + std::to_string(v));
    return v;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

constexpr std::uint32_t kMaxDim = 1u << 20;

void write_header(Writer& w, const DatasetHeader& h) {
  w.magic(kDataMagic);
  w.put(h.version);
  w.put(h.antennas);
  w.put(h.pilots);
  w.put(h.count);
  w.put(h.flags);
}

void write_samples(Writer& w, const CMatrix& x) {
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      w.put(static_cast<float>(x(i, t).real()));
      w.put(static_cast<float>(x(i, t).imag()));
    }
  }
}

DatasetHeader read_header(Reader& r) {
  r.magic(kDataMagic, "QCE1 dataset");
  DatasetHeader h;
  h.version = r.get<std::uint32_t>();
  if (h.version != kDatasetVersion) throw IoError("'" + r.path() + "': unsupported dataset version");
  h.antennas = r.count(kMaxDim, "antenna count");
  h.pilots = r.count(kMaxDim, "pilot count");
  h.count = r.get<std::uint32_t>();
  h.flags = r.get<std::uint32_t>();
  if (h.antennas == 0 || h.pilots == 0) throw IoError("'" + r.path() + "': empty dimensions");
  return h;
}

CMatrix read_samples(Reader& r, std::uint32_t rows, std::uint32_t cols) {
  CMatrix x(rows, cols);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const float re = r.get<float>();
      x(i, t) = Complex(re, r.get<float>());
    }
  }
  return x;
}

void read_trailer(Reader& r, DatasetHeader& h) {
  if (h.quantized()) {
    const auto bits = static_cast<int>(r.count(kMaxBits, "bit width"));
    const double step = r.get<double>();
    h.quantizer = bits == 0 ? QuantizerSpec::infinite() : QuantizerSpec::uniform(bits, step);
  }
  if ((h.flags & kFlagSigma2) != 0) h.sigma2 = r.get<double>();
}

}  // namespace

void write_channels(const std::string& path, const ChannelDataset& data) {
  Writer w(path);
  DatasetHeader h;
  h.antennas = static_cast<std::uint32_t>(data.antennas());
  h.count = static_cast<std::uint32_t>(data.size());
  write_header(w, h);
  write_samples(w, data.samples);
  w.finish();
}

void write_observations(const std::string& path, const QuantizedDataset& data) {
  Writer w(path);
  DatasetHeader h;
  h.antennas = static_cast<std::uint32_t>(data.antennas);
  h.pilots = static_cast<std::uint32_t>(data.pilots.count());
  h.count = static_cast<std::uint32_t>(data.size());
  h.flags = kFlagQuantized | kFlagSigma2;
  write_header(w, h);
  write_samples(w, data.observations);
  w.put(static_cast<std::uint32_t>(data.quantizer.bits));
  w.put(data.quantizer.step);
  w.put(data.sigma2);
  w.finish();
}

DatasetHeader read_dataset_header(const std::string& path) {
  Reader r(path);
  DatasetHeader h = read_header(r);
  read_samples(r, h.antennas * h.pilots, h.count);
  read_trailer(r, h);
  return h;
}

ChannelDataset read_channels(const std::string& path) {
  Reader r(path);
  DatasetHeader h = read_header(r);
  if (h.quantized()) throw IoError("'" + path + "' holds quantized observations, not channels");
  ChannelDataset d;
  d.samples = read_samples(r, h.antennas, h.count);
  d.scenario.antennas = h.antennas;
  return d;
}

QuantizedDataset read_observations(const std::string& path) {
  Reader r(path);
  DatasetHeader h = read_header(r);
  if (!h.quantized()) throw IoError("'" + path + "' holds channels, not quantized observations");
  QuantizedDataset d;
  d.observations = read_samples(r, h.antennas * h.pilots, h.count);
  read_trailer(r, h);
  d.antennas = h.antennas;
  d.pilots = make_pilots(h.pilots);
  d.sigma2 = h.sigma2;
  d.quantizer = h.quantizer;
  return d;
}

namespace {

void write_model_header(Writer& w, ModelKind kind, CovarianceStructure s, std::size_t k, std::size_t n,
                        std::size_t l, const RVector& weights) {
  w.magic(kModelMagic);
  w.put(std::uint32_t{1});
  w.put(static_cast<std::uint32_t>(kind));
  w.put(static_cast<std::uint32_t>(s));
  w.put(static_cast<std::uint32_t>(k));
  w.put(static_cast<std::uint32_t>(n));
  w.put(static_cast<std::uint32_t>(l));
  for (Eigen::Index i = 0; i < weights.size(); ++i) w.put(weights(i));
}

ModelHeader read_model_header_from(Reader& r) {
  r.magic(kModelMagic, "QCM1 model");
  ModelHeader h;
  h.version = r.get<std::uint32_t>();
  if (h.version != 1) throw IoError("'" + r.path() + "': unsupported model version");
  const auto kind = r.get<std::uint32_t>();
  if (kind > 1) throw IoError("'" + r.path() + "': unknown model kind");
  h.kind = static_cast<ModelKind>(kind);
  const auto s = r.get<std::uint32_t>();
  if (s > 2) throw IoError("'" + r.path() + "': unknown covariance structure");
  h.structure = static_cast<CovarianceStructure>(s);
  h.components = r.count(kMaxDim, "component count");
  h.antennas = r.count(kMaxDim, "antenna count");
  h.latent = r.count(kMaxDim, "latent dimension");
  if (h.components == 0 || h.antennas == 0) throw IoError("'" + r.path() + "': empty model");
  return h;
}

RVector read_weights(Reader& r, std::uint32_t k) {
  RVector w(k);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = r.get<double>();
  return w;
}

}  // namespace

void write_gmm(const std::string& path, const GmmModel& model) {
  Writer w(path);
  const std::size_t n = model.antennas();
  write_model_header(w, ModelKind::Gmm, model.structure, model.components(), n, 0, model.weights);
  for (std::size_t k = 0; k < model.components(); ++k) {
    const CMatrix& c = model.covariances[k];
    switch (model.structure) {
      case CovarianceStructure::Full:
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
          for (Eigen::Index i = 0; i < c.rows(); ++i) w.complex(c(i, j));
        }
        break;
      case CovarianceStructure::Toeplitz:
        for (Eigen::Index i = 0; i < c.rows(); ++i) w.complex(c(i, 0));
        for (Eigen::Index j = 0; j < c.cols(); ++j) w.complex(c(0, j));
        break;
      case CovarianceStructure::Circulant:
        for (Eigen::Index i = 0; i < model.spectra[k].size(); ++i) w.put(model.spectra[k](i));
        break;
    }
  }
  w.finish();
}

void write_mfa(const std::string& path, const MfaModel& model) {
  Writer w(path);
  write_model_header(w, ModelKind::Mfa, CovarianceStructure::Full, model.components(), model.antennas(),
                     model.latent_dim(), model.weights);
  for (std::size_t k = 0; k < model.components(); ++k) {
    const CMatrix& l = model.loadings[k];
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      for (Eigen::Index i = 0; i < l.rows(); ++i) w.complex(l(i, j));
    }
    w.put(model.psi[k]);
  }
  w.finish();
}

ModelHeader read_model_header(const std::string& path) {
  Reader r(path);
  return read_model_header_from(r);
}

GmmModel read_gmm(const std::string& path) {
  Reader r(path);
  const ModelHeader h = read_model_header_from(r);
  if (h.kind == ModelKind::Mfa) return read_mfa(path).as_gmm();
  GmmModel m;
  m.structure = h.structure;
  m.weights = read_weights(r, h.components);
  const auto n = static_cast<Eigen::Index>(h.antennas);
  for (std::uint32_t k = 0; k < h.components; ++k) {
    CMatrix c(n, n);
    switch (h.structure) {
      case CovarianceStructure::Full:
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index i = 0; i < n; ++i) c(i, j) = r.complex();
        }
        break;
      case CovarianceStructure::Toeplitz: {
        CVector col(n);
        CVector row(n);
        for (Eigen::Index i = 0; i < n; ++i) col(i) = r.complex();
        for (Eigen::Index j = 0; j < n; ++j) row(j) = r.complex();
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) c(i, j) = i >= j ? col(i - j) : row(j - i);
        }
        break;
      }
      case CovarianceStructure::Circulant: {
        RVector s(n);
        for (Eigen::Index i = 0; i < n; ++i) s(i) = r.get<double>();
        c = circulant_from_spectrum(s);
        m.spectra.push_back(std::move(s));
        break;
      }
    }
    m.covariances.push_back(std::move(c));
  }
  return m;
}

MfaModel read_mfa(const std::string& path) {
  Reader r(path);
  const ModelHeader h = read_model_header_from(r);
  if (h.kind != ModelKind::Mfa) throw IoError("'" + path + "' holds a GMM, not an MFA model");
  MfaModel m;
  m.weights = read_weights(r, h.components);
  const auto n = static_cast<Eigen::Index>(h.antennas);
  const auto l = static_cast<Eigen::Index>(h.latent);
  for (std::uint32_t k = 0; k < h.components; ++k) {
    CMatrix w(n, l);
    for (Eigen::Index j = 0; j < l; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) w(i, j) = r.complex();
    }
    m.loadings.push_back(std::move(w));
    m.psi.push_back(r.get<double>());
  }
  return m;
}

namespace {

void put_list(Writer& w, const std::vector<std::size_t>& v) {
  w.put(static_cast<std::uint32_t>(v.size()));
  for (std::size_t x : v) w.put(static_cast<std::uint32_t>(x));
}

std::vector<std::size_t> get_list(Reader& r) {
  const std::uint32_t len = r.count(64, "layer count");
  std::vector<std::size_t> v;
  for (std::uint32_t i = 0; i < len; ++i) v.push_back(r.count(kMaxDim, "layer width"));
  return v;
}

void put_blob(Writer& w, const std::vector<const RMatrix*>& params) {
  std::uint64_t total = 0;
  for (const RMatrix* p : params) total += static_cast<std::uint64_t>(p->size());
  w.put(total);
  for (const RMatrix* p : params) {
    for (Eigen::Index i = 0; i < p->size(); ++i) w.put(p->data()[i]);
  }
}

void get_blob(Reader& r, const std::vector<RMatrix*>& params) {
  std::uint64_t expected = 0;
  for (const RMatrix* p : params) expected += static_cast<std::uint64_t>(p->size());
  const auto total = r.get<std::uint64_t>();
  if (total != expected) throw IoError("'" + r.path() + "': parameter count does not match the architecture");
  for (RMatrix* p : params) {
    for (Eigen::Index i = 0; i < p->size(); ++i) p->data()[i] = r.get<double>();
  }
}

std::vector<std::size_t> mlp_widths(const MlpParams& m) {
  std::vector<std::size_t> w{m.input_dim()};
  for (const DenseLayer& l : m.layers) w.push_back(static_cast<std::size_t>(l.weight.cols()));
  return w;
}

MlpParams mlp_shell(const std::vector<std::size_t>& widths) {
  MlpParams m;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    DenseLayer l;
    l.weight = RMatrix::Zero(static_cast<Eigen::Index>(widths[i]), static_cast<Eigen::Index>(widths[i + 1]));
    l.bias = RMatrix::Zero(1, static_cast<Eigen::Index>(widths[i + 1]));
    l.activation = i + 2 < widths.size() ? Activation::Relu : Activation::Linear;
    m.layers.push_back(std::move(l));
  }
  return m;
}

NetworkHeader read_net_header(Reader& r) {
  r.magic(kNetMagic, "QCV1 network");
  NetworkHeader h;
  h.version = r.get<std::uint32_t>();
  if (h.version != 1) throw IoError("'" + r.path() + "': unsupported network version");
  const auto kind = r.get<std::uint32_t>();
  if (kind > 1) throw IoError("'" + r.path() + "': unknown network kind");
  h.kind = static_cast<NetworkKind>(kind);
  h.antennas = r.count(kMaxDim, "antenna count");
  h.pilots = r.count(kMaxDim, "pilot count");
  h.latent = r.count(kMaxDim, "latent dimension");
  return h;
}

}  // namespace

void write_vae(const std::string& path, const VaeModel& model) {
  Writer w(path);
  w.magic(kNetMagic);
  w.put(std::uint32_t{1});
  w.put(static_cast<std::uint32_t>(NetworkKind::Vae));
  w.put(static_cast<std::uint32_t>(model.arch.antennas));
  w.put(static_cast<std::uint32_t>(model.arch.pilots));
  w.put(static_cast<std::uint32_t>(model.arch.latent));
  put_list(w, model.arch.conv_channels);
  put_list(w, model.arch.encoder_widths);
  put_list(w, model.arch.decoder_widths);
  put_blob(w, model.parameters());
  w.finish();
}

void write_dnn(const std::string& path, const MlpParams& dnn) {
  Writer w(path);
  w.magic(kNetMagic);
  w.put(std::uint32_t{1});
  w.put(static_cast<std::uint32_t>(NetworkKind::Dnn));
  const std::size_t n = dnn.output_dim() / 2;
  w.put(static_cast<std::uint32_t>(n));
  w.put(static_cast<std::uint32_t>(n == 0 ? 0 : dnn.input_dim() / (2 * n)));
  w.put(std::uint32_t{0});
  put_list(w, mlp_widths(dnn));
  MlpParams copy = dnn;
  std::vector<RMatrix*> params;
  copy.collect(params);
  put_blob(w, {params.begin(), params.end()});
  w.finish();
}

NetworkHeader read_network_header(const std::string& path) {
  Reader r(path);
  NetworkHeader h = read_net_header(r);
  if (h.kind == NetworkKind::Vae) {
    get_list(r);
    get_list(r);
  }
  get_list(r);
  h.parameters = r.get<std::uint64_t>();
  return h;
}

VaeModel read_vae(const std::string& path) {
  Reader r(path);
  const NetworkHeader h = read_net_header(r);
  if (h.kind != NetworkKind::Vae) throw IoError("'" + path + "' holds a DNN, not a VAE");
  VaeModel m;
  m.arch.antennas = h.antennas;
  m.arch.pilots = h.pilots;
  m.arch.latent = h.latent;
  m.arch.conv_channels = get_list(r);
  m.arch.encoder_widths = get_list(r);
  m.arch.decoder_widths = get_list(r);
  for (std::size_t i = 0; i + 1 < m.arch.conv_channels.size(); ++i) {
    m.conv_weights.push_back(RMatrix::Zero(static_cast<Eigen::Index>(m.arch.conv_channels[i]),
                                           static_cast<Eigen::Index>(m.arch.conv_channels[i + 1])));
    m.conv_biases.push_back(RMatrix::Zero(1, static_cast<Eigen::Index>(m.arch.conv_channels[i + 1])));
  }
  m.encoder = mlp_shell(m.arch.encoder_widths);
  m.decoder = mlp_shell(m.arch.decoder_widths);
  get_blob(r, m.parameters());
  return m;
}

MlpParams read_dnn(const std::string& path) {
  Reader r(path);
  const NetworkHeader h = read_net_header(r);
  if (h.kind != NetworkKind::Dnn) throw IoError("'" + path + "' holds a VAE, not a DNN");
  MlpParams m = mlp_shell(get_list(r));
  std::vector<RMatrix*> params;
  m.collect(params);
  get_blob(r, params);
  return m;
}

}  // namespace qce
