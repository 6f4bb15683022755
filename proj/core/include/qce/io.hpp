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

#include <cstdint>
#include <string>

#include "qce/channels.hpp"
#include "qce/mixtures.hpp"
#include "qce/mlp.hpp"
#include "qce/vae.hpp"

namespace qce {

// QCE1 dataset files: magic "QCEDATA1", little-endian u32 version, N, P, T,
// flags, then T N P complex64 values sample-major. Flag bit 0 marks quantized
// observations and appends u32 B and f64 step; bit 1 appends f64 sigma2.
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::uint32_t kFlagQuantized = 1u << 0;
inline constexpr std::uint32_t kFlagSigma2 = 1u << 1;

struct DatasetHeader {
  std::uint32_t version = kDatasetVersion;
  std::uint32_t antennas = 0;
  std::uint32_t pilots = 1;
  std::uint32_t count = 0;
  std::uint32_t flags = 0;
  QuantizerSpec quantizer;
  double sigma2 = 0.0;

  bool quantized() const { return (flags & kFlagQuantized) != 0; }
};

void write_channels(const std::string& path, const ChannelDataset& data);
void write_observations(const std::string& path, const QuantizedDataset& data);
DatasetHeader read_dataset_header(const std::string& path);
ChannelDataset read_channels(const std::string& path);
QuantizedDataset read_observations(const std::string& path);

// QCM1 model files: magic "QCEMODL1", u32 version, kind, structure, K, N, L,
// K f64 weights, then per component the covariance payload (complex values
// as f64 pairs): full matrix column-major, Toeplitz first column and first
// row, circulant spectrum, or MFA loadings and psi.
enum class ModelKind : std::uint32_t { Gmm = 0, Mfa = 1 };

struct ModelHeader {
  std::uint32_t version = 1;
  ModelKind kind = ModelKind::Gmm;
  CovarianceStructure structure = CovarianceStructure::Full;
  std::uint32_t components = 0;
  std::uint32_t antennas = 0;
  std::uint32_t latent = 0;
};

void write_gmm(const std::string& path, const GmmModel& model);
void write_mfa(const std::string& path, const MfaModel& model);
ModelHeader read_model_header(const std::string& path);
GmmModel read_gmm(const std::string& path);
MfaModel read_mfa(const std::string& path);

// QCV1 network files: magic "QCENNET1", u32 version, kind, then the
// architecture as u32 lists and the f64 parameter blob in parameter order.
enum class NetworkKind : std::uint32_t { Vae = 0, Dnn = 1 };

struct NetworkHeader {
  std::uint32_t version = 1;
  NetworkKind kind = NetworkKind::Vae;
  std::uint32_t antennas = 0;
  std::uint32_t pilots = 1;
  std::uint32_t latent = 0;
  std::uint64_t parameters = 0;
};

void write_vae(const std::string& path, const VaeModel& model);
void write_dnn(const std::string& path, const MlpParams& dnn);
NetworkHeader read_network_header(const std::string& path);
VaeModel read_vae(const std::string& path);
MlpParams read_dnn(const std::string& path);

}  // namespace qce
