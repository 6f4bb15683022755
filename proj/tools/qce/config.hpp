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
#include <vector>

#include <json.hpp>

#include "qce/channels.hpp"
#include "qce/mixtures.hpp"
#include "qce/mlp.hpp"

namespace qce::cli {

inline constexpr int kConfigVersion = 1;

// Entry of the evaluation estimator list. A bare name in the config file
// ("bgmm") is shorthand for {"kind": "bgmm"}; `model` overrides the default
// model path inside the output directory.
struct EstimatorEntry {
  std::string kind;
  std::string label;
  std::string model;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  ScenarioConfig scenario;

  std::size_t pilots = 1;
  std::vector<int> bits{1};  // 0 = "inf"
  std::vector<double> snr_db{0.0, 10.0};

  std::size_t train_size = 10000;
  std::size_t test_size = 1000;

  std::string model_type = "gmm";  // gmm, mfa, vae, dnn
  std::string training = "H";      // H: channels, R: quantized observations
  std::size_t components = 16;
  std::size_t latent = 4;
  CovarianceStructure structure = CovarianceStructure::Full;
  EmOptions em;
  TrainOptions train;

  std::vector<EstimatorEntry> estimators{{"buss_genie", "", ""}};
  bool record_timing = false;

  std::vector<int> recover_bits{2, 3};
  std::vector<std::size_t> recover_sizes{1000, 10000, 100000};
  std::size_t recover_trials = 20;

  std::string out_dir = "qce_out";
};

// Validates against the schema; throws IoError naming the offending key.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

}  // namespace qce::cli
