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

#include <ostream>
#include <string>
#include <vector>

#include "qce/config.hpp"

namespace qce::cli {

// Files inside the output directory.
std::string train_channels_path(const RunConfig& c);
std::string train_observations_path(const RunConfig& c, int bits, double snr_db);
std::string default_model_path(const RunConfig& c, const std::string& estimator, int bits, double snr_db);

void cmd_generate(const RunConfig& c);
void cmd_train(const RunConfig& c);
void cmd_recover(const RunConfig& c);
void cmd_evaluate(const RunConfig& c);
// Prints one JSON object per file describing its header.
void cmd_inspect(const std::vector<std::string>& files, std::ostream& out);

// Full command line entry point; returns the process exit code
// (0 success, 1 numerical failure, 2 configuration or I/O error).
int run(int argc, char** argv);

}  // namespace qce::cli
