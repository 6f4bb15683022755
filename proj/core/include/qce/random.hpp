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
#include <random>

#include "qce/types.hpp"

namespace qce {

// Seeded random stream. Substreams are derived from the construction seed
// only (not from the current engine state), so sample t of a dataset is the
// same no matter how many other samples were drawn before it or on which
// worker thread it is generated.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  Rng substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  // Circularly symmetric CN(0, 1): real and imaginary parts are N(0, 1/2).
  Complex complex_normal();
  std::size_t index(std::size_t bound);   // uniform in [0, bound)

  CVector complex_normal_vector(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qce
