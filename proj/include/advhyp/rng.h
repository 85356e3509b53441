// Copyright 2026 The advhyp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVHYP_RNG_H_
#define ADVHYP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace advhyp {

std::uint64_t splitmix64(std::uint64_t x);

// mt19937_64 with distribution code fixed here rather than left to the
// standard library, so draws are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by (seed, k1, k2, ...).
  static Rng Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., bound - 1} by rejection; bound >= 1.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace advhyp

#endif  // ADVHYP_RNG_H_
