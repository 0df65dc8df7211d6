// Copyright 2026 The dpmi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMI_COMMON_RNG_H_
#define DPMI_COMMON_RNG_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dpmi {

// Seeded random stream owned by a single job. Every stochastic operation in
// the toolkit takes an explicit Rng so that runs are reproducible and
// parallel lanes never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (seed, stream). Forking does not consume
  // from the parent.
  Rng Fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n). Requires n > 0.
  std::size_t UniformIndex(std::size_t n);
  bool Bernoulli(double p);
  double Normal(double mean = 0.0, double stddev = 1.0);
  // Zero-mean Laplace with the given scale (b parameter).
  double Laplace(double scale);

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    std::shuffle(values.begin(), values.end(), engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream id (splitmix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace dpmi

#endif  // DPMI_COMMON_RNG_H_
