// Copyright (c) 2026 The fva Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FVA_DIFFCORE_RNG_H_
#define FVA_DIFFCORE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace fva {

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; every derived distribution below is
// implemented here rather than with <random> distributions, which are
// implementation-defined and differ between standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  // Uniform integer on [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller; the spare value is cached.
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (size_t i = v->size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a master seed with a stream tag and index (splitmix64 finalizer) so
// independent consumers get decorrelated, reproducible sub-streams.
uint64_t DeriveSeed(uint64_t master, std::string_view tag, uint64_t index = 0);

}  // namespace fva

#endif  // FVA_DIFFCORE_RNG_H_
