// Copyright 2026 The AssertForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASSERTFORGE_RANDOM_H_
#define ASSERTFORGE_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace assertforge {

// mt19937_64 with distribution helpers written out by hand. The standard
// distributions are implementation-defined, which would make seeded outputs
// differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n); n must be positive. Rejection sampling, no bias.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Knuth's multiplication method; fine for the small means used here.
  int Poisson(double lambda) {
    const double limit = std::exp(-lambda);
    int k = 0;
    double prod = Uniform();
    while (prod > limit) {
      ++k;
      prod *= Uniform();
    }
    return k;
  }

  // Box-Muller; one value per call.
  double Normal(double mean, double stddev) {
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates over Rng::Below.
template <typename T>
void ShuffleInPlace(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.Below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace assertforge

#endif  // ASSERTFORGE_RANDOM_H_
