// Copyright 2026 The seqauction Authors.
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

#ifndef SEQAUCTION_RNG_HPP_
#define SEQAUCTION_RNG_HPP_

#include <cstdint>

namespace seqauction {

// SplitMix64 finalizer.
inline std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t HashCombine(std::uint64_t a, std::uint64_t b) {
  return Mix64(a ^ Mix64(b + 0x632be59bd9b4e019ULL));
}

// Counter-based generator. The stream for (seed, key) is a pure function of
// its inputs, so work can be sharded across threads without changing draws.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t key)
      : key_(HashCombine(seed, key)) {}

  std::uint64_t Bits(std::uint64_t counter) const {
    return Mix64(key_ ^ Mix64(counter));
  }

  // Uniform on the open interval (0, 1).
  double Uniform(std::uint64_t counter) const {
    return (static_cast<double>(Bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Sequential view over a CounterRng.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t key) : rng_(seed, key) {}
  double NextUniform() { return rng_.Uniform(counter_++); }
  std::uint64_t NextBits() { return rng_.Bits(counter_++); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace seqauction

#endif  // SEQAUCTION_RNG_HPP_
