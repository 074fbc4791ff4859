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

#ifndef SEQAUCTION_COMMON_HPP_
#define SEQAUCTION_COMMON_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace seqauction {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Argument outside the support of a distribution or outside a law's range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Quadrature, Newton or bisection failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested combination of mechanism, regime and parameters is not supported.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Binomial coefficient as a double. Exact for the small n used here.
inline double Binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// pow with the 0^0 = 1 convention and integer exponents kept exact.
inline double IPow(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace seqauction

#endif  // SEQAUCTION_COMMON_HPP_
