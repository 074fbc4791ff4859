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

#ifndef SEQAUCTION_DISTRIBUTION_HPP_
#define SEQAUCTION_DISTRIBUTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seqauction/common.hpp"
#include "seqauction/numerics.hpp"
#include "seqauction/rng.hpp"

namespace seqauction {

// Monotone piecewise-cubic (Fritsch-Carlson) interpolant of a tabulated CDF.
class TabulatedCdf {
 public:
  TabulatedCdf(std::vector<double> grid, std::vector<double> cdf)
      : x_(std::move(grid)), y_(std::move(cdf)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
      throw std::invalid_argument(
          "tabulated cdf needs at least two points and matching lengths");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(x_[i + 1] > x_[i])) {
        throw std::invalid_argument("tabulated grid must be strictly increasing");
      }
      if (y_[i + 1] < y_[i]) {
        throw std::invalid_argument("tabulated cdf must be non-decreasing");
      }
    }
    if (std::abs(y_.front()) > 1e-12 || std::abs(y_.back() - 1.0) > 1e-12) {
      throw std::invalid_argument("tabulated cdf must run from 0 to 1");
    }
    y_.front() = 0.0;
    y_.back() = 1.0;
    ComputeSlopes();
  }

  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return y_; }

  // Derivative order 0, 1 or 2 of the interpolant at x inside the grid.
  double Eval(double x, int order) const {
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double y0 = y_[i];
    const double y1 = y_[i + 1];
    const double m0 = h * m_[i];
    const double m1 = h * m_[i + 1];
    if (order == 0) {
      const double t2 = t * t;
      const double t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
             (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
    if (order == 1) {
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
              (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) /
             h;
    }
    return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 +
            (6 * t - 2) * m1) /
           (h * h);
  }

 private:
  void ComputeSlopes() {
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    if (n == 2) {
      m_[0] = m_[1] = d[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) continue;
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
    m_[0] = EdgeSlope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = EdgeSlope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }

  static double EdgeSlope(double h0, double h1, double d0, double d1) {
    double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m) > std::abs(3 * d0)) return 3 * d0;
    return m;
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

// Common value distribution F on [lower, upper].
class ValueDistribution {
 public:
  enum class Family { kUniform, kPower, kTabulated };

  static ValueDistribution Uniform(double lower = 0.0, double upper = 1.0) {
    CheckSupport(lower, upper);
    ValueDistribution d;
    d.family_ = Family::kUniform;
    d.lower_ = lower;
    d.upper_ = upper;
    return d;
  }

  // F(x) = (x^k - l^k) / (u^k - l^k).
  static ValueDistribution Power(double exponent, double lower = 0.0,
                                 double upper = 1.0) {
    CheckSupport(lower, upper);
    if (!(exponent > 0.0) || lower < 0.0) {
      throw std::invalid_argument("power family needs k > 0 and lower >= 0");
    }
    ValueDistribution d;
    d.family_ = Family::kPower;
    d.lower_ = lower;
    d.upper_ = upper;
    d.k_ = exponent;
    d.lk_ = std::pow(lower, exponent);
    d.span_ = std::pow(upper, exponent) - d.lk_;
    return d;
  }

  static ValueDistribution Tabulated(std::vector<double> grid,
                                     std::vector<double> cdf) {
    ValueDistribution d;
    d.family_ = Family::kTabulated;
    d.table_ = std::make_shared<const TabulatedCdf>(std::move(grid),
                                                    std::move(cdf));
    d.lower_ = d.table_->lower();
    d.upper_ = d.table_->upper();
    CheckSupport(d.lower_, d.upper_);
    return d;
  }

  Family family() const { return family_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double exponent() const { return k_; }
  const TabulatedCdf* table() const { return table_.get(); }
  bool IsUniform() const { return family_ == Family::kUniform; }

  bool InSupport(double x) const { return x >= lower_ && x <= upper_; }

  double Cdf(double x) const {
    if (x <= lower_) return 0.0;
    if (x >= upper_) return 1.0;
    switch (family_) {
      case Family::kUniform:
        return (x - lower_) / (upper_ - lower_);
      case Family::kPower:
        return (std::pow(x, k_) - lk_) / span_;
      case Family::kTabulated:
        return std::clamp(table_->Eval(x, 0), 0.0, 1.0);
    }
    return kNaN;
  }

  double Pdf(double x) const {
    if (x < lower_ || x > upper_) return 0.0;
    switch (family_) {
      case Family::kUniform:
        return 1.0 / (upper_ - lower_);
      case Family::kPower:
        return k_ * std::pow(x, k_ - 1.0) / span_;
      case Family::kTabulated:
        return std::max(table_->Eval(x, 1), 0.0);
    }
    return kNaN;
  }

  double PdfSlope(double x) const {
    if (x < lower_ || x > upper_) return 0.0;
    switch (family_) {
      case Family::kUniform:
        return 0.0;
      case Family::kPower:
        return k_ * (k_ - 1.0) * std::pow(x, k_ - 2.0) / span_;
      case Family::kTabulated:
        return table_->Eval(x, 2);
    }
    return kNaN;
  }

  double Quantile(double u) const {
    if (u <= 0.0) return lower_;
    if (u >= 1.0) return upper_;
    switch (family_) {
      case Family::kUniform:
        return lower_ + u * (upper_ - lower_);
      case Family::kPower:
        return std::clamp(std::pow(lk_ + u * span_, 1.0 / k_), lower_, upper_);
      case Family::kTabulated:
        return BisectPredicate([&](double x) { return Cdf(x) >= u; }, lower_,
                               upper_, 200);
    }
    return kNaN;
  }

 private:
  ValueDistribution() = default;

  static void CheckSupport(double lower, double upper) {
    if (!(std::isfinite(lower) && std::isfinite(upper) && upper > lower &&
          lower >= 0.0)) {
      throw std::invalid_argument("support must satisfy 0 <= lower < upper");
    }
  }

  Family family_ = Family::kUniform;
  double lower_ = 0.0;
  double upper_ = 1.0;
  double k_ = 1.0;
  double lk_ = 0.0;
  double span_ = 1.0;
  std::shared_ptr<const TabulatedCdf> table_;
};

inline void CheckInSupport(const ValueDistribution& d, double x,
                           const char* what) {
  if (!(x >= d.lower() && x <= d.upper())) {
    std::ostringstream msg;
    msg << what << ": " << x << " outside support [" << d.lower() << ", "
        << d.upper() << "]";
    throw DomainError(msg.str());
  }
}

// psi(x) = x - (1 - F(x)) / f(x), with psi(upper) = upper and -inf where the
// density vanishes below the top of the support.
inline double VirtualValue(const ValueDistribution& d, double x) {
  CheckInSupport(d, x, "virtual value");
  if (x >= d.upper()) return d.upper();
  const double f = d.Pdf(x);
  if (!(f > 0.0)) return -kInf;
  return x - (1.0 - d.Cdf(x)) / f;
}

// psi(x) f(x) = x f(x) - (1 - F(x)). Finite where psi is not.
inline double VirtualDensity(const ValueDistribution& d, double x) {
  return x * d.Pdf(x) - (1.0 - d.Cdf(x));
}

// psi'(x) = 2 + (1 - F) f' / f^2.
inline double VirtualValueSlope(const ValueDistribution& d, double x) {
  const double f = d.Pdf(x);
  return 2.0 + (1.0 - d.Cdf(x)) * d.PdfSlope(x) / (f * f);
}

// Allocation margin psi(x) + weight * (x - z). The same expression backs every
// allocation test and the threshold search, so both agree exactly.
inline double AllocationMargin(const ValueDistribution& d, double x, double z,
                               double weight = 1.0) {
  return VirtualValue(d, x) + weight * (x - z);
}

// Smallest x with psi(x) >= v.
inline double InverseVirtual(const ValueDistribution& d, double v) {
  const double lo_psi = VirtualValue(d, d.lower());
  if (!(v <= d.upper()) || std::isnan(v)) {
    std::ostringstream msg;
    msg << "inverse virtual value: " << v << " outside the range of psi";
    throw DomainError(msg.str());
  }
  if (v <= lo_psi) {
    if (v < lo_psi) {
      std::ostringstream msg;
      msg << "inverse virtual value: " << v << " below psi(lower) = " << lo_psi;
      throw DomainError(msg.str());
    }
    return d.lower();
  }
  return BisectPredicate([&](double x) { return VirtualValue(d, x) >= v; },
                         d.lower(), d.upper());
}

// psi^{-1}(0), clamped to the lower bound when psi(lower) >= 0.
inline double PsiInverseZero(const ValueDistribution& d) {
  if (VirtualValue(d, d.lower()) >= 0.0) return d.lower();
  return InverseVirtual(d, 0.0);
}

// a(x) = min{a >= x : psi(a) + weight (a - x) >= 0}; weight 1 is the
// single-unit threshold.
inline double AllocThreshold(const ValueDistribution& d, double x,
                             double weight = 1.0) {
  CheckInSupport(d, x, "allocation threshold");
  if (AllocationMargin(d, x, x, weight) >= 0.0) return x;
  return BisectPredicate(
      [&](double a) { return AllocationMargin(d, a, x, weight) >= 0.0; }, x,
      d.upper());
}

inline std::vector<double> Sample(const ValueDistribution& d, std::int64_t n,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  const CounterRng rng(seed, 0x5a3b1eULL);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        d.Quantile(rng.Uniform(static_cast<std::uint64_t>(i)));
  }
  return out;
}

struct RegularityReport {
  bool passed = true;
  std::optional<double> violation_x;
  std::string message;
};

// psi must be non-decreasing on a 512-point grid up to a 1e-9 slack.
inline RegularityReport ValidateRegularity(const ValueDistribution& d) {
  constexpr int kPoints = 512;
  constexpr double kSlack = 1e-9;
  RegularityReport rep;
  double prev = -kInf;
  for (int i = 0; i < kPoints; ++i) {
    const double x = (i == kPoints - 1)
                         ? d.upper()
                         : d.lower() + (d.upper() - d.lower()) * i /
                                           (kPoints - 1.0);
    const double psi = VirtualValue(d, x);
    if (std::isnan(psi)) {
      rep.passed = false;
      rep.violation_x = x;
      rep.message = "virtual value is NaN";
      return rep;
    }
    if (psi < prev - kSlack) {
      rep.passed = false;
      rep.violation_x = x;
      std::ostringstream msg;
      msg << "virtual value decreases near x = " << x << " (" << prev
          << " -> " << psi << ")";
      rep.message = msg.str();
      return rep;
    }
    prev = psi;
  }
  return rep;
}

}  // namespace seqauction

#endif  // SEQAUCTION_DISTRIBUTION_HPP_
