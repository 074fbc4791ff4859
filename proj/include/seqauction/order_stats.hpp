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

#ifndef SEQAUCTION_ORDER_STATS_HPP_
#define SEQAUCTION_ORDER_STATS_HPP_

#include <sstream>

#include "seqauction/distribution.hpp"
#include "seqauction/numerics.hpp"

namespace seqauction {

// Law of the k-th highest of n iid draws from base.
struct OrderStatLaw {
  ValueDistribution base;
  int n;
  int k;
};

// Law of the k-th highest of n draws given the j-th highest equals x_j.
struct ConditionalOrderLaw {
  ValueDistribution base;
  int n;
  int k;
  int j;
};

struct CdfPdf {
  double cdf;
  double pdf;
};

inline void CheckRanks(int n, int k) {
  if (n < 1 || k < 1 || k > n) {
    std::ostringstream msg;
    msg << "order statistic rank k = " << k << " invalid for n = " << n;
    throw std::invalid_argument(msg.str());
  }
}

// f_k / f as a function of u = F(x).
inline double OrderWeight(int n, int k, double u) {
  const double c = n * Binomial(n - 1, k - 1);
  return c * IPow(u, n - k) * IPow(1.0 - u, k - 1);
}

// F_k as a function of u = F(x).
inline double OrderCdfFromU(int n, int k, double u) {
  double s = 0.0;
  for (int j = 0; j < k; ++j) {
    s += Binomial(n, j) * IPow(1.0 - u, j) * IPow(u, n - j);
  }
  return s;
}

inline CdfPdf OrderCdfPdf(const OrderStatLaw& law, double x) {
  CheckRanks(law.n, law.k);
  CheckInSupport(law.base, x, "order statistic");
  const double u = law.base.Cdf(x);
  return {OrderCdfFromU(law.n, law.k, u),
          OrderWeight(law.n, law.k, u) * law.base.Pdf(x)};
}

// Law of the k-th highest of the n_bidders - 1 rivals of a bidder.
inline CdfPdf RivalCdfPdf(const ValueDistribution& d, int n_bidders, int k,
                          double x) {
  return OrderCdfPdf({d, n_bidders - 1, k}, x);
}

namespace detail {

// Truncated iid sample behind a conditional order law: m draws, rank within
// them, truncated cdf and density at x.
struct TruncatedRank {
  int m;
  int rank;
  double u;
  double dens;
};

inline TruncatedRank Truncate(const ConditionalOrderLaw& law, double xj,
                              double x) {
  CheckRanks(law.n, law.k);
  CheckRanks(law.n, law.j);
  if (law.k == law.j) {
    throw std::invalid_argument("conditional law needs k != j");
  }
  CheckInSupport(law.base, xj, "conditioning value");
  const ValueDistribution& d = law.base;
  const double fj = d.Cdf(xj);
  if (law.k > law.j) {
    if (x > xj) throw DomainError("conditional law: x above conditioning value");
    if (!(fj > 0.0)) throw DomainError("conditional law: F(x_j) = 0");
    return {law.n - law.j, law.k - law.j, std::min(d.Cdf(x) / fj, 1.0),
            d.Pdf(x) / fj};
  }
  if (x < xj) throw DomainError("conditional law: x below conditioning value");
  const double tail = 1.0 - fj;
  if (!(tail > 0.0)) throw DomainError("conditional law: F(x_j) = 1");
  return {law.j - 1, law.k, std::clamp((d.Cdf(x) - fj) / tail, 0.0, 1.0),
          d.Pdf(x) / tail};
}

}  // namespace detail

inline double CondDensity(const ConditionalOrderLaw& law, double xj, double x) {
  const auto t = detail::Truncate(law, xj, x);
  return OrderWeight(t.m, t.rank, t.u) * t.dens;
}

inline double CondCdf(const ConditionalOrderLaw& law, double xj, double x) {
  const auto t = detail::Truncate(law, xj, x);
  return OrderCdfFromU(t.m, t.rank, t.u);
}

inline QuadratureOptions TightQuadrature() { return {1e-11, 40}; }

// E[X_(k)] for n draws.
inline double ExpectedOrderStat(const ValueDistribution& d, int n, int k) {
  CheckRanks(n, k);
  if (d.IsUniform()) {
    return d.lower() + (d.upper() - d.lower()) * (n + 1.0 - k) / (n + 1.0);
  }
  const OrderStatLaw law{d, n, k};
  return Integrate([&](double x) { return x * OrderCdfPdf(law, x).pdf; },
                   d.lower(), d.upper(), TightQuadrature());
}

namespace detail {

// E[max of m iid draws truncated to [lower, t]] = t - int (F(s)/F(t))^m ds.
inline double TruncatedMaxMean(const ValueDistribution& d, int m, double t) {
  if (t <= d.lower()) return d.lower();
  const double ft = d.Cdf(t);
  return t - Integrate([&](double s) { return IPow(d.Cdf(s) / ft, m); },
                       d.lower(), t, TightQuadrature());
}

inline double ExpectedSecondRivalGivenFirstNumeric(const ValueDistribution& d,
                                                   int n_bidders, double x) {
  return TruncatedMaxMean(d, n_bidders - 2, x);
}

inline double ExpectedFirstRivalBelowNumeric(const ValueDistribution& d,
                                             int n_bidders, double t) {
  return TruncatedMaxMean(d, n_bidders - 1, t);
}

}  // namespace detail

// E[Y_2 | Y_1 = x] where Y are the n_bidders - 1 rival values.
inline double ExpectedSecondRivalGivenFirst(const ValueDistribution& d,
                                            int n_bidders, double x) {
  CheckInSupport(d, x, "conditioning value");
  if (n_bidders < 3) throw std::invalid_argument("needs at least 3 bidders");
  if (d.IsUniform()) {
    return d.lower() + (x - d.lower()) * (n_bidders - 2.0) / (n_bidders - 1.0);
  }
  return detail::ExpectedSecondRivalGivenFirstNumeric(d, n_bidders, x);
}

// E[Y_1 | Y_1 <= t] where Y are the n_bidders - 1 rival values.
inline double ExpectedFirstRivalBelow(const ValueDistribution& d, int n_bidders,
                                      double t) {
  CheckInSupport(d, t, "truncation point");
  if (n_bidders < 2) throw std::invalid_argument("needs at least 2 bidders");
  if (d.IsUniform()) {
    return d.lower() + (t - d.lower()) * (n_bidders - 1.0) / n_bidders;
  }
  return detail::ExpectedFirstRivalBelowNumeric(d, n_bidders, t);
}

}  // namespace seqauction

#endif  // SEQAUCTION_ORDER_STATS_HPP_
