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

#ifndef SEQAUCTION_BENCHMARK_HPP_
#define SEQAUCTION_BENCHMARK_HPP_

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "seqauction/numerics.hpp"
#include "seqauction/order_stats.hpp"
#include "seqauction/third_price.hpp"

namespace seqauction {

// Second-price auction with reserve r1 run before an unrestricted second
// sale. Only the three-bidder pooling equilibrium is implemented.

// E[Y1 | Y1 < x] - E[Y2 | Y1 = x]: positive gap means a separating
// equilibrium breaks down at cutoff x.
inline double SeparatingGap(const ValueDistribution& d, int n, double x_hat) {
  return ExpectedFirstRivalBelow(d, n, x_hat) -
         ExpectedSecondRivalGivenFirst(d, n, x_hat);
}

struct PoolingCutoffs {
  double x_hat;
  double x_hathat;
  double residual;
  bool corner;  // pooling interval reaches the top of the support
};

namespace detail {

inline void CheckBenchmarkN(int n) {
  if (n != 3) {
    throw UnsupportedError(
        "benchmark second-price equilibrium is only implemented for N = 3");
  }
}

inline bool IsUnitUniform(const ValueDistribution& d) {
  return d.IsUniform() && d.lower() == 0.0 && d.upper() == 1.0;
}

// E[X | lo <= X <= hi].
inline double IntervalMean(const ValueDistribution& d, double lo, double hi) {
  if (d.IsUniform()) return 0.5 * (lo + hi);
  const double mass = d.Cdf(hi) - d.Cdf(lo);
  if (!(mass > 0.0)) return 0.5 * (lo + hi);
  return Integrate([&](double s) { return s * d.Pdf(s); }, lo, hi,
                   TightQuadrature()) /
         mass;
}

// Indifference conditions for the pooling cutoffs. The first is divided by
// F(x_hathat) - F(x_hat) to rule out the degenerate root x_hat = x_hathat.
inline std::array<double, 2> PoolingEquations(const ValueDistribution& d,
                                              double r, double xh,
                                              double xhh) {
  const double fh = d.Cdf(xh);
  const double gap = d.Cdf(xhh) - fh;
  const double d0 = ExpectedFirstRivalBelow(d, 3, xh);
  const double d1 = d.IsUniform() ? 0.5 * (d.lower() + xh)
                                  : TruncatedMaxMean(d, 1, xh);
  const double d2 = IntervalMean(d, xh, xhh);
  const double p0 = fh * fh;
  const double p1 = 2.0 * gap * fh;
  const double p2 = gap * gap;
  const double e1 = 2.0 * fh * 0.5 * (d1 - r) + gap * (2.0 / 3.0) * (d2 - r);
  const double e2 = p0 * (d0 - r) + p1 * 0.5 * (d1 - r) +
                    p2 * (1.0 / 3.0) * (xh - r);
  return {e1, e2};
}

}  // namespace detail

inline PoolingCutoffs SolvePoolingCutoffs(const ValueDistribution& d,
                                          double r1, int n) {
  detail::CheckBenchmarkN(n);
  const double lo = d.lower();
  const double hi = d.upper();
  const double top_mean = ExpectedOrderStat(d, n - 1, 1);
  if (!(r1 > 0.0 && r1 < top_mean)) {
    throw std::invalid_argument("benchmark reserve must lie in (0, E[Y1])");
  }
  auto eqs = [&](const std::array<double, 2>& v) {
    return detail::PoolingEquations(d, r1, v[0], v[1]);
  };
  auto feasible = [&](const std::array<double, 2>& v) {
    return v[0] > lo && v[0] < v[1] && v[1] <= hi;
  };
  std::array<double, 2> start{std::min(1.5 * r1, lo + 0.75 * (hi - lo)),
                              std::min(2.0 * r1, hi)};
  if (!(start[0] < start[1])) start[0] = 0.5 * (lo + start[1]);
  try {
    const auto res = SolveNewton2(eqs, start, feasible, 1e-10, 200);
    if (res.x[1] < hi) return {res.x[0], res.x[1], res.residual, false};
  } catch (const ConvergenceError&) {
  }
  // Corner: every type above x_hat pools at r1.
  auto e2 = [&](double xh) { return eqs({xh, hi})[1]; };
  const double elo = e2(lo + 1e-12 * (hi - lo));
  const double ehi = e2(hi - 1e-12 * (hi - lo));
  if (elo * ehi > 0.0) {
    throw ConvergenceError("pooling cutoffs: no root for this reserve");
  }
  const bool rising = ehi > elo;
  const double xh = BisectPredicate(
      [&](double x) { return rising ? e2(x) >= 0.0 : e2(x) <= 0.0; }, lo, hi);
  const double resid = std::abs(e2(xh));
  if (resid > 1e-8) {
    throw ConvergenceError("pooling cutoffs: corner solve failed");
  }
  return {xh, hi, resid, true};
}

struct PoolingEquilibrium {
  ValueDistribution dist = ValueDistribution::Uniform();
  int n = 3;
  double r1 = 0.0;
  double x_hat = 0.0;
  double x_hathat = 0.0;
  bool corner = false;

  // Bid of type x; nullopt means the bidder abstains.
  std::optional<double> Bid(double x) const {
    if (x < x_hat) return std::nullopt;
    if (x <= x_hathat) return r1;
    return ExpectedSecondRivalGivenFirst(dist, n, x);
  }
};

inline PoolingEquilibrium MakePoolingEquilibrium(const ValueDistribution& d,
                                                 double r1, int n) {
  const auto c = SolvePoolingCutoffs(d, r1, n);
  return {d, n, r1, c.x_hat, c.x_hathat, c.corner};
}

namespace detail {

inline double RevenueR1Numeric(const PoolingEquilibrium& eq) {
  const ValueDistribution& d = eq.dist;
  const int n = eq.n;
  const double xh = eq.x_hat;
  const double xhh = eq.x_hathat;
  const double r = eq.r1;
  const OrderStatLaw top{d, n, 1};
  const double pool = (OrderCdfPdf(top, xhh).cdf - OrderCdfPdf(top, xh).cdf) * r;
  auto outer = [&](double x1) {
    const double fx1 = d.Cdf(x1);
    const double below = IPow(d.Cdf(xhh) / fx1, n - 1) * r;
    const double above = Integrate(
        [&](double x2) {
          const double dens =
              (n - 1) * IPow(d.Cdf(x2), n - 2) * d.Pdf(x2) / IPow(fx1, n - 1);
          return ExpectedSecondRivalGivenFirst(d, n, x2) * dens;
        },
        xhh, x1, TightQuadrature());
    return (below + above) * OrderCdfPdf(top, x1).pdf;
  };
  return pool + Integrate(outer, xhh, d.upper(), {1e-10, 40});
}

inline double RevenueR2Numeric(const PoolingEquilibrium& eq) {
  const ValueDistribution& d = eq.dist;
  const double xh = eq.x_hat;
  const double xhh = eq.x_hathat;
  const OrderStatLaw top{d, 3, 1};
  const QuadratureOptions opts{1e-10, 40};
  // Nobody bids: the second sale clears at the second-highest value.
  const double quiet = Integrate(
      [&](double x1) {
        return TruncatedMaxMean(d, 2, x1) * OrderCdfPdf(top, x1).pdf;
      },
      d.lower(), xh, opts);
  // Top value wins the first sale: price is the lowest of the three.
  const double sold = Integrate(
      [&](double x1) {
        const double lowest =
            2.0 * TruncatedMaxMean(d, 1, x1) - TruncatedMaxMean(d, 2, x1);
        return lowest * OrderCdfPdf(top, x1).pdf;
      },
      xh, d.upper(), opts);
  // All three pool: with probability 1/3 the lowest wins the tie and the
  // second sale clears at x2 instead of x3.
  const double mass = d.Cdf(xhh) - d.Cdf(xh);
  if (!(mass > 0.0)) return quiet + sold;
  auto spacing = [&](double s) {
    const double g = (d.Cdf(s) - d.Cdf(xh)) / mass;
    const double dens = d.Pdf(s) / mass;
    return s * (OrderWeight(3, 2, g) - OrderWeight(3, 3, g)) * dens;
  };
  const double gap = Integrate(spacing, xh, xhh, TightQuadrature());
  return quiet + sold + IPow(mass, 3) * gap / 3.0;
}

}  // namespace detail

// Expected first-seller revenue in the pooling equilibrium.
inline double RevenueR1(const PoolingEquilibrium& eq) {
  if (detail::IsUnitUniform(eq.dist) && eq.n == 3 && !eq.corner) {
    const double a = eq.x_hat;
    const double b = eq.x_hathat;
    return 0.25 - b * b * b + 0.75 * b * b * b * b +
           eq.r1 * (3 * b * b - 2 * b * b * b - a * a * a);
  }
  return detail::RevenueR1Numeric(eq);
}

// Expected second-seller revenue in the pooling equilibrium.
inline double RevenueR2(const PoolingEquilibrium& eq) {
  if (detail::IsUnitUniform(eq.dist) && eq.n == 3) {
    const double a = eq.x_hat;
    const double l = eq.x_hathat - eq.x_hat;
    return 0.25 + a * a * a * a / 4.0 + l * l * l * l / 12.0;
  }
  return detail::RevenueR2Numeric(eq);
}

inline double RevenueR1(const ValueDistribution& d, double r1, int n = 3) {
  return RevenueR1(MakePoolingEquilibrium(d, r1, n));
}

// Revenue-maximizing benchmark reserve by golden-section search on
// (lower, E[Y1]).
inline PoolingEquilibrium OptimizeR1(const ValueDistribution& d, int n = 3) {
  detail::CheckBenchmarkN(n);
  const double lo = std::max(d.lower(), 0.0);
  const double hi = ExpectedOrderStat(d, n - 1, 1);
  const double pad = 1e-6 * (hi - lo);
  const double r = GoldenSectionMaximize(
      [&](double r1) { return RevenueR1(d, r1, n); }, lo + pad, hi - pad,
      1e-9 * (hi - lo));
  return MakePoolingEquilibrium(d, r, n);
}

// Plays the benchmark auction in equilibrium. Ties among pooled bids are
// broken by a seeded hash; the second sale is a reserve-free second-price
// auction on true values.
inline AuctionOutcome RunBenchmarkSpa(const PoolingEquilibrium& eq,
                                      std::span<const double> types,
                                      std::uint64_t tie_seed = 0) {
  if (static_cast<int>(types.size()) != eq.n) {
    throw std::invalid_argument("benchmark: profile size differs from N");
  }
  AuctionOutcome out;
  out.transfers.assign(types.size(), 0.0);
  int best = -1;
  double best_bid = 0.0;
  double second_bid = -kInf;
  std::uint64_t best_key = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto b = eq.Bid(types[i]);
    if (!b) continue;
    const std::uint64_t key = HashCombine(tie_seed, i);
    if (best < 0 || *b > best_bid || (*b == best_bid && key < best_key)) {
      if (best >= 0) second_bid = std::max(second_bid, best_bid);
      best = static_cast<int>(i);
      best_bid = *b;
      best_key = key;
    } else {
      second_bid = std::max(second_bid, *b);
    }
  }
  if (best >= 0) {
    out.allocated_rank = 1;
    out.allocated_bidder = best;
    out.transfers[best] = std::max(eq.r1, second_bid);
    out.seller1_revenue = out.transfers[best];
  }
  std::vector<int> rest;
  std::vector<double> rest_values;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (static_cast<int>(i) == best) continue;
    rest.push_back(static_cast<int>(i));
    rest_values.push_back(types[i]);
  }
  auto stage = RunSecondStage(rest_values, 0.0);
  for (int& w : stage.winners) w = rest[w];
  out.seller2_revenue = stage.revenue();
  out.second_stage = std::move(stage);
  return out;
}

}  // namespace seqauction

#endif  // SEQAUCTION_BENCHMARK_HPP_
