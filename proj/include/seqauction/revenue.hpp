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

#ifndef SEQAUCTION_REVENUE_HPP_
#define SEQAUCTION_REVENUE_HPP_

#include <array>
#include <vector>

#include "seqauction/mechanism.hpp"
#include "seqauction/numerics.hpp"
#include "seqauction/order_stats.hpp"

namespace seqauction {

struct RevenueSummary {
  double seller1 = 0.0;
  double seller2 = 0.0;
  double alloc_prob = 0.0;
};

namespace detail {

// Expected revenues when the rule only depends on the adjacent pair
// (u, z) = (x_(M+1), x_(M+2)): the object goes to rank M+1 iff
// psi(u) + M (u - z) >= 0, the first seller earns that margin in expectation
// and the second seller sells M units at z (allocated) or u (withheld).
inline RevenueSummary PairRevenue(const ValueDistribution& d, int n, int m) {
  const int k = m + 1;
  const double c = n * Binomial(n - 1, k - 1) * (n - k);
  const double lo = d.lower();
  const double hi = d.upper();
  const QuadratureOptions inner_opts{1e-12, 40};
  const QuadratureOptions outer_opts{1e-10, 40};
  const double a_lo = AllocThreshold(d, lo, m);
  const double psi0 = PsiInverseZero(d);
  // Weight of z given u: c F(z)^(n-k-1) f(z); weight of u: f(u) (1-F(u))^(k-1).
  auto wz = [&](double z) { return c * IPow(d.Cdf(z), n - k - 1) * d.Pdf(z); };
  auto cut = [&](double u) {
    const double psi = VirtualValue(d, u);
    if (psi == -kInf) return lo;
    return std::clamp(u + psi / m, lo, u);
  };
  std::array<double, 3> acc{};
  for (int part = 0; part < 3; ++part) {
    auto outer = [&](double u) {
      const double tail = IPow(1.0 - d.Cdf(u), k - 1);
      const double fu = d.Pdf(u);
      if (tail == 0.0 || fu == 0.0) return 0.0;
      const double zc = cut(u);
      if (part == 0) {
        if (zc <= lo) return 0.0;
        const double vd = VirtualDensity(d, u);
        return tail * Integrate(
                          [&](double z) {
                            return (vd + m * (u - z) * fu) * wz(z);
                          },
                          lo, zc, inner_opts);
      }
      if (part == 1) {
        return tail * fu * Integrate(wz, lo, zc, inner_opts);
      }
      const double sold = Integrate([&](double z) { return m * z * wz(z); },
                                    lo, zc, inner_opts);
      const double kept = Integrate(wz, zc, u, inner_opts) * m * u;
      return tail * fu * (sold + kept);
    };
    acc[part] = IntegratePiecewise(outer, lo, hi, {a_lo, psi0}, outer_opts);
  }
  return {acc[0], acc[2], acc[1]};
}

// Expected revenues from the top three values, integrating the first-stage
// rule against their joint density N!/(N-3)! f f f F(x3)^(N-3).
inline RevenueSummary Top3Revenue(const MechanismConfig& cfg) {
  const ValueDistribution& d = cfg.dist;
  const int n = cfg.n_bidders;
  const double c = n * (n - 1.0) * (n - 2.0);
  const double lo = d.lower();
  const double hi = d.upper();
  const double r = cfg.r;
  const auto& k = cfg.constants;
  std::vector<double> brk{k.lower_alloc_bound, k.psi_inv_zero};
  if (r > lo && r < hi) {
    brk.push_back(r);
    if (!std::isnan(k.a_of_r)) brk.push_back(k.a_of_r);
  }
  const QuadratureOptions o1{1e-9, 40};
  const QuadratureOptions o2{1e-10, 40};
  const QuadratureOptions o3{1e-11, 40};
  std::array<double, 3> acc{};
  for (int part = 0; part < 3; ++part) {
    auto value = [&](double x1, double x2, double x3) {
      const std::array<double, 3> x{x1, x2, x3};
      const auto dec = DecideFirstStage(cfg, x);
      if (part == 0) return dec.seller_revenue();
      if (part == 1) return dec.recipient != 0 ? 1.0 : 0.0;
      double rest[2];
      int m = 0;
      for (int i = 0; i < 3 && m < 2; ++i) {
        if (i + 1 != dec.recipient) rest[m++] = x[i];
      }
      if (rest[0] < r) return 0.0;
      return std::max(r, rest[1]);
    };
    auto mid = [&](double x2) {
      const double f2 = d.Pdf(x2);
      if (f2 == 0.0) return 0.0;
      std::vector<double> b3{r, k.psi_inv_zero};
      const double psi2 = VirtualValue(d, x2);
      if (std::isfinite(psi2)) b3.push_back(x2 + psi2);
      auto in3 = [&](double x3) {
        const double w3 = d.Pdf(x3) * IPow(d.Cdf(x3), n - 3);
        if (w3 == 0.0) return 0.0;
        auto in1 = [&](double x1) { return value(x1, x2, x3) * d.Pdf(x1); };
        return w3 * IntegratePiecewise(in1, x2, hi, {r, k.psi_inv_zero}, o3);
      };
      return f2 * IntegratePiecewise(in3, lo, x2, b3, o2);
    };
    acc[part] = c * IntegratePiecewise(mid, lo, hi, brk, o1);
  }
  return {acc[0], acc[2], acc[1]};
}

}  // namespace detail

// Expected seller revenues and allocation probability by quadrature.
inline RevenueSummary ExpectedRevenueAnalytic(const MechanismConfig& cfg) {
  const ValueDistribution& d = cfg.dist;
  const int n = cfg.n_bidders;
  switch (cfg.regime) {
    case Regime::kNoReserve:
      if (!cfg.misallocate_to_top) {
        return detail::PairRevenue(d, n, 1);
      }
      return detail::Top3Revenue(cfg);
    case Regime::kMultiUnit:
      return detail::PairRevenue(d, n, cfg.units);
    case Regime::kMustSell: {
      const double e3 = ExpectedOrderStat(d, n, 3);
      return {e3, e3, 1.0};
    }
    default:
      return detail::Top3Revenue(cfg);
  }
}

// E[psi(X_(2))] - (2 E[X_(3)] - E[X_(2)]). Zero up to quadrature error.
inline double VirtualIdentityGap(const ValueDistribution& d, int n) {
  const double e_psi = Integrate(
      [&](double x) {
        return VirtualDensity(d, x) * OrderWeight(n, 2, d.Cdf(x));
      },
      d.lower(), d.upper(), {1e-12, 40});
  return e_psi - (2.0 * ExpectedOrderStat(d, n, 3) - ExpectedOrderStat(d, n, 2));
}

}  // namespace seqauction

#endif  // SEQAUCTION_REVENUE_HPP_
