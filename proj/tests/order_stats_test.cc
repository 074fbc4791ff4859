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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "seqauction/numerics.hpp"
#include "seqauction/order_stats.hpp"
#include "seqauction/revenue.hpp"
#include "seqauction/rng.hpp"

namespace seqauction {
namespace {

constexpr int kDraws = 1000000;

// Sorted k-th highest of n draws, kDraws times.
std::vector<double> EmpiricalOrderStat(const ValueDistribution& d, int n, int k,
                                       std::uint64_t seed) {
  std::vector<double> out(kDraws);
  std::vector<double> v(n);
  for (int i = 0; i < kDraws; ++i) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(i));
    for (int j = 0; j < n; ++j) v[j] = d.Quantile(rng.Uniform(j));
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end(), std::greater<>());
    out[i] = v[k - 1];
  }
  std::sort(out.begin(), out.end());
  return out;
}

double KolmogorovSmirnov(const std::vector<double>& sorted,
                         const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    ks = std::max({ks, std::abs((i + 1) / n - f), std::abs(f - i / n)});
  }
  return ks;
}

TEST(OrderStats, UniformThreeClosedForms) {
  const auto u = ValueDistribution::Uniform();
  const OrderStatLaw second{u, 3, 2};
  EXPECT_NEAR(OrderCdfPdf(second, 0.5).pdf, 1.5, 1e-14);
  for (int i = 0; i <= 20; ++i) {
    const double x = i / 20.0;
    const auto cp = OrderCdfPdf(second, x);
    EXPECT_NEAR(cp.cdf, 3 * x * x - 2 * x * x * x, 1e-14);
    EXPECT_NEAR(cp.pdf, 6 * x * (1 - x), 1e-14);
  }
  EXPECT_NEAR(OrderCdfPdf({u, 3, 3}, 0.5).cdf, 0.875, 1e-14);
  EXPECT_DOUBLE_EQ(OrderCdfPdf({u, 3, 1}, 1.0).cdf, 1.0);
  EXPECT_DOUBLE_EQ(OrderCdfPdf({u, 3, 3}, 1.0).cdf, 1.0);
  EXPECT_THROW(OrderCdfPdf(second, 1.5), DomainError);
  EXPECT_THROW(OrderCdfPdf({u, 3, 4}, 0.5), std::invalid_argument);
}

TEST(OrderStats, RivalLaw) {
  const auto u = ValueDistribution::Uniform();
  EXPECT_NEAR(RivalCdfPdf(u, 3, 1, 0.5).cdf, 0.25, 1e-14);
  EXPECT_NEAR(RivalCdfPdf(u, 3, 2, 0.5).cdf, 0.75, 1e-14);
  EXPECT_DOUBLE_EQ(RivalCdfPdf(u, 3, 1, 1.0).cdf, 1.0);
}

TEST(OrderStats, DensitiesSumToNf) {
  for (const auto& d : {ValueDistribution::Uniform(), ValueDistribution::Power(2.0),
                        ValueDistribution::Uniform(1.0, 2.0)}) {
    for (int n : {3, 5}) {
      for (int i = 0; i <= 50; ++i) {
        const double x = d.lower() + (d.upper() - d.lower()) * i / 50.0;
        double s = 0.0;
        for (int k = 1; k <= n; ++k) s += OrderCdfPdf({d, n, k}, x).pdf;
        EXPECT_NEAR(s, n * d.Pdf(x), 1e-6);
      }
    }
  }
}

TEST(OrderStats, DensityIntegratesToOne) {
  const auto d = ValueDistribution::Power(2.0);
  for (int k = 1; k <= 4; ++k) {
    const OrderStatLaw law{d, 4, k};
    EXPECT_NEAR(Integrate([&](double x) { return OrderCdfPdf(law, x).pdf; }, 0.0,
                          1.0, {1e-10, 40}),
                1.0, 1e-6);
  }
}

TEST(OrderStats, KolmogorovSmirnovAgainstDraws) {
  struct Case {
    ValueDistribution d;
    int n;
    int k;
  };
  const std::vector<Case> cases = {{ValueDistribution::Uniform(), 3, 1},
                                   {ValueDistribution::Uniform(), 3, 2},
                                   {ValueDistribution::Uniform(), 3, 3},
                                   {ValueDistribution::Power(2.0), 3, 2},
                                   {ValueDistribution::Uniform(), 5, 3}};
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const auto draws = EmpiricalOrderStat(c.d, c.n, c.k, seed++);
    const OrderStatLaw law{c.d, c.n, c.k};
    const double ks =
        KolmogorovSmirnov(draws, [&](double x) { return OrderCdfPdf(law, x).cdf; });
    EXPECT_LT(ks, 0.002) << "n=" << c.n << " k=" << c.k;
  }
}

TEST(ConditionalLaw, UniformThirdGivenSecond) {
  const auto u = ValueDistribution::Uniform();
  const ConditionalOrderLaw law{u, 3, 3, 2};
  EXPECT_NEAR(CondDensity(law, 0.5, 0.2), 2.0, 1e-14);
  EXPECT_NEAR(CondDensity(law, 0.8, 0.4), 1.25, 1e-14);
  EXPECT_NEAR(CondCdf(law, 0.5, 0.5), 1.0, 1e-14);
  EXPECT_TRUE(std::isfinite(CondDensity(law, 0.5, 0.5)));
  EXPECT_THROW(CondDensity(law, 0.5, 0.6), DomainError);
}

TEST(ConditionalLaw, RejectionSamplingOracle) {
  // Keep draws whose second-highest value lies within 0.01 of 0.8 and check
  // the density of the third-highest on [0.2, 0.6].
  const auto u = ValueDistribution::Uniform();
  int kept = 0;
  int inside = 0;
  for (int i = 0; i < 4000000; ++i) {
    const CounterRng rng(77, static_cast<std::uint64_t>(i));
    double v[3] = {rng.Uniform(0), rng.Uniform(1), rng.Uniform(2)};
    std::sort(v, v + 3, std::greater<>());
    if (std::abs(v[1] - 0.8) > 0.01) continue;
    ++kept;
    if (v[2] >= 0.2 && v[2] <= 0.6) ++inside;
  }
  const double density = static_cast<double>(inside) / kept / 0.4;
  const double se = std::sqrt(0.5 * 0.5 / kept) / 0.4;
  EXPECT_NEAR(density, CondDensity({u, 3, 3, 2}, 0.8, 0.4), 4 * se);
}

TEST(ConditionalLaw, UpperConditionalIntegratesToOne) {
  const auto d = ValueDistribution::Power(2.0);
  const ConditionalOrderLaw law{d, 4, 1, 3};
  const double mass = Integrate([&](double x) { return CondDensity(law, 0.4, x); },
                                0.4, 1.0, {1e-10, 40});
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Expectations, UniformExamples) {
  const auto u = ValueDistribution::Uniform();
  EXPECT_NEAR(ExpectedSecondRivalGivenFirst(u, 3, 0.8), 0.4, 1e-14);
  EXPECT_NEAR(ExpectedOrderStat(u, 3, 3), 0.25, 1e-14);
  EXPECT_NEAR(ExpectedFirstRivalBelow(u, 3, 0.5), 1.0 / 3.0, 1e-14);
}

TEST(Expectations, NumericRoutesMatchClosedForms) {
  const auto u = ValueDistribution::Uniform();
  for (double x : {0.1, 0.5, 0.8, 1.0}) {
    EXPECT_NEAR(detail::ExpectedSecondRivalGivenFirstNumeric(u, 3, x), x / 2, 1e-9);
    EXPECT_NEAR(detail::ExpectedFirstRivalBelowNumeric(u, 3, x), 2 * x / 3, 1e-9);
    EXPECT_NEAR(detail::ExpectedSecondRivalGivenFirstNumeric(u, 5, x), 0.75 * x, 1e-9);
  }
  // Power family, direct quadrature of the order-statistic density.
  const auto d = ValueDistribution::Power(2.0);
  for (int k = 1; k <= 3; ++k) {
    const OrderStatLaw law{d, 3, k};
    const double direct = Integrate(
        [&](double x) { return x * OrderCdfPdf(law, x).pdf; }, 0.0, 1.0, {1e-12, 40});
    EXPECT_NEAR(ExpectedOrderStat(d, 3, k), direct, 1e-9);
  }
}

TEST(Expectations, MonteCarloOracle) {
  const auto u = ValueDistribution::Uniform();
  double sum = 0.0;
  double sum2 = 0.0;
  int count = 0;
  for (int i = 0; i < 1000000; ++i) {
    const CounterRng rng(5, static_cast<std::uint64_t>(i));
    const double y = std::max(rng.Uniform(0), rng.Uniform(1));
    if (y > 0.5) continue;
    sum += y;
    sum2 += y * y;
    ++count;
  }
  const double mean = sum / count;
  const double se = std::sqrt((sum2 / count - mean * mean) / count);
  EXPECT_NEAR(mean, ExpectedFirstRivalBelow(u, 3, 0.5), 4 * se);
}

TEST(VirtualIdentity, GapVanishes) {
  EXPECT_NEAR(VirtualIdentityGap(ValueDistribution::Uniform(), 3), 0.0, 1e-8);
  EXPECT_NEAR(VirtualIdentityGap(ValueDistribution::Uniform(), 5), 0.0, 1e-6);
  EXPECT_NEAR(VirtualIdentityGap(ValueDistribution::Power(2.0), 3), 0.0, 1e-6);
  EXPECT_NEAR(VirtualIdentityGap(ValueDistribution::Uniform(2.0, 3.0), 4), 0.0, 1e-6);
}

}  // namespace
}  // namespace seqauction
