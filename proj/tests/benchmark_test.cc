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
#include <optional>
#include <vector>

#include "seqauction/benchmark.hpp"
#include "seqauction/simulation.hpp"

namespace seqauction {
namespace {

const ValueDistribution kUniform = ValueDistribution::Uniform();

TEST(Benchmark, SeparatingGap) {
  EXPECT_NEAR(SeparatingGap(kUniform, 3, 0.5), 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(SeparatingGap(kUniform, 3, 0.9), 0.15, 1e-12);
  EXPECT_NEAR(SeparatingGap(kUniform, 3, 0.0), 0.0, 1e-12);
}

TEST(Benchmark, UniformCutoffsMatchClosedForm) {
  for (double r1 : {0.1, 0.3, 0.379}) {
    const auto c = SolvePoolingCutoffs(kUniform, r1, 3);
    EXPECT_NEAR(c.x_hat, (1 + 1 / std::sqrt(3.0)) * r1, 1e-8) << r1;
    EXPECT_NEAR(c.x_hathat, (1 + 2 / std::sqrt(3.0)) * r1, 1e-8) << r1;
    EXPECT_LE(c.residual, 1e-10);
    EXPECT_FALSE(c.corner);
    EXPECT_GT(c.x_hat, r1);
  }
  const auto tiny = SolvePoolingCutoffs(kUniform, 1e-6, 3);
  EXPECT_LT(tiny.x_hathat, 1e-5);
}

TEST(Benchmark, CornerWhenPoolingReachesTop) {
  const auto c = SolvePoolingCutoffs(kUniform, 0.5, 3);
  EXPECT_TRUE(c.corner);
  EXPECT_EQ(c.x_hathat, 1.0);
  EXPECT_LE(c.residual, 1e-10);
  EXPECT_GT(c.x_hat, 0.5);
  EXPECT_LT(c.x_hat, 1.0);
}

TEST(Benchmark, OptimalReserve) {
  const auto eq = OptimizeR1(kUniform, 3);
  const double s3 = std::sqrt(3.0);
  EXPECT_NEAR(eq.r1, 3 * (6 * s3 + 10) / (47 * s3 + 80), 1e-6);
  EXPECT_NEAR(RevenueR1(eq), 0.303, 5e-3);
  EXPECT_NEAR(RevenueR2(eq), 0.282, 5e-3);
  // Golden section lands on a maximum.
  for (double dr : {-0.01, 0.01}) {
    EXPECT_LT(RevenueR1(kUniform, eq.r1 + dr, 3), RevenueR1(eq));
  }
}

TEST(Benchmark, RevenueClosedFormsMatchQuadrature) {
  // Vanishing reserve: everyone separates and pays half the second value.
  EXPECT_NEAR(RevenueR1(kUniform, 1e-9, 3), 0.25, 1e-8);
  EXPECT_THROW(RevenueR1(kUniform, 0.0, 3), std::invalid_argument);
  for (double r1 : {0.1, 0.25, 0.379, 0.45}) {
    const auto eq = MakePoolingEquilibrium(kUniform, r1, 3);
    EXPECT_NEAR(RevenueR1(eq), detail::RevenueR1Numeric(eq), 1e-9) << r1;
    EXPECT_NEAR(RevenueR2(eq), detail::RevenueR2Numeric(eq), 1e-9) << r1;
  }
}

TEST(Benchmark, PlayExample) {
  const auto eq = MakePoolingEquilibrium(kUniform, 0.379, 3);
  const std::vector<double> t = {0.9, 0.85, 0.1};
  const auto out = RunBenchmarkSpa(eq, t);
  EXPECT_EQ(out.allocated_bidder, 0);
  EXPECT_NEAR(out.transfers[0], 0.425, 1e-12);
  EXPECT_EQ(out.second_stage.winner(), 1);
  EXPECT_DOUBLE_EQ(out.second_stage.price, 0.1);
  EXPECT_EQ(out.transfers[1], 0.0);

  const std::vector<double> low = {0.55, 0.3, 0.2};
  const auto none = RunBenchmarkSpa(eq, low);
  EXPECT_FALSE(none.allocated_bidder.has_value());
  EXPECT_EQ(none.seller1_revenue, 0.0);
  EXPECT_EQ(none.second_stage.winner(), 0);
  EXPECT_DOUBLE_EQ(none.second_stage.price, 0.3);

  // Two pooled types pay the reserve.
  const std::vector<double> pooled = {0.7, 0.65, 0.2};
  const auto p = RunBenchmarkSpa(eq, pooled, 3);
  ASSERT_TRUE(p.allocated_bidder.has_value());
  EXPECT_DOUBLE_EQ(p.seller1_revenue, 0.379);
  EXPECT_THROW(RunBenchmarkSpa(eq, std::vector<double>{0.5, 0.2}),
               std::invalid_argument);
}

TEST(Benchmark, ParticipationAndRevenueMonteCarlo) {
  const auto eq = OptimizeR1(kUniform, 3);
  RunningStat bids, sold, r1, r2;
  std::vector<double> t(3);
  for (int j = 0; j < 1000000; ++j) {
    const CounterRng rng(77, j);
    for (int i = 0; i < 3; ++i) t[i] = rng.Uniform(i);
    bids.Add(eq.Bid(t[0]).has_value() ? 1.0 : 0.0);
    const auto out = RunBenchmarkSpa(eq, t, j);
    sold.Add(out.allocated_bidder ? 1.0 : 0.0);
    r1.Add(out.seller1_revenue);
    r2.Add(out.seller2_revenue);
  }
  const auto check = [](const RunningStat& s, double want) {
    const auto sum = s.Summary();
    EXPECT_LE(std::abs(sum.mean - want), 3 * sum.std_error)
        << sum.mean << " vs " << want;
  };
  check(bids, 1 - eq.x_hat);
  check(sold, 1 - std::pow(eq.x_hat, 3));
  check(r1, RevenueR1(eq));
  check(r2, RevenueR2(eq));
}

// Payoff of bidder 0 with value x bidding `bid` (nullopt abstains) against
// two equilibrium rivals; written independently of RunBenchmarkSpa.
double DeviationPayoff(const PoolingEquilibrium& eq, double x,
                       std::optional<double> bid, double y, double z,
                       double tie_u) {
  const auto by = eq.Bid(y);
  const auto bz = eq.Bid(z);
  double top_rival = -1.0;
  int top_idx = -1;
  if (by && *by > top_rival) { top_rival = *by; top_idx = 1; }
  if (bz && *bz > top_rival) { top_rival = *bz; top_idx = 2; }
  // A tie among k + 1 equal bids is won with probability 1 / (k + 1).
  const int tied = (by && bid && *by == *bid) + (bz && bid && *bz == *bid);
  const bool wins =
      bid && (*bid > top_rival || (*bid == top_rival && tie_u * (tied + 1) < 1.0));
  if (wins) return x - std::max(eq.r1, top_rival < 0 ? eq.r1 : top_rival);
  // Someone else (or nobody) takes the first object; second sale on values.
  double other = 0.0;
  if (top_idx < 0) {
    other = std::max(y, z);
  } else {
    other = top_idx == 1 ? z : y;
  }
  return x > other ? x - other : 0.0;
}

TEST(Benchmark, CutoffTypesAreIndifferent) {
  const auto eq = MakePoolingEquilibrium(kUniform, 0.379, 3);
  RunningStat low, high;
  for (int j = 0; j < 400000; ++j) {
    const CounterRng rng(5, j);
    const double y = rng.Uniform(0);
    const double z = rng.Uniform(1);
    const double u = rng.Uniform(2);
    low.Add(DeviationPayoff(eq, eq.x_hat, eq.r1, y, z, u) -
            DeviationPayoff(eq, eq.x_hat, std::nullopt, y, z, u));
    high.Add(DeviationPayoff(eq, eq.x_hathat, eq.r1, y, z, u) -
             DeviationPayoff(eq, eq.x_hathat,
                             ExpectedSecondRivalGivenFirst(kUniform, 3, eq.x_hathat),
                             y, z, u));
  }
  for (const auto* s : {&low, &high}) {
    const auto sum = s->Summary();
    EXPECT_LE(std::abs(sum.mean), 3 * sum.std_error + 1e-4) << sum.mean;
  }
}

TEST(Benchmark, NonUniformAndUnsupported) {
  const auto d = ValueDistribution::Power(2.0);
  const auto eq = OptimizeR1(d, 3);
  const auto c = SolvePoolingCutoffs(d, eq.r1, 3);
  EXPECT_LE(c.residual, 1e-10);
  EXPECT_GT(c.x_hat, eq.r1);
  EXPECT_GT(c.x_hathat, c.x_hat);
  EXPECT_GT(RevenueR1(eq), 0.0);
  EXPECT_THROW(SolvePoolingCutoffs(kUniform, 0.3, 4), UnsupportedError);
  EXPECT_THROW(OptimizeR1(kUniform, 2), UnsupportedError);
}

}  // namespace
}  // namespace seqauction
