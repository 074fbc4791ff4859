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
#include <numeric>
#include <vector>

#include "seqauction/distribution.hpp"
#include "seqauction/numerics.hpp"

namespace seqauction {
namespace {

ValueDistribution Square() { return ValueDistribution::Power(2.0); }

// Density spikes on [0.4, 0.5] and drops right after, so psi falls there.
ValueDistribution SpikeTable() {
  return ValueDistribution::Tabulated({0.0, 0.4, 0.5, 0.6, 1.0},
                                      {0.0, 0.2, 0.7, 0.75, 1.0});
}

TEST(VirtualValue, UniformAndPowerExamples) {
  const auto u = ValueDistribution::Uniform();
  EXPECT_NEAR(VirtualValue(u, 0.75), 0.5, 1e-15);
  EXPECT_NEAR(VirtualValue(u, 0.5), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(VirtualValue(Square(), 1.0), 1.0);
  // F = x^2: psi = (3x^2 - 1) / (2x).
  for (double x : {0.1, 0.4, 0.7, 0.95}) {
    EXPECT_NEAR(VirtualValue(Square(), x), (3 * x * x - 1) / (2 * x), 1e-12);
  }
}

TEST(VirtualValue, OutOfSupportThrows) {
  const auto u = ValueDistribution::Uniform();
  EXPECT_THROW(VirtualValue(u, -0.1), DomainError);
  EXPECT_THROW(VirtualValue(u, 1.1), DomainError);
}

TEST(InverseVirtual, Examples) {
  const auto u = ValueDistribution::Uniform();
  EXPECT_NEAR(InverseVirtual(u, 0.0), 0.5, 1e-12);
  EXPECT_NEAR(InverseVirtual(u, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(InverseVirtual(u, -1.0), 0.0, 1e-12);
  EXPECT_THROW(InverseVirtual(u, -1.5), DomainError);
  EXPECT_THROW(InverseVirtual(u, 1.5), DomainError);
}

TEST(InverseVirtual, ComposesToIdentity) {
  for (const auto& d : {ValueDistribution::Uniform(), Square(),
                        ValueDistribution::Uniform(1.0, 3.0)}) {
    const double lo = VirtualValue(d, d.lower() + 1e-3);
    for (int i = 0; i <= 50; ++i) {
      const double v = std::min(d.upper(), lo + (d.upper() - lo) * i / 50.0);
      EXPECT_NEAR(VirtualValue(d, InverseVirtual(d, v)), v, 1e-9) << v;
    }
  }
}

TEST(AllocThreshold, UniformExamples) {
  const auto u = ValueDistribution::Uniform();
  EXPECT_NEAR(AllocThreshold(u, 0.0), 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(AllocThreshold(u, 0.6), 0.6);
  EXPECT_NEAR(AllocThreshold(u, 0.2), 0.4, 1e-12);
}

TEST(AllocThreshold, RootPropertyOnGrid) {
  for (const auto& d : {ValueDistribution::Uniform(), Square()}) {
    for (int i = 0; i <= 100; ++i) {
      const double x = d.lower() + (d.upper() - d.lower()) * i / 100.0;
      const double a = AllocThreshold(d, x);
      EXPECT_GE(a, x);
      EXPECT_GE(a + VirtualValue(d, a), x - 1e-12);
      if (VirtualValue(d, x) < 0.0) {
        EXPECT_NEAR(a + VirtualValue(d, a), x, 1e-9) << x;
      } else {
        EXPECT_EQ(a, x);
      }
    }
  }
}

TEST(AllocThreshold, MatchesClosedFormForUniform) {
  const auto u = ValueDistribution::Uniform();
  for (int i = 0; i < 50; ++i) {
    const double x = i / 100.0;
    EXPECT_NEAR(AllocThreshold(u, x), (1.0 + x) / 3.0, 1e-12);
  }
}

TEST(Distribution, CdfEndpointsAndDensityMass) {
  for (const auto& d : {ValueDistribution::Uniform(), Square(),
                        ValueDistribution::Uniform(2.0, 5.0), SpikeTable(),
                        ValueDistribution::Power(0.5, 1.0, 2.0)}) {
    EXPECT_NEAR(d.Cdf(d.lower()), 0.0, 1e-15);
    EXPECT_NEAR(d.Cdf(d.upper()), 1.0, 1e-15);
    const double mass = Integrate([&](double x) { return d.Pdf(x); }, d.lower(),
                                  d.upper(), {1e-10, 40});
    EXPECT_NEAR(mass, 1.0, 1e-6);
  }
}

TEST(Distribution, QuantileRoundTrip) {
  for (const auto& d : {ValueDistribution::Uniform(), Square(),
                        ValueDistribution::Uniform(2.0, 5.0),
                        ValueDistribution::Power(3.0, 0.5, 1.5)}) {
    for (int i = 0; i <= 200; ++i) {
      const double x = d.lower() + (d.upper() - d.lower()) * i / 200.0;
      EXPECT_NEAR(d.Quantile(d.Cdf(x)), x, 1e-8);
    }
  }
}

TEST(Distribution, TabulatedUniformTableReproducesUniform) {
  std::vector<double> grid, cdf;
  for (int i = 0; i <= 10; ++i) {
    grid.push_back(i / 10.0);
    cdf.push_back(i / 10.0);
  }
  const auto t = ValueDistribution::Tabulated(grid, cdf);
  for (int i = 0; i <= 40; ++i) {
    const double x = i / 40.0;
    EXPECT_NEAR(t.Cdf(x), x, 1e-12);
    EXPECT_NEAR(t.Pdf(x), 1.0, 1e-12);
    EXPECT_NEAR(t.Quantile(x), x, 1e-9);
  }
  EXPECT_NEAR(AllocThreshold(t, 0.0), 1.0 / 3.0, 1e-9);
}

TEST(Distribution, TabulatedInterpolantIsMonotone) {
  const auto t = SpikeTable();
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double f = t.Cdf(i / 1000.0);
    EXPECT_GE(f, prev);
    prev = f;
    EXPECT_GE(t.Pdf(i / 1000.0), 0.0);
  }
}

TEST(Distribution, RejectsBadTables) {
  EXPECT_THROW(ValueDistribution::Tabulated({0.0, 1.0}, {0.0, 0.9}),
               std::invalid_argument);
  EXPECT_THROW(ValueDistribution::Tabulated({0.0, 0.5, 1.0}, {0.0, 0.6, 0.5}),
               std::invalid_argument);
  EXPECT_THROW(ValueDistribution::Tabulated({0.0, 0.0, 1.0}, {0.0, 0.5, 1.0}),
               std::invalid_argument);
  EXPECT_THROW(ValueDistribution::Uniform(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ValueDistribution::Uniform(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(ValueDistribution::Tabulated({-1.0, 1.0}, {0.0, 1.0}),
               std::invalid_argument);
}

TEST(Regularity, UniformAndSquarePass) {
  EXPECT_TRUE(ValidateRegularity(ValueDistribution::Uniform()).passed);
  EXPECT_TRUE(ValidateRegularity(Square()).passed);
  // Grid oracle for F = x^2: psi' = (3x^2 + 1) / (2x^2) > 0.
  const auto d = Square();
  for (int i = 1; i < 512; ++i) {
    const double x = i / 512.0;
    EXPECT_GT(VirtualValue(d, x + 1.0 / 512.0), VirtualValue(d, x));
  }
}

TEST(Regularity, DecreasingSegmentFailsThere) {
  const auto rep = ValidateRegularity(SpikeTable());
  ASSERT_FALSE(rep.passed);
  ASSERT_TRUE(rep.violation_x.has_value());
  EXPECT_GT(*rep.violation_x, 0.4);
  EXPECT_LT(*rep.violation_x, 0.7);
  EXPECT_FALSE(rep.message.empty());
}

TEST(Sample, DeterministicAndInSupport) {
  const auto u = ValueDistribution::Uniform();
  const auto a = Sample(u, 3, 7);
  const auto b = Sample(u, 3, 7);
  EXPECT_EQ(a, b);
  for (double v : a) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_NE(Sample(u, 3, 8), a);
  EXPECT_THROW(Sample(u, 0, 7), std::invalid_argument);
}

TEST(Sample, MeanOfMillionDraws) {
  const auto s = Sample(ValueDistribution::Uniform(), 1000000, 1);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
  EXPECT_NEAR(mean, 0.5, 0.002);
}

}  // namespace
}  // namespace seqauction
