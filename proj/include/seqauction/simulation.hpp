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

#ifndef SEQAUCTION_SIMULATION_HPP_
#define SEQAUCTION_SIMULATION_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "seqauction/benchmark.hpp"
#include "seqauction/mechanism.hpp"
#include "seqauction/pay_your_bid.hpp"
#include "seqauction/rng.hpp"
#include "seqauction/third_price.hpp"

namespace seqauction {

// Number of independent batches a Monte Carlo run is split into. Batches are
// the unit of threading, so results do not depend on the thread count.
inline constexpr int kBatches = 20;

struct Statistic {
  double mean = 0.0;
  double std_error = 0.0;
  bool se_defined = false;
};

// Welford accumulator with Chan's merge.
class RunningStat {
 public:
  void Add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void Merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) *
                       static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : kNaN;
  }

  // Standard error of the mean: sample standard deviation over sqrt(n).
  Statistic Summary() const {
    Statistic s;
    s.mean = mean_;
    s.se_defined = n_ > 1;
    s.std_error =
        s.se_defined ? std::sqrt(variance() / static_cast<double>(n_)) : kNaN;
    return s;
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Worker count from SEQAUCTION_THREADS, else the hardware concurrency.
inline int DefaultThreadCount() {
  if (const char* env = std::getenv("SEQAUCTION_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs body(batch, begin, end) for each of the batches covering [0, total).
template <class Body>
void ForEachBatch(std::int64_t total, int batches, int threads, Body&& body) {
  batches = static_cast<int>(std::max<std::int64_t>(
      1, std::min<std::int64_t>(batches, total)));
  auto range = [&](int b) {
    return std::pair<std::int64_t, std::int64_t>{total * b / batches,
                                                 total * (b + 1) / batches};
  };
  threads = std::clamp(threads, 1, batches);
  if (threads == 1) {
    for (int b = 0; b < batches; ++b) {
      const auto [lo, hi] = range(b);
      body(b, lo, hi);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int b = next++; b < batches; b = next++) {
        try {
          const auto [lo, hi] = range(b);
          body(b, lo, hi);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Types of the bidders in replication `rep`.
inline void DrawTypes(const ValueDistribution& d, std::uint64_t seed,
                      std::uint64_t rep, std::vector<double>& out) {
  const CounterRng rng(seed, rep);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d.Quantile(rng.Uniform(i));
}

struct DirectFormat {
  MechanismConfig cfg;
};
struct ThirdPriceFormat {
  ValueDistribution dist = ValueDistribution::Uniform();
  int n_bidders = 3;
};
struct PayYourBidFormat {
  std::shared_ptr<const PayYourBidAuction> auction;
};
struct BenchmarkFormat {
  PoolingEquilibrium eq;
};
using Format =
    std::variant<DirectFormat, ThirdPriceFormat, PayYourBidFormat, BenchmarkFormat>;

struct Scenario {
  Format format;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 means DefaultThreadCount()
};

struct RevenueReport {
  Statistic seller1;
  Statistic seller2;
  Statistic alloc_prob;
  std::optional<Statistic> participation;  // benchmark only
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

inline const ValueDistribution& FormatDistribution(const Format& f) {
  return std::visit(
      [](const auto& v) -> const ValueDistribution& {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DirectFormat>) return v.cfg.dist;
        if constexpr (std::is_same_v<T, ThirdPriceFormat>) return v.dist;
        if constexpr (std::is_same_v<T, PayYourBidFormat>) return v.auction->dist();
        if constexpr (std::is_same_v<T, BenchmarkFormat>) return v.eq.dist;
      },
      f);
}

inline int FormatBidders(const Format& f) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DirectFormat>) return v.cfg.n_bidders;
        if constexpr (std::is_same_v<T, ThirdPriceFormat>) return v.n_bidders;
        if constexpr (std::is_same_v<T, PayYourBidFormat>) {
          return v.auction->n_bidders();
        }
        if constexpr (std::is_same_v<T, BenchmarkFormat>) return v.eq.n;
      },
      f);
}

// Seller revenues and allocation frequency by Monte Carlo. Replication i uses
// the counter stream (seed, i), so output is identical for any thread count.
inline RevenueReport McEvaluate(const Scenario& sc) {
  if (sc.replications < 1) {
    throw std::invalid_argument("replications must be at least 1");
  }
  const ValueDistribution& d = FormatDistribution(sc.format);
  const int n = FormatBidders(sc.format);
  struct Acc {
    RunningStat s1, s2, alloc, part;
  };
  std::vector<Acc> acc(kBatches);
  const bool is_benchmark = std::holds_alternative<BenchmarkFormat>(sc.format);
  ForEachBatch(
      sc.replications, kBatches,
      sc.threads > 0 ? sc.threads : DefaultThreadCount(),
      [&](int b, std::int64_t lo, std::int64_t hi) {
        std::vector<double> types(n);
        Acc& a = acc[b];
        for (std::int64_t rep = lo; rep < hi; ++rep) {
          const auto urep = static_cast<std::uint64_t>(rep);
          DrawTypes(d, sc.seed, urep, types);
          const std::uint64_t tie = HashCombine(sc.seed ^ 0x7469655fULL, urep);
          double s1 = 0.0;
          double s2 = 0.0;
          bool alloc = false;
          std::visit(
              [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                MechanismOutcome out;
                if constexpr (std::is_same_v<T, DirectFormat>) {
                  out = RunDirect(f.cfg, TypeProfile(types, tie));
                } else if constexpr (std::is_same_v<T, ThirdPriceFormat>) {
                  out = RunThirdPrice(f.dist, types, tie);
                } else if constexpr (std::is_same_v<T, PayYourBidFormat>) {
                  out = f.auction->Run(types, tie);
                } else {
                  out = RunBenchmarkSpa(f.eq, types, tie);
                  int bidders = 0;
                  for (double t : types) bidders += t >= f.eq.x_hat ? 1 : 0;
                  a.part.Add(static_cast<double>(bidders) / n);
                }
                s1 = out.seller1_revenue;
                s2 = out.seller2_revenue;
                alloc = out.allocated_bidder.has_value();
              },
              sc.format);
          a.s1.Add(s1);
          a.s2.Add(s2);
          a.alloc.Add(alloc ? 1.0 : 0.0);
        }
      });
  Acc total;
  for (const Acc& a : acc) {
    total.s1.Merge(a.s1);
    total.s2.Merge(a.s2);
    total.alloc.Merge(a.alloc);
    total.part.Merge(a.part);
  }
  RevenueReport rep;
  rep.seller1 = total.s1.Summary();
  rep.seller2 = total.s2.Summary();
  rep.alloc_prob = total.alloc.Summary();
  if (is_benchmark) rep.participation = total.part.Summary();
  rep.replications = sc.replications;
  rep.seed = sc.seed;
  return rep;
}

}  // namespace seqauction

#endif  // SEQAUCTION_SIMULATION_HPP_
