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

#ifndef SEQAUCTION_MECHANISM_HPP_
#define SEQAUCTION_MECHANISM_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqauction/distribution.hpp"
#include "seqauction/numerics.hpp"
#include "seqauction/rng.hpp"
#include "seqauction/second_stage.hpp"

namespace seqauction {

// Optimal first-seller mechanisms by reserve regime, plus the must-sell and
// multi-unit variants.
enum class Regime {
  kNoReserve,           // T1: r <= lower
  kHighReserve,         // T2: r >= psi^{-1}(0)
  kLowReserveWithhold,  // T3: lower < r < psi^{-1}(0), Z(r) <= 0
  kLowReservePool,      // T4: lower < r < psi^{-1}(0), Z(r) >= 0
  kMustSell,
  kMultiUnit,
};

inline std::string_view RegimeName(Regime r) {
  switch (r) {
    case Regime::kNoReserve: return "T1";
    case Regime::kHighReserve: return "T2";
    case Regime::kLowReserveWithhold: return "T3";
    case Regime::kLowReservePool: return "T4";
    case Regime::kMustSell: return "must_sell";
    case Regime::kMultiUnit: return "multi_unit";
  }
  return "?";
}

inline std::optional<Regime> ParseRegime(std::string_view s) {
  for (Regime r : {Regime::kNoReserve, Regime::kHighReserve,
                   Regime::kLowReserveWithhold, Regime::kLowReservePool,
                   Regime::kMustSell, Regime::kMultiUnit}) {
    if (RegimeName(r) == s) return r;
  }
  return std::nullopt;
}

struct RegimeConstants {
  double psi_inv_zero = 0.0;
  double a_of_r = 0.0;
  double lower_alloc_bound = 0.0;  // a(lower)
};

struct MechanismConfig {
  ValueDistribution dist = ValueDistribution::Uniform();
  int n_bidders = 3;
  double r = 0.0;
  Regime regime = Regime::kNoReserve;
  int units = 1;
  RegimeConstants constants;
  double z_at_r = kNaN;
  std::uint64_t tie_seed = 0;
  // Test fixture only: in the threshold-rule branches hand the object to
  // rank 1 while keeping the rank-based transfers. Not incentive compatible.
  bool misallocate_to_top = false;
};

inline constexpr int kMaxPayingRanks = 8;
inline constexpr double kRegimeEdge = 1e-9;

// Values sorted in descending order with ties broken by a seeded hash.
class TypeProfile {
 public:
  TypeProfile(std::vector<double> values, std::uint64_t tie_seed)
      : values_(std::move(values)) {
    if (values_.size() < 3) {
      throw std::invalid_argument("type profile needs at least 3 bidders");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("type profile: non-finite value");
    }
    order_.resize(values_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (values_[a] != values_[b]) return values_[a] > values_[b];
      return HashCombine(tie_seed, a) < HashCombine(tie_seed, b);
    });
    sorted_.resize(values_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) {
      sorted_[i] = values_[order_[i]];
    }
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& sorted() const { return sorted_; }
  // order()[rank - 1] is the bidder holding that rank.
  const std::vector<int>& order() const { return order_; }

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::vector<int> order_;
};

// Z^r(x*) = r F(r) [1 - F(x*)]
//   + (N-1) int_{x*}^{upper} int_r^{min(x, a(r))} [psi + x' - r] f dx' f dx.
inline double ZValue(const ValueDistribution& d, int n, double r,
                     double x_star) {
  CheckInSupport(d, r, "reserve");
  if (x_star < r || x_star > d.upper()) {
    throw DomainError("Z: x* must lie in [r, upper]");
  }
  const double a = AllocThreshold(d, r);
  const QuadratureOptions opts{1e-11, 40};
  auto inner = [&](double v) {
    return Integrate(
        [&](double y) { return VirtualDensity(d, y) + (y - r) * d.Pdf(y); }, r,
        v, opts);
  };
  const double split = std::max(x_star, a);
  const double below = Integrate(
      [&](double x) { return inner(x) * d.Pdf(x); }, x_star, split, opts);
  const double above = inner(a) * (1.0 - d.Cdf(split));
  return r * d.Cdf(r) * (1.0 - d.Cdf(x_star)) + (n - 1) * (below + above);
}

// z^r(x*) = -r F(r) + (N-1) int_r^{min(x*, a(r))} [r - x' - psi] f dx', so
// that dZ/dx* = z f.
inline double SmallZValue(const ValueDistribution& d, int n, double r,
                          double x_star) {
  CheckInSupport(d, r, "reserve");
  if (x_star < r || x_star > d.upper()) {
    throw DomainError("z: x* must lie in [r, upper]");
  }
  const double a = AllocThreshold(d, r);
  const double inner = Integrate(
      [&](double y) { return VirtualDensity(d, y) + (y - r) * d.Pdf(y); }, r,
      std::min(x_star, a), {1e-11, 40});
  return -r * d.Cdf(r) - (n - 1) * inner;
}

inline RegimeConstants ComputeConstants(const ValueDistribution& d, double r) {
  RegimeConstants c;
  c.psi_inv_zero = PsiInverseZero(d);
  c.lower_alloc_bound = AllocThreshold(d, d.lower());
  c.a_of_r = d.InSupport(r) ? AllocThreshold(d, r) : kNaN;
  return c;
}

inline void CheckRegular(const ValueDistribution& d) {
  const auto rep = ValidateRegularity(d);
  if (!rep.passed) {
    throw std::invalid_argument("distribution is not regular: " + rep.message);
  }
}

// Picks the optimal regime for reserve r. At the T3/T4 knife edge
// (|Z| <= 1e-9) T3 is used.
inline MechanismConfig SelectRegime(const ValueDistribution& d, int n,
                                    double r, std::uint64_t tie_seed = 0) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("reserve must be finite and non-negative");
  }
  if (n < 3) throw std::invalid_argument("needs at least 3 bidders");
  CheckRegular(d);
  MechanismConfig cfg;
  cfg.dist = d;
  cfg.n_bidders = n;
  cfg.r = r;
  cfg.tie_seed = tie_seed;
  cfg.constants = ComputeConstants(d, r);
  if (r <= d.lower()) {
    cfg.regime = Regime::kNoReserve;
  } else if (r >= cfg.constants.psi_inv_zero) {
    cfg.regime = Regime::kHighReserve;
  } else {
    cfg.z_at_r = ZValue(d, n, r, r);
    cfg.regime = cfg.z_at_r > kRegimeEdge ? Regime::kLowReservePool
                                          : Regime::kLowReserveWithhold;
  }
  return cfg;
}

// Builds a config for an explicitly requested regime. Throws UnsupportedError
// when the regime's conditions on r do not hold.
inline MechanismConfig MakeConfig(const ValueDistribution& d, int n, double r,
                                  Regime regime, int units = 1,
                                  std::uint64_t tie_seed = 0) {
  MechanismConfig cfg = SelectRegime(d, n, r, tie_seed);
  const double lo = d.lower();
  const double psi0 = cfg.constants.psi_inv_zero;
  const bool low = r > lo && r < psi0;
  if (low && std::isnan(cfg.z_at_r)) cfg.z_at_r = ZValue(d, n, r, r);
  bool ok = false;
  switch (regime) {
    case Regime::kNoReserve:
    case Regime::kMustSell:
      ok = r <= lo;
      break;
    case Regime::kHighReserve:
      ok = r >= psi0;
      break;
    case Regime::kLowReserveWithhold:
      ok = low && cfg.z_at_r <= kRegimeEdge;
      break;
    case Regime::kLowReservePool:
      ok = low && cfg.z_at_r >= -kRegimeEdge;
      break;
    case Regime::kMultiUnit:
      ok = r <= lo && units >= 1 && units + 1 <= kMaxPayingRanks &&
           n >= units + 2;
      break;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "regime " << RegimeName(regime) << " is not available for r = " << r
        << ", N = " << n << ", units = " << units;
    throw UnsupportedError(msg.str());
  }
  cfg.regime = regime;
  cfg.units = regime == Regime::kMultiUnit ? units : 1;
  return cfg;
}

// First-stage allocation and transfers indexed by rank.
struct FirstStageDecision {
  int recipient = 0;  // 1-based rank, 0 when the object is withheld
  std::array<double, kMaxPayingRanks> transfer{};

  double seller_revenue() const {
    double s = 0.0;
    for (double t : transfer) s += t;
    return s;
  }
};

namespace detail {

// Branches where either of the top two could receive the object. Rank 2
// gets it: handing it to rank 1 thins the second-stage field and lets the
// second-highest bidder gain by underreporting.
inline void AssignEither(FirstStageDecision& dec, double price) {
  dec.recipient = 2;
  dec.transfer[1] = price;
}

// Rank 2 receives the object when psi(x2) + x2 - z >= 0, z being the lowest
// competing threshold. Rank 2 pays a(z) and rank 1 pays a(z) - z, or rank 2
// pays z once psi(z) >= 0.
inline void AssignThresholdPair(const MechanismConfig& cfg,
                                FirstStageDecision& dec, double z) {
  const ValueDistribution& d = cfg.dist;
  dec.recipient = cfg.misallocate_to_top ? 1 : 2;
  if (VirtualValue(d, z) < 0.0) {
    const double a = z == cfg.r && !std::isnan(cfg.constants.a_of_r)
                         ? cfg.constants.a_of_r
                         : AllocThreshold(d, z);
    dec.transfer[1] = a;
    dec.transfer[0] = a - z;
  } else {
    dec.transfer[1] = z;
  }
}

}  // namespace detail

// Applies the first-stage rule to reports sorted in descending order.
inline FirstStageDecision DecideFirstStage(const MechanismConfig& cfg,
                                           std::span<const double> x) {
  const ValueDistribution& d = cfg.dist;
  const double r = cfg.r;
  FirstStageDecision dec;
  switch (cfg.regime) {
    case Regime::kNoReserve:
      if (AllocationMargin(d, x[1], x[2]) >= 0.0) {
        detail::AssignThresholdPair(cfg, dec, x[2]);
      }
      break;
    case Regime::kHighReserve:
      if (VirtualValue(d, x[0]) < 0.0) break;
      if (x[1] < r) {
        dec.recipient = 1;
        dec.transfer[0] = std::max(cfg.constants.psi_inv_zero, x[1]);
      } else {
        detail::AssignEither(dec, std::max(r, x[2]));
      }
      break;
    case Regime::kLowReserveWithhold: {
      const double z = std::max(r, x[2]);
      if (AllocationMargin(d, x[1], z) >= 0.0) {
        detail::AssignThresholdPair(cfg, dec, z);
      }
      break;
    }
    case Regime::kLowReservePool:
      if (x[0] >= r && x[1] < r) {
        dec.recipient = 1;
        dec.transfer[0] = r;
      } else if (x[1] >= r && x[2] < r) {
        detail::AssignEither(dec, r);
      } else if (x[2] >= r && AllocationMargin(d, x[1], x[2]) >= 0.0) {
        detail::AssignThresholdPair(cfg, dec, x[2]);
      }
      break;
    case Regime::kMustSell:
      dec.recipient = 2;
      dec.transfer[1] = x[2];
      break;
    case Regime::kMultiUnit: {
      const int m = cfg.units;
      const double z = x[m + 1];
      if (AllocationMargin(d, x[m], z, m) < 0.0) break;
      dec.recipient = m + 1;
      if (VirtualValue(d, z) < 0.0) {
        const double b = AllocThreshold(d, z, m);
        dec.transfer[m] = b;
        for (int i = 0; i < m; ++i) dec.transfer[i] = b - z;
      } else {
        dec.transfer[m] = z;
      }
      break;
    }
  }
  return dec;
}

struct MechanismOutcome {
  std::optional<int> allocated_rank;    // 1-based
  std::optional<int> allocated_bidder;  // index into the reported values
  std::vector<double> transfers;        // to the first seller, by bidder
  SecondStageResult second_stage;       // winners are bidder indices
  double seller1_revenue = 0.0;
  double seller2_revenue = 0.0;
};

// Runs the direct mechanism on truthful reports, then the second stage among
// the bidders who did not receive the first object.
inline MechanismOutcome RunDirect(const MechanismConfig& cfg,
                                  const TypeProfile& profile) {
  if (static_cast<int>(profile.size()) != cfg.n_bidders) {
    throw std::invalid_argument("profile size differs from N");
  }
  for (double v : profile.values()) CheckInSupport(cfg.dist, v, "type");
  const auto dec = DecideFirstStage(cfg, profile.sorted());
  const auto& order = profile.order();
  MechanismOutcome out;
  out.transfers.assign(profile.size(), 0.0);
  for (int i = 0; i < kMaxPayingRanks && i < static_cast<int>(order.size());
       ++i) {
    out.transfers[order[i]] = dec.transfer[i];
  }
  out.seller1_revenue = dec.seller_revenue();
  std::vector<int> rest;
  std::vector<double> rest_values;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (dec.recipient != 0 && static_cast<int>(i) == dec.recipient - 1) continue;
    rest.push_back(order[i]);
    rest_values.push_back(profile.sorted()[i]);
  }
  if (dec.recipient != 0) {
    out.allocated_rank = dec.recipient;
    out.allocated_bidder = order[dec.recipient - 1];
  }
  auto stage = RunSecondStage(rest_values, cfg.r, cfg.units);
  for (int& w : stage.winners) w = rest[w];
  out.seller2_revenue = stage.revenue();
  out.second_stage = std::move(stage);
  return out;
}

struct MultiUnitDecision {
  bool allocate = false;
  int rank = 0;  // M + 1 when allocated
};

// Allocation part of the multi-unit rule:
// psi(x_(M+1)) + M (x_(M+1) - x_(M+2)) >= 0.
inline MultiUnitDecision MultiUnitAllocate(const ValueDistribution& d,
                                           const TypeProfile& profile,
                                           int units) {
  if (units < 1 || static_cast<int>(profile.size()) < units + 2) {
    throw std::invalid_argument("multi-unit rule needs N >= M + 2");
  }
  const auto& x = profile.sorted();
  MultiUnitDecision out;
  if (AllocationMargin(d, x[units], x[units + 1], units) >= 0.0) {
    out.allocate = true;
    out.rank = units + 1;
  }
  return out;
}

}  // namespace seqauction

#endif  // SEQAUCTION_MECHANISM_HPP_
