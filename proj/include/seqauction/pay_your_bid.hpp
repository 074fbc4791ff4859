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

#ifndef SEQAUCTION_PAY_YOUR_BID_HPP_
#define SEQAUCTION_PAY_YOUR_BID_HPP_

#include <algorithm>
#include <span>
#include <vector>

#include "seqauction/order_stats.hpp"
#include "seqauction/third_price.hpp"

namespace seqauction {

// Breakpoints of the participation function: a(lower) and psi^{-1}(0).
struct PybBreaks {
  double a0;
  double psi0;
};

inline PybBreaks PybBreakpoints(const ValueDistribution& d) {
  return {AllocThreshold(d, d.lower()), PsiInverseZero(d)};
}

namespace detail {

inline double PybMiddleTerm(const ValueDistribution& d, int n, double q) {
  const double s = q + VirtualValue(d, q);
  return (n - 1) * IPow(d.Cdf(s), n - 2) * (1.0 - d.Cdf(q));
}

inline double PybLow(const ValueDistribution& d, int n, double q) {
  return RivalCdfPdf(d, n, 1, q).cdf;
}
inline double PybMiddle(const ValueDistribution& d, int n, double q) {
  return RivalCdfPdf(d, n, 1, q).cdf + PybMiddleTerm(d, n, q);
}
inline double PybTop(const ValueDistribution& d, int n, double q) {
  return RivalCdfPdf(d, n, 2, q).cdf;
}

}  // namespace detail

// H(q): weight on the report q in the pay-your-bid equilibrium condition.
inline double PybParticipation(const ValueDistribution& d, int n, double q) {
  CheckInSupport(d, q, "report");
  const auto br = PybBreakpoints(d);
  if (q >= br.psi0) return detail::PybTop(d, n, q);
  if (q >= br.a0) return detail::PybMiddle(d, n, q);
  return detail::PybLow(d, n, q);
}

// H'(q).
inline double PybParticipationSlope(const ValueDistribution& d, int n,
                                    double q) {
  CheckInSupport(d, q, "report");
  const auto br = PybBreakpoints(d);
  if (q >= br.psi0) return RivalCdfPdf(d, n, 2, q).pdf;
  const double g1 = RivalCdfPdf(d, n, 1, q).pdf;
  if (q < br.a0) return g1;
  const double psi = VirtualValue(d, q);
  const double s = q + psi;
  const double fs = d.Cdf(s);
  const double fq = d.Cdf(q);
  const double rise = (n - 2) * IPow(fs, n - 3) * (1.0 - fq) *
                      (1.0 + VirtualValueSlope(d, q)) * d.Pdf(s);
  return g1 + (n - 1) * (rise - IPow(fs, n - 2) * d.Pdf(q));
}

namespace detail {

// int_lo^hi s H'(s) ds for [lo, hi] inside one piece of H.
inline double PybMomentPiece(const ValueDistribution& d, int n, double lo,
                             double hi, QuadratureOptions opts) {
  return Integrate(
      [&](double s) { return s * PybParticipationSlope(d, n, s); }, lo, hi,
      opts);
}

}  // namespace detail

// Equilibrium bid beta(x) = (1/H(x)) int_lower^x s dH(s), evaluated piecewise.
inline double PybBid(const ValueDistribution& d, int n, double x) {
  CheckInSupport(d, x, "type");
  if (n < 3) throw std::invalid_argument("pay-your-bid needs N >= 3");
  const auto br = PybBreakpoints(d);
  const QuadratureOptions opts{1e-13, 40};
  if (x <= d.lower()) return d.lower();
  if (x <= br.a0) return ExpectedFirstRivalBelow(d, n, x);
  // H(a0) beta(a0) carried into the middle piece.
  double mass = br.a0 > d.lower()
                    ? detail::PybLow(d, n, br.a0) *
                          ExpectedFirstRivalBelow(d, n, br.a0)
                    : 0.0;
  if (x <= br.psi0) {
    mass += detail::PybMomentPiece(d, n, br.a0, x, opts);
    return mass / PybParticipation(d, n, x);
  }
  mass += detail::PybMomentPiece(d, n, br.a0, br.psi0, opts);
  mass += detail::PybMomentPiece(d, n, br.psi0, x, opts);
  return mass / PybParticipation(d, n, x);
}

// Pay-your-bid format with a cached bid curve. Bids are linear between cache
// nodes and reports are recovered by inverting that same interpolant.
class PayYourBidAuction {
 public:
  PayYourBidAuction(ValueDistribution d, int n, int grid_points = 4096)
      : d_(std::move(d)), n_(n) {
    if (n < 3) throw std::invalid_argument("pay-your-bid needs N >= 3");
    if (grid_points < 2) throw std::invalid_argument("grid needs 2 points");
    const auto br = PybBreakpoints(d_);
    const double lo = d_.lower();
    const double hi = d_.upper();
    for (int i = 0; i < grid_points; ++i) {
      x_.push_back(i + 1 == grid_points ? hi
                                        : lo + (hi - lo) * i / (grid_points - 1.0));
    }
    // beta bends sharply just past each breakpoint, so nodes cluster there.
    for (double b : {br.a0, br.psi0}) {
      x_.push_back(b);
      for (int j = 1; j <= 2048; ++j) {
        const double t = j / 2048.0;
        const double x = b + 0.1 * (hi - lo) * t * t;
        if (x < hi) x_.push_back(x);
      }
    }
    std::sort(x_.begin(), x_.end());
    x_.erase(std::unique(x_.begin(), x_.end()), x_.end());
    // Cumulative int s dH(s) across nodes; breakpoints are nodes, so each
    // interval lies inside one piece.
    const QuadratureOptions opts{1e-14, 40};
    beta_.resize(x_.size());
    beta_[0] = lo;
    double mass = 0.0;
    for (std::size_t i = 1; i < x_.size(); ++i) {
      const double x = x_[i];
      if (x <= br.a0) {
        beta_[i] = ExpectedFirstRivalBelow(d_, n_, x);
        mass = detail::PybLow(d_, n_, x) * beta_[i];
        continue;
      }
      mass += detail::PybMomentPiece(d_, n_, x_[i - 1], x, opts);
      beta_[i] = mass / PybParticipation(d_, n_, x);
    }
  }

  const ValueDistribution& dist() const { return d_; }
  int n_bidders() const { return n_; }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& bids() const { return beta_; }

  double Bid(double x) const {
    CheckInSupport(d_, x, "type");
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return beta_[i] + t * (beta_[i + 1] - beta_[i]);
  }

  // Report whose interpolated bid equals b. Bids outside the curve's range
  // are clamped and flagged.
  double InvertBid(double b, bool* clamped = nullptr) const {
    if (clamped) *clamped = false;
    if (b <= beta_.front() || b >= beta_.back()) {
      if (clamped && (b < beta_.front() || b > beta_.back())) *clamped = true;
      return b <= beta_.front() ? x_.front() : x_.back();
    }
    std::size_t lo = 0;
    std::size_t hi = beta_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (beta_[mid] <= b) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t = (b - beta_[lo]) / (beta_[hi] - beta_[lo]);
    return x_[lo] + t * (x_[hi] - x_[lo]);
  }

  // Plays the format. Bids default to equilibrium bids of the types.
  AuctionOutcome Run(std::span<const double> types,
                     std::span<const double> bids,
                     std::uint64_t tie_seed = 0) const {
    if (static_cast<int>(types.size()) != n_ || bids.size() != types.size()) {
      throw std::invalid_argument("pay-your-bid: profile size differs from N");
    }
    AuctionOutcome out;
    std::vector<double> reports(types.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
      bool c = false;
      reports[i] = InvertBid(bids[i], &c);
      out.bids_clamped = out.bids_clamped || c;
    }
    const TypeProfile ranked(reports, tie_seed);
    const auto& q = ranked.sorted();
    const int top = ranked.order()[0];
    const int second = ranked.order()[1];
    out.transfers.assign(types.size(), 0.0);
    out.transfers[top] = bids[top];
    out.unconditional_payment_by_top = bids[top];
    if (AllocationMargin(d_, q[1], q[2]) >= 0.0) {
      out.allocated_rank = 2;
      out.allocated_bidder = second;
      out.transfers[second] = bids[second];
    }
    detail::SettleSecondStage(out, ranked, types);
    const auto w = out.second_stage.winner();
    if (w && *w == top) {
      out.rebate_paid = out.second_stage.price;
      out.transfers[top] -= out.rebate_paid;
    }
    for (double t : out.transfers) out.seller1_revenue += t;
    return out;
  }

  AuctionOutcome Run(std::span<const double> types,
                     std::uint64_t tie_seed = 0) const {
    std::vector<double> bids(types.size());
    for (std::size_t i = 0; i < types.size(); ++i) bids[i] = Bid(types[i]);
    return Run(types, bids, tie_seed);
  }

 private:
  ValueDistribution d_;
  int n_;
  std::vector<double> x_;
  std::vector<double> beta_;
};

}  // namespace seqauction

#endif  // SEQAUCTION_PAY_YOUR_BID_HPP_
