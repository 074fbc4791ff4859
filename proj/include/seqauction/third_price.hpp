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

#ifndef SEQAUCTION_THIRD_PRICE_HPP_
#define SEQAUCTION_THIRD_PRICE_HPP_

#include <span>
#include <vector>

#include "seqauction/mechanism.hpp"

namespace seqauction {

struct AuctionOutcome : MechanismOutcome {
  double rebate_paid = 0.0;
  double unconditional_payment_by_top = 0.0;
  bool bids_clamped = false;
};

namespace detail {

// Second stage at reserve 0 among everyone except the recipient, using true
// values. Fills the second-stage fields of `out`.
inline void SettleSecondStage(AuctionOutcome& out, const TypeProfile& ranked,
                              std::span<const double> values) {
  std::vector<int> rest;
  std::vector<double> rest_values;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const int bidder = ranked.order()[i];
    if (out.allocated_bidder && *out.allocated_bidder == bidder) continue;
    rest.push_back(bidder);
    rest_values.push_back(values[bidder]);
  }
  auto stage = RunSecondStage(rest_values, 0.0);
  for (int& w : stage.winners) w = rest[w];
  out.seller2_revenue = stage.revenue();
  out.second_stage = std::move(stage);
}

}  // namespace detail

// Modified third-price auction. The second-highest bidder gets the object iff
// b2 >= a(b3); payments follow the no-reserve direct rule evaluated at the
// bids. The second stage uses the bidders' true values.
inline AuctionOutcome RunThirdPrice(const ValueDistribution& d,
                                    std::span<const double> bids,
                                    std::span<const double> values,
                                    std::uint64_t tie_seed = 0) {
  if (bids.size() < 3) throw std::invalid_argument("third-price needs 3 bids");
  if (values.size() != bids.size()) {
    throw std::invalid_argument("bids and values differ in length");
  }
  AuctionOutcome out;
  std::vector<double> clamped(bids.begin(), bids.end());
  for (double& b : clamped) {
    const double c = std::clamp(b, d.lower(), d.upper());
    if (c != b) out.bids_clamped = true;
    b = c;
  }
  const TypeProfile ranked(clamped, tie_seed);
  const auto& b = ranked.sorted();
  out.transfers.assign(bids.size(), 0.0);
  if (b[1] >= AllocThreshold(d, b[2])) {
    const int second = ranked.order()[1];
    const int top = ranked.order()[0];
    out.allocated_rank = 2;
    out.allocated_bidder = second;
    if (VirtualValue(d, b[2]) < 0.0) {
      const double a = AllocThreshold(d, b[2]);
      out.transfers[second] = a;
      out.transfers[top] = a - b[2];
    } else {
      out.transfers[second] = b[2];
    }
    out.unconditional_payment_by_top = out.transfers[top];
  }
  for (double t : out.transfers) out.seller1_revenue += t;
  detail::SettleSecondStage(out, ranked, values);
  return out;
}

inline AuctionOutcome RunThirdPrice(const ValueDistribution& d,
                                    std::span<const double> values,
                                    std::uint64_t tie_seed = 0) {
  return RunThirdPrice(d, values, values, tie_seed);
}

}  // namespace seqauction

#endif  // SEQAUCTION_THIRD_PRICE_HPP_
