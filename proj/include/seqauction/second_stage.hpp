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

#ifndef SEQAUCTION_SECOND_STAGE_HPP_
#define SEQAUCTION_SECOND_STAGE_HPP_

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace seqauction {

struct SecondStageResult {
  std::vector<int> winners;  // indices into the list passed in
  double price = 0.0;        // per unit; 0 when nothing is sold

  std::optional<int> winner() const {
    if (winners.empty()) return std::nullopt;
    return winners.front();
  }
  double revenue() const { return price * static_cast<double>(winners.size()); }
};

// Uniform-price auction for `units` identical units with reserve r among
// truthful bidders. With one unit this is the second-price auction: the
// highest value wins if it is at least r and pays max(r, second highest).
inline SecondStageResult RunSecondStage(std::span<const double> remaining,
                                        double r, int units = 1) {
  std::vector<int> order(remaining.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remaining[a] > remaining[b];
  });
  SecondStageResult out;
  for (int i : order) {
    if (static_cast<int>(out.winners.size()) == units) break;
    if (remaining[i] < r) break;
    out.winners.push_back(i);
  }
  if (out.winners.empty()) return out;
  out.price = r;
  const std::size_t next = out.winners.size();
  if (next < order.size()) out.price = std::max(r, remaining[order[next]]);
  return out;
}

}  // namespace seqauction

#endif  // SEQAUCTION_SECOND_STAGE_HPP_
