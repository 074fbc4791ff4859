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

#ifndef SEQAUCTION_AUDIT_HPP_
#define SEQAUCTION_AUDIT_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqauction/mechanism.hpp"
#include "seqauction/simulation.hpp"

namespace seqauction {

// Evaluation of one bidder's report against fixed truthful rivals.
struct ReporterDraw {
  bool recipient = false;
  double transfer = 0.0;
  // Highest competing unit price in the second stage (the M-th highest
  // remaining rival value), -inf if fewer than M rivals remain.
  double rival_cut = -kInf;

  // Gross payoff of a bidder whose true type is x.
  double Gross(double x, double r) const {
    if (recipient) return x;
    if (x >= r && x > rival_cut) return x - std::max(r, rival_cut);
    return 0.0;
  }
  // Whether type x ends up with an item.
  bool GetsItem(double x, double r) const {
    return recipient || (x >= r && x > rival_cut);
  }
};

// Rival values must be sorted in descending order. `buf` is scratch space of
// size N.
inline ReporterDraw EvaluateReport(const MechanismConfig& cfg, double q,
                                   const std::vector<double>& rivals,
                                   std::vector<double>& buf) {
  const std::size_t n = rivals.size() + 1;
  std::size_t pos = 0;
  while (pos < rivals.size() && rivals[pos] > q) ++pos;
  for (std::size_t i = 0, j = 0; i < n; ++i) {
    buf[i] = i == pos ? q : rivals[j++];
  }
  const auto dec = DecideFirstStage(cfg, std::span<const double>(buf.data(), n));
  ReporterDraw out;
  out.recipient = dec.recipient == static_cast<int>(pos) + 1;
  if (pos < static_cast<std::size_t>(kMaxPayingRanks)) {
    out.transfer = dec.transfer[pos];
  }
  // M-th highest rival left in the second stage.
  const int m = cfg.units;
  int seen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == pos) continue;
    if (dec.recipient != 0 && static_cast<int>(i) == dec.recipient - 1) continue;
    if (++seen == m) {
      out.rival_cut = buf[i];
      break;
    }
  }
  return out;
}

inline void DrawRivals(const MechanismConfig& cfg, std::uint64_t seed,
                       std::uint64_t draw, std::vector<double>& rivals) {
  DrawTypes(cfg.dist, seed, draw, rivals);
  std::sort(rivals.begin(), rivals.end(), std::greater<>());
}

inline std::vector<double> Linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? hi : lo + (hi - lo) * i / std::max(1, n - 1);
  }
  return out;
}

// Pi(q | x): expected gross payoff of type x reporting q against truthful
// rivals.
inline Statistic InterimPayoff(const MechanismConfig& cfg, double q, double x,
                               std::int64_t reps, std::uint64_t seed) {
  CheckInSupport(cfg.dist, q, "report");
  CheckInSupport(cfg.dist, x, "type");
  std::vector<double> rivals(cfg.n_bidders - 1);
  std::vector<double> buf(cfg.n_bidders);
  RunningStat st;
  for (std::int64_t j = 0; j < reps; ++j) {
    DrawRivals(cfg, seed, static_cast<std::uint64_t>(j), rivals);
    st.Add(EvaluateReport(cfg, q, rivals, buf).Gross(x, cfg.r));
  }
  return st.Summary();
}

struct IcAuditReport {
  std::vector<double> grid;
  // regret[i][k]: mean utility gain of type grid[i] reporting grid[k].
  std::vector<std::vector<double>> regret;
  std::vector<std::vector<double>> std_error;
  double max_regret = -kInf;
  double worst_se = 0.0;
  double worst_x = kNaN;
  double worst_q = kNaN;
  // Same, restricted to underreports q < x.
  double max_under_regret = -kInf;
  double under_se = 0.0;
  double under_x = kNaN;
  double under_q = kNaN;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

// Deviation regret on a grid, with common rival draws across all (x, q)
// pairs. The mechanism is evaluated once per (draw, report).
inline IcAuditReport IcAudit(const MechanismConfig& cfg, int grid_density,
                             std::int64_t reps, std::uint64_t seed,
                             int threads = 0) {
  if (grid_density < 2) throw std::invalid_argument("grid density must be >= 2");
  if (reps < 2) throw std::invalid_argument("audit needs at least 2 draws");
  const int g = grid_density;
  const auto grid = Linspace(cfg.dist.lower(), cfg.dist.upper(), g);
  std::vector<std::vector<RunningStat>> acc(
      kBatches, std::vector<RunningStat>(static_cast<std::size_t>(g) * g));
  ForEachBatch(reps, kBatches, threads > 0 ? threads : DefaultThreadCount(),
               [&](int b, std::int64_t lo, std::int64_t hi) {
                 std::vector<double> rivals(cfg.n_bidders - 1);
                 std::vector<double> buf(cfg.n_bidders);
                 std::vector<ReporterDraw> rd(g);
                 std::vector<double> truthful(g);
                 auto& a = acc[b];
                 for (std::int64_t j = lo; j < hi; ++j) {
                   DrawRivals(cfg, seed, static_cast<std::uint64_t>(j), rivals);
                   for (int k = 0; k < g; ++k) {
                     rd[k] = EvaluateReport(cfg, grid[k], rivals, buf);
                   }
                   for (int i = 0; i < g; ++i) {
                     truthful[i] = rd[i].Gross(grid[i], cfg.r) - rd[i].transfer;
                   }
                   for (int i = 0; i < g; ++i) {
                     for (int k = 0; k < g; ++k) {
                       const double u =
                           rd[k].Gross(grid[i], cfg.r) - rd[k].transfer;
                       a[static_cast<std::size_t>(i) * g + k].Add(u - truthful[i]);
                     }
                   }
                 }
               });
  IcAuditReport rep;
  rep.grid = grid;
  rep.replications = reps;
  rep.seed = seed;
  rep.regret.assign(g, std::vector<double>(g));
  rep.std_error.assign(g, std::vector<double>(g));
  for (int i = 0; i < g; ++i) {
    for (int k = 0; k < g; ++k) {
      RunningStat s;
      for (const auto& a : acc) s.Merge(a[static_cast<std::size_t>(i) * g + k]);
      const auto sum = s.Summary();
      rep.regret[i][k] = sum.mean;
      rep.std_error[i][k] = sum.std_error;
      if (i != k && sum.mean > rep.max_regret) {
        rep.max_regret = sum.mean;
        rep.worst_se = sum.std_error;
        rep.worst_x = grid[i];
        rep.worst_q = grid[k];
      }
      if (k < i && sum.mean > rep.max_under_regret) {
        rep.max_under_regret = sum.mean;
        rep.under_se = sum.std_error;
        rep.under_x = grid[i];
        rep.under_q = grid[k];
      }
    }
  }
  return rep;
}

struct ConvexityReport {
  bool passed = true;
  double min_slack = kInf;  // min over cells of mean + 3 SE + 1e-6
  double worst_q = kNaN;
  double worst_x = kNaN;
  double worst_second_diff = kNaN;
  double worst_se = kNaN;
};

// Checks that Pi(q | .) is convex in the true type: second differences on a
// uniform x grid must be >= -(3 SE + 1e-6).
inline ConvexityReport ConvexityAudit(const MechanismConfig& cfg,
                                      const std::vector<double>& q_grid,
                                      int x_points, std::int64_t reps,
                                      std::uint64_t seed, int threads = 0) {
  if (x_points < 3) throw std::invalid_argument("convexity needs 3 x points");
  const auto xs = Linspace(cfg.dist.lower(), cfg.dist.upper(), x_points);
  const std::size_t nq = q_grid.size();
  const std::size_t cells = nq * (x_points - 2);
  std::vector<std::vector<RunningStat>> acc(kBatches,
                                            std::vector<RunningStat>(cells));
  ForEachBatch(reps, kBatches, threads > 0 ? threads : DefaultThreadCount(),
               [&](int b, std::int64_t lo, std::int64_t hi) {
                 std::vector<double> rivals(cfg.n_bidders - 1);
                 std::vector<double> buf(cfg.n_bidders);
                 std::vector<double> pi(x_points);
                 for (std::int64_t j = lo; j < hi; ++j) {
                   DrawRivals(cfg, seed, static_cast<std::uint64_t>(j), rivals);
                   for (std::size_t k = 0; k < nq; ++k) {
                     const auto rd = EvaluateReport(cfg, q_grid[k], rivals, buf);
                     for (int i = 0; i < x_points; ++i) {
                       pi[i] = rd.Gross(xs[i], cfg.r);
                     }
                     for (int i = 1; i + 1 < x_points; ++i) {
                       acc[b][k * (x_points - 2) + (i - 1)].Add(
                           pi[i + 1] - 2.0 * pi[i] + pi[i - 1]);
                     }
                   }
                 }
               });
  ConvexityReport rep;
  for (std::size_t k = 0; k < nq; ++k) {
    for (int i = 1; i + 1 < x_points; ++i) {
      RunningStat s;
      for (const auto& a : acc) s.Merge(a[k * (x_points - 2) + (i - 1)]);
      const auto sum = s.Summary();
      const double slack = sum.mean + 3.0 * sum.std_error + 1e-6;
      if (slack < rep.min_slack) {
        rep.min_slack = slack;
        rep.worst_q = q_grid[k];
        rep.worst_x = xs[i];
        rep.worst_second_diff = sum.mean;
        rep.worst_se = sum.std_error;
      }
    }
  }
  rep.passed = rep.min_slack >= 0.0;
  return rep;
}

namespace detail {

// Per-draw envelope transfers t(x_i) on `xs` (uniform grid from lower):
// Pi(x|x) minus the trapezoid integral of Pr(item) up to x.
inline void EnvelopeDraw(const MechanismConfig& cfg,
                         const std::vector<double>& xs,
                         const std::vector<double>& rivals,
                         std::vector<double>& buf, std::vector<double>& out) {
  double integral = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto rd = EvaluateReport(cfg, xs[i], rivals, buf);
    const double p = rd.GetsItem(xs[i], cfg.r) ? 1.0 : 0.0;
    if (i > 0) integral += 0.5 * (p + prev) * (xs[i] - xs[i - 1]);
    prev = p;
    out[i] = rd.Gross(xs[i], cfg.r) - integral;
  }
}

}  // namespace detail

// Transfer implied by the envelope condition,
// t(x) = Pi(x|x) - int_lower^x Pr(item | x') dx', by Monte Carlo.
inline Statistic EnvelopeTransfer(const MechanismConfig& cfg, double x,
                                  std::int64_t reps, std::uint64_t seed,
                                  int grid_points = 257) {
  CheckInSupport(cfg.dist, x, "type");
  const auto xs = Linspace(cfg.dist.lower(), x, grid_points);
  std::vector<double> rivals(cfg.n_bidders - 1);
  std::vector<double> buf(cfg.n_bidders);
  std::vector<double> t(xs.size());
  RunningStat st;
  for (std::int64_t j = 0; j < reps; ++j) {
    DrawRivals(cfg, seed, static_cast<std::uint64_t>(j), rivals);
    detail::EnvelopeDraw(cfg, xs, rivals, buf, t);
    st.Add(t.back());
  }
  return st.Summary();
}

// N E[t(X)] with t from the envelope condition: expected first-seller
// revenue implied by the allocation rule alone.
inline Statistic EnvelopeRevenue(const MechanismConfig& cfg, std::int64_t reps,
                                 std::uint64_t seed, int grid_points = 257) {
  const ValueDistribution& d = cfg.dist;
  const auto xs = Linspace(d.lower(), d.upper(), grid_points);
  std::vector<double> w(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double h = xs[1] - xs[0];
    w[i] = d.Pdf(xs[i]) * h * (i == 0 || i + 1 == xs.size() ? 0.5 : 1.0);
  }
  std::vector<double> rivals(cfg.n_bidders - 1);
  std::vector<double> buf(cfg.n_bidders);
  std::vector<double> t(xs.size());
  RunningStat st;
  for (std::int64_t j = 0; j < reps; ++j) {
    DrawRivals(cfg, seed, static_cast<std::uint64_t>(j), rivals);
    detail::EnvelopeDraw(cfg, xs, rivals, buf, t);
    double e = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) e += w[i] * t[i];
    st.Add(cfg.n_bidders * e);
  }
  return st.Summary();
}

}  // namespace seqauction

#endif  // SEQAUCTION_AUDIT_HPP_
