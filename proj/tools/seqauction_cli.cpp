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

// Command-line front end: table1, run, audit, bid-curves.
//
// Exit codes: 0 ok, 1 numeric failure, 2 input or filesystem error,
// 3 unsupported combination.

#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "seqauction/config.hpp"
#include "seqauction/seqauction.hpp"

#ifndef SEQAUCTION_GIT_DESCRIBE
#define SEQAUCTION_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using namespace seqauction;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnsupported = 3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a computed result fails its check; the message is printed.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string Fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> mc;
  std::optional<double> tolerance;
  std::optional<double> r1;
};

// Files of one command, written together at the end of the run.
class OutputSet {
 public:
  void Add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }

  // Writes every file to a temporary name, then renames them into place, so a
  // failure leaves no partial outputs. The manifest goes last.
  void Commit(const fs::path& dir, Json manifest) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::string> names;
    for (const auto& f : files_) names.push_back(f.first);
    manifest["outputs"] = names;
    auto all = files_;
    all.emplace_back("manifest.json", manifest.dump(2) + "\n");
    const std::string suffix = ".tmp" + std::to_string(::getpid());
    std::vector<fs::path> staged;
    auto cleanup = [&] {
      for (const auto& p : staged) fs::remove(p, ec);
    };
    for (const auto& [name, content] : all) {
      const fs::path tmp = dir / (name + suffix);
      std::ofstream os(tmp, std::ios::binary);
      if (os) staged.push_back(tmp);
      os << content;
      os.close();
      if (!os) {
        cleanup();
        throw IoError("cannot write " + (dir / name).string());
      }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      fs::rename(staged[i], dir / all[i].first, ec);
      if (ec) {
        cleanup();
        throw IoError("cannot move " + (dir / all[i].first).string() + " into place");
      }
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

class Manifest {
 public:
  Manifest(std::string command, const Options& opt)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["config"] = opt.config.empty() ? Json(nullptr) : Json(opt.config);
    j_["git_describe"] = SEQAUCTION_GIT_DESCRIBE;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j_["started_utc"] = stamp;
    j_["seed"] = nullptr;
  }
  void SetSeed(std::uint64_t s) { j_["seed"] = s; }
  Json Finish() {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    j_["wall_clock_seconds"] = dt.count();
    return j_;
  }

 private:
  Json j_;
  std::chrono::steady_clock::time_point start_;
};

ScenarioConfig LoadScenario(const Options& opt) {
  std::ifstream is(opt.config);
  if (!is) throw IoError("cannot read config " + opt.config);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  ScenarioConfig c = ParseScenario(j);
  if (opt.seed) {
    c.seed = *opt.seed;
    c.raw["seed"] = *opt.seed;
  }
  return c;
}

// ---------------------------------------------------------------------------
// table1

struct Table1Row {
  std::string name;
  double seller1;
  double seller2;
  std::array<double, 2> published;
  std::optional<RevenueReport> mc;
};

int CmdTable1(const Options& opt) {
  Manifest manifest("table1", opt);
  const auto d = ValueDistribution::Uniform();
  const int n = 3;
  const double tol = opt.tolerance.value_or(5e-3);
  const auto optimal_cfg = SelectRegime(d, n, 0.0);
  const auto must_cfg = MakeConfig(d, n, 0.0, Regime::kMustSell);
  const auto eq = OptimizeR1(d, n);
  const auto opt_rev = ExpectedRevenueAnalytic(optimal_cfg);
  const auto must_rev = ExpectedRevenueAnalytic(must_cfg);
  std::vector<Table1Row> rows = {
      {"optimal", opt_rev.seller1, opt_rev.seller2, {0.382, 0.289}, {}},
      {"must_sell", must_rev.seller1, must_rev.seller2, {0.250, 0.250}, {}},
      {"optimal_spa", RevenueR1(eq), RevenueR2(eq), {0.303, 0.282}, {}},
  };
  if (opt.mc) {
    const std::uint64_t seed = opt.seed.value_or(0);
    manifest.SetSeed(seed);
    const std::array<Format, 3> formats = {Format{DirectFormat{optimal_cfg}},
                                           Format{DirectFormat{must_cfg}},
                                           Format{BenchmarkFormat{eq}}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].mc = McEvaluate(Scenario{formats[i], *opt.mc, seed, 0});
    }
  }

  std::ostringstream csv;
  csv << "mechanism,seller1,seller2";
  if (opt.mc) csv << ",seller1_mc,seller1_se,seller2_mc,seller2_se";
  csv << "\n";
  Json cells = Json::array();
  double max_err = 0.0;
  for (const auto& row : rows) {
    csv << row.name << "," << Fmt(row.seller1) << "," << Fmt(row.seller2);
    if (row.mc) {
      csv << "," << Fmt(row.mc->seller1.mean) << "," << Fmt(row.mc->seller1.std_error)
          << "," << Fmt(row.mc->seller2.mean) << "," << Fmt(row.mc->seller2.std_error);
    }
    csv << "\n";
    const std::array<double, 2> value = {row.seller1, row.seller2};
    for (int s = 0; s < 2; ++s) {
      const double err = std::abs(value[s] - row.published[s]);
      max_err = std::max(max_err, err);
      Json cell{{"mechanism", row.name},
                {"seller", s + 1},
                {"value", value[s]},
                {"published", row.published[s]},
                {"abs_error", err}};
      if (row.mc) {
        const Statistic& st = s == 0 ? row.mc->seller1 : row.mc->seller2;
        cell["mc_mean"] = st.mean;
        cell["mc_std_error"] = st.se_defined ? Json(st.std_error) : Json(nullptr);
        if (st.se_defined && st.std_error > 0.0) {
          cell["mc_z"] = (st.mean - value[s]) / st.std_error;
        }
      }
      cells.push_back(cell);
    }
  }
  const bool passed = max_err <= tol;
  Json diff{{"tolerance", tol},
            {"max_abs_error", max_err},
            {"passed", passed},
            {"optimal_spa_reserve", eq.r1},
            {"cells", cells}};
  if (opt.mc) diff["replications"] = *opt.mc;

  OutputSet out;
  out.Add("table1.csv", csv.str());
  out.Add("table1_diff.json", diff.dump(2) + "\n");
  out.Commit(opt.out, manifest.Finish());
  std::cout << csv.str();
  if (!passed) {
    std::cerr << "table1: max cell error " << Fmt(max_err) << " exceeds " << Fmt(tol)
              << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

int CmdRun(const Options& opt) {
  Manifest manifest("run", opt);
  ScenarioConfig c = LoadScenario(opt);
  if (opt.mc) {
    c.replications = *opt.mc;
    c.raw["replications"] = *opt.mc;
  }
  if (c.replications == 0 && !c.analytic) {
    throw ConfigError("/replications", "nothing to compute: no replications and analytic=false");
  }
  const Format format = BuildFormat(c);
  Json report;
  report["scenario"] = c.raw;
  report["format"] = std::string(FormatName(c.format));
  report["regime"] = nullptr;
  std::optional<RevenueSummary> analytic;
  if (const auto* direct = std::get_if<DirectFormat>(&format)) {
    report["regime"] = std::string(RegimeName(direct->cfg.regime));
    report["diagnostics"] = ToJson(direct->cfg);
    if (c.analytic) analytic = ExpectedRevenueAnalytic(direct->cfg);
  } else if (const auto* bench = std::get_if<BenchmarkFormat>(&format)) {
    report["diagnostics"] = ToJson(bench->eq);
    if (c.analytic) {
      analytic = RevenueSummary{RevenueR1(bench->eq), RevenueR2(bench->eq),
                                1.0 - std::pow(c.dist.Cdf(bench->eq.x_hat), c.n_bidders)};
    }
  } else {
    // Third-price and pay-your-bid play the no-reserve mechanism (revenue
    // equivalent); its analytic values are reported for comparison.
    const auto t1 = SelectRegime(c.dist, c.n_bidders, 0.0, c.tie_seed);
    report["regime"] = std::string(RegimeName(t1.regime));
    report["diagnostics"] = ToJson(t1);
    if (c.analytic) analytic = ExpectedRevenueAnalytic(t1);
  }
  report["analytic"] = analytic ? ToJson(*analytic) : Json(nullptr);
  report["monte_carlo"] = nullptr;
  if (c.replications > 0) {
    manifest.SetSeed(c.seed);
    const auto mc = McEvaluate(Scenario{format, c.replications, c.seed, c.threads});
    report["monte_carlo"] = ToJson(mc);
  }
  OutputSet out;
  out.Add("report.json", report.dump(2) + "\n");
  out.Commit(opt.out, manifest.Finish());
  std::cout << "format " << FormatName(c.format);
  if (!report["regime"].is_null()) {
    std::cout << ", regime " << report["regime"].get<std::string>();
  }
  std::cout << "\n";
  if (analytic) {
    std::cout << "analytic: seller1 " << Fmt(analytic->seller1) << ", seller2 "
              << Fmt(analytic->seller2) << ", alloc " << Fmt(analytic->alloc_prob)
              << "\n";
  }
  if (!report["monte_carlo"].is_null()) {
    const Json& mc = report["monte_carlo"];
    std::cout << "monte carlo: seller1 " << Fmt(mc["seller1"]["mean"].get<double>())
              << ", seller2 " << Fmt(mc["seller2"]["mean"].get<double>()) << ", alloc "
              << Fmt(mc["alloc_prob"]["mean"].get<double>()) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// audit

int CmdAudit(const Options& opt) {
  Manifest manifest("audit", opt);
  ScenarioConfig c = LoadScenario(opt);
  if (opt.mc) {
    c.audit_reps = *opt.mc;
    c.raw["audit_reps"] = *opt.mc;
  }
  if (opt.tolerance) {
    c.threshold = *opt.tolerance;
    c.raw["threshold"] = *opt.tolerance;
  }
  if (c.format != FormatKind::kDirect) {
    throw UnsupportedError("audit runs on the direct mechanism only");
  }
  if (c.grid_density < 20) {
    std::cerr << "warning: grid_density " << c.grid_density
              << " is below the recommended 20\n";
  }
  const MechanismConfig cfg = BuildMechanism(c);
  manifest.SetSeed(c.seed);
  const auto ic = IcAudit(cfg, c.grid_density, c.audit_reps, c.seed, c.threads);
  const auto q_grid = c.convexity_q.empty() ? Linspace(c.dist.lower(), c.dist.upper(), 5)
                                            : c.convexity_q;
  const auto cvx = ConvexityAudit(cfg, q_grid, std::max(c.grid_density, 3), c.audit_reps,
                                  HashCombine(c.seed, 1), c.threads);
  const bool passed = ic.max_regret <= c.threshold;
  Json report;
  report["scenario"] = c.raw;
  report["mechanism"] = ToJson(cfg);
  report["threshold"] = c.threshold;
  report["passed"] = passed;
  report["ic"] = ToJson(ic);
  report["convexity"] = ToJson(cvx);
  OutputSet out;
  out.Add("ic_audit.json", report.dump(2) + "\n");
  out.Commit(opt.out, manifest.Finish());

  std::cout << "regime " << RegimeName(cfg.regime) << ", max regret "
            << Fmt(ic.max_regret) << " (threshold " << Fmt(c.threshold) << ")\n";
  std::cout << "convexity " << (cvx.passed ? "ok" : "VIOLATED") << ", min slack "
            << Fmt(cvx.min_slack) << "\n";
  if (!cvx.passed) {
    std::cerr << "warning: convexity violated at q=" << Fmt(cvx.worst_q)
              << ", x=" << Fmt(cvx.worst_x) << "\n";
  }
  if (!passed) {
    std::cout << "FAIL worst pair: x=" << Fmt(ic.worst_x) << " q=" << Fmt(ic.worst_q)
              << " regret=" << Fmt(ic.max_regret) << " se=" << Fmt(ic.worst_se) << "\n";
    std::cout << "FAIL worst underreport pair (q<x): x=" << Fmt(ic.under_x)
              << " q=" << Fmt(ic.under_q) << " regret=" << Fmt(ic.max_under_regret)
              << " se=" << Fmt(ic.under_se) << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bid-curves

void RequireIncreasing(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& what) {
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (!(y[i] > y[i - 1])) {
      throw NumericFailure(what + " is not strictly increasing at x = " + Fmt(x[i]));
    }
  }
}

int CmdBidCurves(const Options& opt) {
  Manifest manifest("bid-curves", opt);
  ValueDistribution d = ValueDistribution::Uniform();
  int n = 3;
  std::optional<double> r1 = opt.r1;
  if (!opt.config.empty()) {
    const ScenarioConfig c = LoadScenario(opt);
    d = c.dist;
    n = c.n_bidders;
    if (!r1) r1 = c.r1;
    if (c.r > d.lower()) throw UnsupportedError("bid curves exist only for r = 0");
  }
  CheckRegular(d);
  const PayYourBidAuction pyb(d, n);
  const auto eq = r1 ? MakePoolingEquilibrium(d, *r1, n) : OptimizeR1(d, n);

  constexpr int kPoints = 120;
  std::vector<double> xs(kPoints + 1);
  for (int i = 0; i <= kPoints; ++i) {
    xs[i] = i == kPoints ? d.upper() : d.lower() + (d.upper() - d.lower()) * i / kPoints;
  }
  std::vector<double> beta, h;
  for (double x : xs) {
    beta.push_back(pyb.Bid(x));
    h.push_back(PybParticipation(d, n, x));
  }
  RequireIncreasing(xs, beta, "pay-your-bid bid");

  std::ostringstream bid_csv, h_csv, spa_csv, cut_csv;
  bid_csv << "x,bid\n";
  h_csv << "q,participation\n";
  spa_csv << "x,bid,action\n";
  std::vector<double> sep_x, sep_b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bid_csv << Fmt(xs[i]) << "," << Fmt(beta[i]) << "\n";
    h_csv << Fmt(xs[i]) << "," << Fmt(h[i]) << "\n";
    const auto b = eq.Bid(xs[i]);
    const char* action = !b ? "abstain" : xs[i] <= eq.x_hathat ? "pool" : "separate";
    spa_csv << Fmt(xs[i]) << "," << (b ? Fmt(*b) : "") << "," << action << "\n";
    if (b && xs[i] > eq.x_hathat) {
      sep_x.push_back(xs[i]);
      sep_b.push_back(*b);
    }
  }
  RequireIncreasing(sep_x, sep_b, "benchmark separating bid");
  cut_csv << "r1,x_hat,x_hathat,corner\n"
          << Fmt(eq.r1) << "," << Fmt(eq.x_hat) << "," << Fmt(eq.x_hathat) << ","
          << (eq.corner ? 1 : 0) << "\n";

  OutputSet out;
  out.Add("pyb_bid.csv", bid_csv.str());
  out.Add("pyb_participation.csv", h_csv.str());
  out.Add("spa_bid.csv", spa_csv.str());
  out.Add("pooling_cutoffs.csv", cut_csv.str());
  out.Commit(opt.out, manifest.Finish());
  std::cout << "pooling cutoffs at r1=" << Fmt(eq.r1) << ": " << Fmt(eq.x_hat) << ", "
            << Fmt(eq.x_hathat) << "\n";
  return kExitOk;
}

template <class Fn>
int Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << (e.pointer().empty() ? "/" : e.pointer()) << ": "
              << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential-auction mechanisms: revenue tables, simulation and audits"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "Override the seed");
    auto* cfg = sub->add_option("--config", opt.config, "Scenario JSON");
    if (needs_config) cfg->required();
  };
  auto* table1 = app.add_subcommand("table1", "Revenue table, uniform N=3, r=0");
  add_common(table1, false);
  table1->add_option("--mc", opt.mc, "Add Monte Carlo columns with this many draws")
      ->check(CLI::PositiveNumber);
  table1->add_option("--tolerance", opt.tolerance, "Max cell error (default 5e-3)");

  auto* run = app.add_subcommand("run", "Evaluate a scenario");
  add_common(run, true);
  run->add_option("--mc", opt.mc, "Override replications")->check(CLI::NonNegativeNumber);

  auto* audit = app.add_subcommand("audit", "Incentive and convexity audit");
  add_common(audit, true);
  audit->add_option("--mc", opt.mc, "Override audit draws")->check(CLI::PositiveNumber);
  audit->add_option("--tolerance", opt.tolerance, "Regret threshold (default 1e-3)");

  auto* curves = app.add_subcommand("bid-curves", "Bid and participation curves as CSV");
  add_common(curves, false);
  curves->add_option("--r1", opt.r1, "Benchmark reserve (default: optimal)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (table1->parsed()) return Guard([&] { return CmdTable1(opt); });
  if (run->parsed()) return Guard([&] { return CmdRun(opt); });
  if (audit->parsed()) return Guard([&] { return CmdAudit(opt); });
  return Guard([&] { return CmdBidCurves(opt); });
}
