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

#ifndef SEQAUCTION_CONFIG_HPP_
#define SEQAUCTION_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqauction/audit.hpp"
#include "seqauction/benchmark.hpp"
#include "seqauction/mechanism.hpp"
#include "seqauction/pay_your_bid.hpp"
#include "seqauction/revenue.hpp"
#include "seqauction/simulation.hpp"

namespace seqauction {

using Json = nlohmann::json;

// Schema violation; pointer() is the JSON pointer of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class FormatKind { kDirect, kThirdPrice, kPayYourBid, kBenchmarkSpa };

inline std::string_view FormatName(FormatKind f) {
  switch (f) {
    case FormatKind::kDirect: return "direct";
    case FormatKind::kThirdPrice: return "third-price";
    case FormatKind::kPayYourBid: return "pay-your-bid";
    case FormatKind::kBenchmarkSpa: return "benchmark-spa";
  }
  return "?";
}

struct ScenarioConfig {
  Json raw;
  ValueDistribution dist = ValueDistribution::Uniform();
  int n_bidders = 3;
  double r = 0.0;
  std::string regime = "auto";
  int units = 1;
  FormatKind format = FormatKind::kDirect;
  std::optional<double> r1;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  std::uint64_t tie_seed = 0;
  bool analytic = true;
  int threads = 0;
  // Audit settings.
  int grid_density = 50;
  std::int64_t audit_reps = 200000;
  double threshold = 1e-3;
  std::vector<double> convexity_q;  // empty: five evenly spaced reports
  bool misallocate_to_top = false;
};

namespace detail {

inline std::string Child(const std::string& ptr, const std::string& key) {
  return ptr + "/" + key;
}

inline const Json& Require(const Json& obj, const std::string& ptr,
                           const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(Child(ptr, key), "missing required key");
  return *it;
}

inline double GetNumber(const Json& v, const std::string& ptr) {
  if (!v.is_number()) throw ConfigError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(ptr, "expected a finite number");
  return x;
}

inline std::int64_t GetInteger(const Json& v, const std::string& ptr,
                               std::int64_t min) {
  if (!v.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  if (v.is_number_unsigned() &&
      v.get<std::uint64_t>() >
          static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ConfigError(ptr, "integer out of range");
  }
  const auto x = v.get<std::int64_t>();
  if (x < min) {
    throw ConfigError(ptr, "must be at least " + std::to_string(min));
  }
  return x;
}

inline std::uint64_t GetSeed(const Json& v, const std::string& ptr) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(ptr, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline std::vector<double> GetNumberArray(const Json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(GetNumber(v[i], ptr + "/" + std::to_string(i)));
  }
  return out;
}

inline void RejectUnknown(const Json& obj, const std::string& ptr,
                          const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(Child(ptr, it.key()), "unknown key");
  }
}

}  // namespace detail

// {family: "uniform", lower, upper} | {family: "power", exponent, lower, upper}
// | {family: "tabulated", grid: [...], cdf: [...]}
inline ValueDistribution ParseDistribution(const Json& j,
                                           const std::string& ptr = "/dist") {
  using detail::GetNumber;
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  const Json& fam = detail::Require(j, ptr, "family");
  if (!fam.is_string()) throw ConfigError(ptr + "/family", "expected a string");
  const std::string family = fam.get<std::string>();
  auto num_or = [&](const char* key, double def) {
    auto it = j.find(key);
    return it == j.end() ? def : GetNumber(*it, detail::Child(ptr, key));
  };
  try {
    if (family == "uniform") {
      detail::RejectUnknown(j, ptr, {"family", "lower", "upper"});
      return ValueDistribution::Uniform(num_or("lower", 0.0), num_or("upper", 1.0));
    }
    if (family == "power") {
      detail::RejectUnknown(j, ptr, {"family", "exponent", "lower", "upper"});
      const double k = GetNumber(detail::Require(j, ptr, "exponent"), ptr + "/exponent");
      return ValueDistribution::Power(k, num_or("lower", 0.0), num_or("upper", 1.0));
    }
    if (family == "tabulated") {
      detail::RejectUnknown(j, ptr, {"family", "grid", "cdf"});
      auto grid = detail::GetNumberArray(detail::Require(j, ptr, "grid"), ptr + "/grid");
      auto cdf = detail::GetNumberArray(detail::Require(j, ptr, "cdf"), ptr + "/cdf");
      return ValueDistribution::Tabulated(std::move(grid), std::move(cdf));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(ptr, e.what());
  }
  throw ConfigError(ptr + "/family", "unknown family '" + family + "'");
}

inline ScenarioConfig ParseScenario(const Json& j) {
  using detail::GetInteger;
  using detail::GetNumber;
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  detail::RejectUnknown(
      j, "",
      {"dist", "n_bidders", "r", "regime", "units", "format", "r1",
       "replications", "seed", "tie_seed", "analytic", "threads", "grid_density",
       "audit_reps", "threshold", "convexity_q", "misallocate_to_top"});
  ScenarioConfig c;
  c.raw = j;
  c.dist = ParseDistribution(detail::Require(j, "", "dist"));
  if (j.contains("n_bidders")) {
    c.n_bidders = static_cast<int>(GetInteger(j["n_bidders"], "/n_bidders", 3));
  }
  if (j.contains("r")) {
    c.r = GetNumber(j["r"], "/r");
    if (c.r < 0.0) throw ConfigError("/r", "must be non-negative");
  }
  if (j.contains("regime")) {
    if (!j["regime"].is_string()) throw ConfigError("/regime", "expected a string");
    c.regime = j["regime"].get<std::string>();
    if (c.regime != "auto" && !ParseRegime(c.regime)) {
      throw ConfigError("/regime", "unknown regime '" + c.regime + "'");
    }
  }
  if (j.contains("units")) c.units = static_cast<int>(GetInteger(j["units"], "/units", 1));
  if (c.units != 1 && c.regime != "multi_unit") {
    throw ConfigError("/units", "more than one unit needs regime multi_unit");
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw ConfigError("/format", "expected a string");
    const std::string f = j["format"].get<std::string>();
    bool found = false;
    for (FormatKind k : {FormatKind::kDirect, FormatKind::kThirdPrice,
                         FormatKind::kPayYourBid, FormatKind::kBenchmarkSpa}) {
      if (FormatName(k) == f) {
        c.format = k;
        found = true;
      }
    }
    if (!found) throw ConfigError("/format", "unknown format '" + f + "'");
  }
  if (j.contains("r1")) c.r1 = GetNumber(j["r1"], "/r1");
  if (j.contains("replications")) {
    c.replications = GetInteger(j["replications"], "/replications", 0);
  }
  if (j.contains("seed")) c.seed = detail::GetSeed(j["seed"], "/seed");
  if (j.contains("tie_seed")) c.tie_seed = detail::GetSeed(j["tie_seed"], "/tie_seed");
  if (j.contains("analytic")) {
    if (!j["analytic"].is_boolean()) throw ConfigError("/analytic", "expected a boolean");
    c.analytic = j["analytic"].get<bool>();
  }
  if (j.contains("threads")) c.threads = static_cast<int>(GetInteger(j["threads"], "/threads", 0));
  if (j.contains("grid_density")) {
    c.grid_density = static_cast<int>(GetInteger(j["grid_density"], "/grid_density", 2));
  }
  if (j.contains("audit_reps")) c.audit_reps = GetInteger(j["audit_reps"], "/audit_reps", 2);
  if (j.contains("threshold")) c.threshold = GetNumber(j["threshold"], "/threshold");
  if (j.contains("convexity_q")) {
    c.convexity_q = detail::GetNumberArray(j["convexity_q"], "/convexity_q");
    for (std::size_t i = 0; i < c.convexity_q.size(); ++i) {
      if (!c.dist.InSupport(c.convexity_q[i])) {
        throw ConfigError("/convexity_q/" + std::to_string(i), "outside the support");
      }
    }
  }
  if (j.contains("misallocate_to_top")) {
    if (!j["misallocate_to_top"].is_boolean()) {
      throw ConfigError("/misallocate_to_top", "expected a boolean");
    }
    c.misallocate_to_top = j["misallocate_to_top"].get<bool>();
  }
  return c;
}

// Direct mechanism for the scenario. Throws UnsupportedError when the
// requested regime does not apply to (r, N, units).
inline MechanismConfig BuildMechanism(const ScenarioConfig& c) {
  MechanismConfig cfg;
  if (c.regime == "auto") {
    cfg = SelectRegime(c.dist, c.n_bidders, c.r, c.tie_seed);
  } else {
    cfg = MakeConfig(c.dist, c.n_bidders, c.r, *ParseRegime(c.regime), c.units,
                     c.tie_seed);
  }
  cfg.misallocate_to_top = c.misallocate_to_top;
  return cfg;
}

// Simulation format for the scenario. The indirect formats exist only
// without a second-stage reserve.
inline Format BuildFormat(const ScenarioConfig& c) {
  if (c.format != FormatKind::kDirect) {
    if (c.r > c.dist.lower()) {
      throw UnsupportedError(std::string(FormatName(c.format)) +
                             " is implemented only for r = 0");
    }
    if (c.regime != "auto" || c.misallocate_to_top) {
      throw UnsupportedError("regime and misallocate_to_top apply to the direct format only");
    }
    CheckRegular(c.dist);
  }
  switch (c.format) {
    case FormatKind::kDirect:
      return DirectFormat{BuildMechanism(c)};
    case FormatKind::kThirdPrice:
      return ThirdPriceFormat{c.dist, c.n_bidders};
    case FormatKind::kPayYourBid:
      return PayYourBidFormat{
          std::make_shared<const PayYourBidAuction>(c.dist, c.n_bidders)};
    case FormatKind::kBenchmarkSpa:
      return BenchmarkFormat{c.r1 ? MakePoolingEquilibrium(c.dist, *c.r1, c.n_bidders)
                                  : OptimizeR1(c.dist, c.n_bidders)};
  }
  throw std::logic_error("unreachable format");
}

inline Json ToJson(const Statistic& s) {
  Json j;
  j["mean"] = s.mean;
  j["std_error"] = s.se_defined ? Json(s.std_error) : Json(nullptr);
  j["se_defined"] = s.se_defined;
  return j;
}

inline Json ToJson(const RevenueReport& r) {
  Json j;
  j["seller1"] = ToJson(r.seller1);
  j["seller2"] = ToJson(r.seller2);
  j["alloc_prob"] = ToJson(r.alloc_prob);
  if (r.participation) j["participation"] = ToJson(*r.participation);
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  return j;
}

inline Json ToJson(const RevenueSummary& r) {
  return Json{{"seller1", r.seller1}, {"seller2", r.seller2}, {"alloc_prob", r.alloc_prob}};
}

inline Json ToJson(const MechanismConfig& cfg) {
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  Json j;
  j["regime"] = std::string(RegimeName(cfg.regime));
  j["r"] = cfg.r;
  j["n_bidders"] = cfg.n_bidders;
  j["units"] = cfg.units;
  j["z_at_r"] = num(cfg.z_at_r);
  j["psi_inv_zero"] = num(cfg.constants.psi_inv_zero);
  j["a_of_r"] = num(cfg.constants.a_of_r);
  j["a_of_lower"] = num(cfg.constants.lower_alloc_bound);
  if (cfg.misallocate_to_top) j["misallocate_to_top"] = true;
  return j;
}

inline Json ToJson(const PoolingEquilibrium& eq) {
  return Json{{"r1", eq.r1},
              {"x_hat", eq.x_hat},
              {"x_hathat", eq.x_hathat},
              {"corner", eq.corner}};
}

inline Json ToJson(const IcAuditReport& r) {
  Json j;
  j["grid"] = r.grid;
  j["regret"] = r.regret;
  j["std_error"] = r.std_error;
  j["max_regret"] = r.max_regret;
  j["worst_pair"] = Json{{"x", r.worst_x}, {"q", r.worst_q}, {"std_error", r.worst_se}};
  j["max_underreport_regret"] = r.max_under_regret;
  j["worst_underreport_pair"] =
      Json{{"x", r.under_x}, {"q", r.under_q}, {"std_error", r.under_se}};
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  return j;
}

inline Json ToJson(const ConvexityReport& r) {
  return Json{{"passed", r.passed},
              {"min_slack", r.min_slack},
              {"worst_q", r.worst_q},
              {"worst_x", r.worst_x},
              {"worst_second_difference", r.worst_second_diff},
              {"worst_std_error", r.worst_se}};
}

}  // namespace seqauction

#endif  // SEQAUCTION_CONFIG_HPP_
