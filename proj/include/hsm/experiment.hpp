#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The hsm authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hsm/auction.hpp"
#include "hsm/market.hpp"
#include "hsm/mechanism.hpp"
#include "hsm/rng.hpp"

namespace hsm {

/// Sweep configuration, normally loaded from a JSON document.
struct ExperimentConfig {
  std::string name = "experiment";
  int channels = 80;
  int pos = 2;
  int sos_per_po = 10;
  ValuationProfile po_profile = ValuationProfile::reciprocal(1.0);
  ValuationProfile so_profile = ValuationProfile::reciprocal(0.1);
  double po_type_low = 5.0;
  double po_type_high = 6.0;
  double so_type_max = 4.0;
  std::vector<double> betas = {0.0};
  int runs = 40;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  void validate() const {
    if (channels < 1) throw std::invalid_argument("config field 'channels' must be >= 1");
    if (pos < 1) throw std::invalid_argument("config field 'pos' must be >= 1");
    if (sos_per_po < 0) throw std::invalid_argument("config field 'sos_per_po' must be >= 0");
    if (runs < 1) throw std::invalid_argument("config field 'runs' must be >= 1");
    if (betas.empty()) throw std::invalid_argument("config field 'betas' must not be empty");
    for (double b : betas)
      if (b < 0.0) throw std::invalid_argument("config field 'betas' must be >= 0");
    if (!(po_type_low > 0.0) || !(po_type_high >= po_type_low))
      throw std::invalid_argument("config field 'po_type_range' must satisfy 0 < low <= high");
    if (!(so_type_max > 0.0))
      throw std::invalid_argument("config field 'so_type_max' must be > 0");
  }

  static ValuationProfile profile_from_json(const nlohmann::json& j, const std::string& field) {
    const std::string family = j.value("family", "");
    if (family == "reciprocal") {
      if (!j.contains("scale"))
        throw std::invalid_argument("config field '" + field + ".scale' missing");
      return ValuationProfile::reciprocal(j.at("scale").get<double>());
    }
    if (family == "custom-table") {
      if (!j.contains("coeffs"))
        throw std::invalid_argument("config field '" + field + ".coeffs' missing");
      return ValuationProfile::custom_table(j.at("coeffs").get<std::vector<double>>());
    }
    throw std::invalid_argument("config field '" + field +
                                ".family' must be 'reciprocal' or 'custom-table'");
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    auto require = [&](const char* field) -> const nlohmann::json& {
      if (!j.contains(field))
        throw std::invalid_argument(std::string("config field '") + field + "' missing");
      return j.at(field);
    };
    try {
      c.name = j.value("name", c.name);
      c.channels = require("channels").get<int>();
      c.pos = require("pos").get<int>();
      c.sos_per_po = require("sos_per_po").get<int>();
      c.po_profile = profile_from_json(require("po_profile"), "po_profile");
      c.so_profile = profile_from_json(require("so_profile"), "so_profile");
      const auto range = require("po_type_range").get<std::vector<double>>();
      if (range.size() != 2)
        throw std::invalid_argument("config field 'po_type_range' must be [low, high]");
      c.po_type_low = range[0];
      c.po_type_high = range[1];
      c.so_type_max = require("so_type_max").get<double>();
      c.betas = require("betas").get<std::vector<double>>();
      c.runs = require("runs").get<int>();
      c.seed = j.value("seed", c.seed);
      c.out_dir = j.value("out", c.out_dir);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    return from_json(j);
  }
};

struct SweepRow {
  std::string scenario;
  double beta = 0.0;
  int run = 0;
  std::uint64_t seed = 0;  // per-run sub-seed
  int po_channels = 0;
  int so_channels = 0;
  double welfare = 0.0;            // aggregate raw valuation of this allocation
  double welfare_efficient = 0.0;  // efficient benchmark on the same draw
  double revenue_total = 0.0;
  double payments_total = 0.0;
};

/// Per-run detail needed to recompute every welfare figure offline.
struct RunDetail {
  std::string scenario;
  double beta = 0.0;
  int run = 0;
  std::vector<double> po_types;
  std::vector<std::vector<double>> so_types;
  Allocation allocation;
};

struct ExperimentResult {
  std::vector<SweepRow> rows;
  std::vector<RunDetail> details;
};

namespace detail {

/// Types drawn once per run index and reused across every beta point and
/// scenario (common random numbers). Sub-seed = splitmix64 chain on
/// (seed, run).
struct RunDraw {
  std::uint64_t seed = 0;
  std::vector<double> po_types;
  std::vector<std::vector<double>> so_types;
};

inline RunDraw draw_run(const ExperimentConfig& cfg, int run) {
  RunDraw d;
  d.seed = sub_seed(cfg.seed, static_cast<std::uint64_t>(run));
  Rng rng(d.seed);
  d.po_types.resize(cfg.pos);
  for (double& p : d.po_types) p = draw_closed(rng, cfg.po_type_low, cfg.po_type_high);
  d.so_types.assign(cfg.pos, std::vector<double>(cfg.sos_per_po, 0.0));
  const auto dist = TypeDistribution::uniform(cfg.so_type_max);
  for (auto& row : d.so_types)
    for (double& a : row) a = dist.sample(rng);
  return d;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
  cfg.validate();
  if (jobs < 1) jobs = 1;

  struct RunOutput {
    std::vector<SweepRow> rows;
    std::vector<RunDetail> details;
  };
  std::vector<RunOutput> outputs(cfg.runs);

  auto work = [&](int run) {
    const auto draw = detail::draw_run(cfg, run);
    auto& out = outputs[run];
    for (double beta : cfg.betas) {
      const auto m = MarketInstance::make(cfg.channels, draw.po_types, draw.so_types,
                                          cfg.po_profile, cfg.so_profile,
                                          TypeDistribution::uniform(cfg.so_type_max),
                                          cfg.po_type_high, beta);
      const auto eff = efficient_benchmark(m);
      const double eff_welfare = aggregate_valuation(m, eff);

      const auto unreg = run_unregulated(m, /*aware=*/false);
      const auto reg = run_regulated(m, MechanismConfig{beta, std::nullopt,
                                                        Scenario::regulated});
      auto emit = [&](const std::string& scenario, const Allocation& alloc, double revenue,
                      double payments) {
        SweepRow r;
        r.scenario = scenario;
        r.beta = beta;
        r.run = run;
        r.seed = draw.seed;
        r.po_channels = alloc.total_po();
        r.so_channels = alloc.total_so();
        r.welfare = aggregate_valuation(m, alloc);
        r.welfare_efficient = eff_welfare;
        r.revenue_total = revenue;
        r.payments_total = payments;
        out.rows.push_back(std::move(r));
        out.details.push_back({scenario, beta, run, draw.po_types, draw.so_types, alloc});
      };
      double unreg_rev = 0.0, unreg_pay = 0.0, reg_rev = 0.0, reg_pay = 0.0;
      for (double h : unreg.revenue) unreg_rev += h;
      for (double q : unreg.stage1_payments) unreg_pay += q;
      for (double h : reg.revenue) reg_rev += h;
      for (double l : reg.net_payments) reg_pay += l;
      emit("unregulated", unreg.allocation, unreg_rev, unreg_pay);
      emit("regulated", reg.allocation, reg_rev, reg_pay);
      emit("efficient", eff, 0.0, 0.0);
    }
  };

  if (jobs == 1) {
    for (int run = 0; run < cfg.runs; ++run) work(run);
  } else {
    std::vector<std::thread> pool;
    std::size_t stride = static_cast<std::size_t>(jobs);
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        for (int run = t; run < cfg.runs; run += static_cast<int>(stride)) work(run);
      });
    for (auto& th : pool) th.join();
  }

  ExperimentResult res;
  for (auto& out : outputs) {
    res.rows.insert(res.rows.end(), out.rows.begin(), out.rows.end());
    res.details.insert(res.details.end(), out.details.begin(), out.details.end());
  }
  return res;
}

inline void write_csv(const ExperimentResult& res, std::ostream& os) {
  os << "scenario,beta,run,seed,po_channels,so_channels,welfare,welfare_efficient,"
        "revenue_total,payments_total\n";
  os << std::setprecision(17);
  for (const auto& r : res.rows)
    os << r.scenario << ',' << r.beta << ',' << r.run << ',' << r.seed << ',' << r.po_channels
       << ',' << r.so_channels << ',' << r.welfare << ',' << r.welfare_efficient << ','
       << r.revenue_total << ',' << r.payments_total << '\n';
}

inline void write_details_csv(const ExperimentResult& res, std::ostream& os) {
  os << "scenario,beta,run,po_types,so_types,k_c,k_0,k_s\n";
  os << std::setprecision(17);
  auto join = [](const auto& v, char sep) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) ss << (i ? std::string(1, sep) : "") << v[i];
    return ss.str();
  };
  for (const auto& d : res.details) {
    os << d.scenario << ',' << d.beta << ',' << d.run << ',' << join(d.po_types, ';') << ',';
    for (std::size_t j = 0; j < d.so_types.size(); ++j)
      os << (j ? "|" : "") << join(d.so_types[j], ';');
    os << ',' << join(d.allocation.k_c, ';') << ',' << join(d.allocation.k_0, ';') << ',';
    for (std::size_t j = 0; j < d.allocation.k_s.size(); ++j)
      os << (j ? "|" : "") << join(d.allocation.k_s[j], ';');
    os << '\n';
  }
}

struct SummaryPoint {
  double beta = 0.0;
  double unregulated_so = 0.0;
  double regulated_so = 0.0;
  double efficient_so = 0.0;
  double unregulated_welfare = 0.0;
  double regulated_welfare = 0.0;
  double efficient_welfare = 0.0;
};

inline std::vector<SummaryPoint> summarize(const ExperimentResult& res) {
  std::map<double, SummaryPoint> acc;
  std::map<double, int> counts;
  for (const auto& r : res.rows) {
    auto& p = acc[r.beta];
    p.beta = r.beta;
    if (r.scenario == "unregulated") {
      p.unregulated_so += r.so_channels;
      p.unregulated_welfare += r.welfare;
      ++counts[r.beta];
    } else if (r.scenario == "regulated") {
      p.regulated_so += r.so_channels;
      p.regulated_welfare += r.welfare;
    } else {
      p.efficient_so += r.so_channels;
      p.efficient_welfare += r.welfare;
    }
  }
  std::vector<SummaryPoint> out;
  for (auto& [beta, p] : acc) {
    const double n = counts[beta];
    p.unregulated_so /= n;
    p.regulated_so /= n;
    p.efficient_so /= n;
    p.unregulated_welfare /= n;
    p.regulated_welfare /= n;
    p.efficient_welfare /= n;
    out.push_back(p);
  }
  return out;
}

/// The fixed worked example: 12 channels, two POs (types 1 and 1.2, values
/// 3p/k), two SOs each (1.2, 1.5 | 1.3, 1.4; values a/k, types uniform on
/// (0,2]), and the four pipeline outcomes it pins down.
struct AppendixRow {
  std::string scenario;
  int expected_po = 0, expected_so = 0;
  int got_po = 0, got_so = 0;
  bool pass = false;
};

inline MarketInstance appendix_instance(double beta) {
  return MarketInstance::make(12, {1.0, 1.2}, {{1.2, 1.5}, {1.3, 1.4}},
                              ValuationProfile::reciprocal(3.0), ValuationProfile::reciprocal(1.0),
                              TypeDistribution::uniform(2.0), /*po_type_upper=*/2.0, beta);
}

inline std::vector<AppendixRow> run_appendix_regression() {
  std::vector<AppendixRow> rows;
  auto check = [&](const std::string& name, const Allocation& alloc, int epo, int eso) {
    AppendixRow r{name, epo, eso, alloc.total_po(), alloc.total_so(), false};
    r.pass = r.got_po == epo && r.got_so == eso;
    rows.push_back(r);
  };

  const auto m0 = appendix_instance(0.0);
  check("unregulated", run_unregulated(m0, false).allocation, 10, 2);

  const auto kc = co_efficient_allocate(m0.po_types, m0.po_profile, m0.channels);
  check("socially-aware", socially_aware_allocate(m0, kc), 8, 4);

  check("efficient", efficient_benchmark(m0), 7, 5);

  const auto m2 = appendix_instance(0.2);
  check("regulated beta=0.2",
        run_regulated(m2, MechanismConfig{0.2, std::nullopt, Scenario::regulated}).allocation, 9,
        3);
  return rows;
}

}  // namespace hsm
