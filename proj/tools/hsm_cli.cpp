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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hsm/hsm.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed, int jobs, bool summary) {
  auto cfg = hsm::ExperimentConfig::load(config_path);
  if (out_dir) cfg.out_dir = *out_dir;
  if (seed) cfg.seed = *seed;

  const auto result = hsm::run_experiment(cfg, jobs);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const auto results_path = fs::path(cfg.out_dir) / (cfg.name + "_results.csv");
  const auto details_path = fs::path(cfg.out_dir) / (cfg.name + "_details.csv");
  {
    std::ofstream os(results_path);
    hsm::write_csv(result, os);
  }
  {
    std::ofstream os(details_path);
    hsm::write_details_csv(result, os);
  }
  std::cout << "wrote " << results_path.string() << " and " << details_path.string() << "\n";

  if (summary) {
    std::cout << "beta, unreg_so, reg_so, eff_so, unreg_welfare, reg_welfare, eff_welfare\n";
    for (const auto& p : hsm::summarize(result))
      std::cout << p.beta << ", " << p.unregulated_so << ", " << p.regulated_so << ", "
                << p.efficient_so << ", " << p.unregulated_welfare << ", " << p.regulated_welfare
                << ", " << p.efficient_welfare << "\n";
  }
  return 0;
}

int cmd_appendix() {
  const auto rows = hsm::run_appendix_regression();
  bool ok = true;
  std::cout << "scenario              expected    got       status\n";
  for (const auto& r : rows) {
    std::printf("%-20s  [%d, %d]     [%d, %d]    %s\n", r.scenario.c_str(), r.expected_po,
                r.expected_so, r.got_po, r.got_so, r.pass ? "pass" : "FAIL");
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

hsm::MarketInstance random_instance(std::uint64_t seed, double beta) {
  hsm::Rng rng(seed);
  const int K = 1 + static_cast<int>(rng() % 6);
  const int M = 1 + static_cast<int>(rng() % 3);
  const int N = 1 + static_cast<int>(rng() % 3);
  std::vector<double> po(M);
  for (double& p : po) p = hsm::draw_closed(rng, 0.05, 1.95);
  std::vector<std::vector<double>> so(M, std::vector<double>(N, 0.0));
  for (auto& row : so)
    for (double& a : row) a = hsm::draw_closed(rng, 0.01, 1.99);
  return hsm::MarketInstance::make(K, po, so, hsm::ValuationProfile::reciprocal(3.0),
                                   hsm::ValuationProfile::reciprocal(1.0),
                                   hsm::TypeDistribution::uniform(2.0), 2.0, beta);
}

int cmd_oracle_suite(std::uint64_t seed) {
  using hsm::oracle::ObjectiveKind;
  int failures = 0;
  for (int s = 0; s < 200; ++s) {
    const double beta = (s % 5) * 0.25;
    const auto m = random_instance(seed + s, beta);

    hsm::Allocation stage1 = hsm::Allocation::empty(m.po_count(), m.so_count());
    stage1.k_c = hsm::co_efficient_allocate(m.po_types, m.po_profile, m.channels);
    stage1.k_0 = stage1.k_c;
    if (hsm::oracle::evaluate_objective(ObjectiveKind::co_efficient, m, stage1) !=
        hsm::oracle::brute_force_allocate(ObjectiveKind::co_efficient, m).value)
      ++failures;

    const auto bal = hsm::co_balanced_allocate(m.po_types, m.so_types, m.po_profile, m.so_profile,
                                               m.so_dist, m.channels, beta);
    if (hsm::oracle::evaluate_objective(ObjectiveKind::co_balanced, m, bal) !=
        hsm::oracle::brute_force_allocate(ObjectiveKind::co_balanced, m).value)
      ++failures;

    const auto eff = hsm::efficient_benchmark(m);
    if (hsm::oracle::evaluate_objective(ObjectiveKind::efficient_total, m, eff) !=
        hsm::oracle::brute_force_allocate(ObjectiveKind::efficient_total, m).value)
      ++failures;
  }
  std::cout << (failures == 0 ? "oracle-suite: all greedy solvers match brute force\n"
                              : "oracle-suite: MISMATCHES FOUND\n");
  return failures == 0 ? 0 : 1;
}

int cmd_ic_suite(std::uint64_t seed) {
  double worst_so = 0.0, worst_po = 0.0, worst_ir = 0.0;
  for (int s = 0; s < 100; ++s) {
    for (double beta : {0.0, 0.1, 0.2, 1.0}) {
      const auto m = random_instance(seed + 7000 + s, beta);
      const int kc = m.channels;
      for (int j = 0; j < m.po_count(); ++j)
        for (int i = 0; i < m.so_count(); ++i) {
          const auto sweep = hsm::oracle::deviation_sweep(
              [&](double b) { return hsm::so_payoff(m, j, i, b, beta, kc); }, m.so_types[j][i],
              0.0, m.so_dist.upper(), 100);
          worst_so = std::max(worst_so, sweep.max_regret);
          worst_ir = std::min(worst_ir, sweep.truthful_payoff);
        }
      for (int j = 0; j < m.po_count(); ++j) {
        const auto sweep = hsm::oracle::deviation_sweep(
            [&](double r) { return hsm::po_payoff(m, j, r, hsm::Scenario::regulated, beta); },
            m.po_types[j], 0.0, m.po_type_upper, 100);
        worst_po = std::max(worst_po, sweep.max_regret);
      }
    }
  }
  std::printf("ic-suite: worst SO regret %.3e, worst regulated PO regret %.3e, worst IR %.3e\n",
              worst_so, worst_po, worst_ir);
  return (worst_so <= 1e-9 && worst_po <= 1e-9 && worst_ir >= -1e-12) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical spectrum market simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t suite_seed = 1;
  int jobs = 1;
  bool summary = false;

  auto* run = app.add_subcommand("run", "run a sweep experiment from a JSON config");
  run->add_option("path", config_path, "config file path (positional)");
  run->add_option("--config", config_path, "config file path");
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed_override, "base RNG seed (overrides the config)");
  run->add_option("--jobs", jobs, "parallel workers for the runs");
  run->add_flag("--summary", summary, "print per-beta means to stdout");

  auto* appendix = app.add_subcommand("appendix", "verify the worked-example regression table");
  auto* oracle_suite =
      app.add_subcommand("oracle-suite", "greedy solvers vs exhaustive enumeration");
  oracle_suite->add_option("--seed", suite_seed, "base RNG seed");
  auto* ic_suite = app.add_subcommand("ic-suite", "incentive-compatibility deviation sweeps");
  ic_suite->add_option("--seed", suite_seed, "base RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (config_path.empty()) {
        std::cerr << "run: a config path is required\n";
        return 2;
      }
      return cmd_run(config_path, out_dir, seed_override, jobs, summary);
    }
    if (*appendix) return cmd_appendix();
    if (*oracle_suite) return cmd_oracle_suite(suite_seed);
    if (*ic_suite) return cmd_ic_suite(suite_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
