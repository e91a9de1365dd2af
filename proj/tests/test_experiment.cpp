#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hsm/experiment.hpp"

using namespace hsm;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.name = "tiny";
  cfg.channels = 10;
  cfg.pos = 2;
  cfg.sos_per_po = 3;
  cfg.po_profile = ValuationProfile::reciprocal(1.0);
  cfg.so_profile = ValuationProfile::reciprocal(0.1);
  cfg.po_type_low = 5.0;
  cfg.po_type_high = 6.0;
  cfg.so_type_max = 4.0;
  cfg.betas = {0.0, 0.2};
  cfg.runs = 5;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("configs load from JSON and reject malformed fields by name") {
  const auto j = nlohmann::json::parse(R"({
    "name": "sec6",
    "channels": 80,
    "pos": 2,
    "sos_per_po": 10,
    "po_profile": {"family": "reciprocal", "scale": 1.0},
    "so_profile": {"family": "reciprocal", "scale": 0.1},
    "po_type_range": [5.0, 6.0],
    "so_type_max": 4.0,
    "betas": [0.0, 0.1],
    "runs": 40,
    "seed": 1
  })");
  const auto cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.channels == 80);
  CHECK(cfg.so_profile.scale() == 0.1);
  CHECK(cfg.betas.size() == 2);

  auto bad = j;
  bad.erase("channels");
  CHECK_THROWS_WITH(ExperimentConfig::from_json(bad),
                    Catch::Matchers::ContainsSubstring("channels"));

  bad = j;
  bad["runs"] = 0;
  CHECK_THROWS_WITH(ExperimentConfig::from_json(bad),
                    Catch::Matchers::ContainsSubstring("runs"));

  bad = j;
  bad["po_profile"] = {{"family", "nonsense"}};
  CHECK_THROWS_WITH(ExperimentConfig::from_json(bad),
                    Catch::Matchers::ContainsSubstring("po_profile"));

  bad = j;
  bad["po_type_range"] = {6.0};
  CHECK_THROWS_WITH(ExperimentConfig::from_json(bad),
                    Catch::Matchers::ContainsSubstring("po_type_range"));
}

TEST_CASE("the same config and seed produce byte-identical output") {
  const auto cfg = tiny_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  std::ostringstream csv_a, csv_b, det_a, det_b;
  write_csv(a, csv_a);
  write_csv(b, csv_b);
  write_details_csv(a, det_a);
  write_details_csv(b, det_b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(det_a.str() == det_b.str());
}

TEST_CASE("parallel execution does not change the output") {
  const auto cfg = tiny_config();
  std::ostringstream serial, parallel;
  write_csv(run_experiment(cfg, 1), serial);
  write_csv(run_experiment(cfg, 4), parallel);
  CHECK(serial.str() == parallel.str());
}

TEST_CASE("emitted welfare is recomputable from the emitted types and allocations") {
  const auto cfg = tiny_config();
  const auto res = run_experiment(cfg);
  REQUIRE(res.rows.size() == res.details.size());
  for (std::size_t r = 0; r < res.rows.size(); ++r) {
    const auto& row = res.rows[r];
    const auto& det = res.details[r];
    const auto m = MarketInstance::make(cfg.channels, det.po_types, det.so_types, cfg.po_profile,
                                        cfg.so_profile, TypeDistribution::uniform(cfg.so_type_max),
                                        cfg.po_type_high, row.beta);
    CHECK(row.welfare == Catch::Approx(aggregate_valuation(m, det.allocation)).margin(1e-9));
    CHECK(row.po_channels == det.allocation.total_po());
    CHECK(row.so_channels == det.allocation.total_so());
  }
}

TEST_CASE("csv header is the documented fixed one") {
  ExperimentResult res;
  std::ostringstream os;
  write_csv(res, os);
  CHECK(os.str() ==
        "scenario,beta,run,seed,po_channels,so_channels,welfare,welfare_efficient,"
        "revenue_total,payments_total\n");
}

TEST_CASE("summaries average per beta and scenario") {
  const auto cfg = tiny_config();
  const auto res = run_experiment(cfg);
  const auto sum = summarize(res);
  REQUIRE(sum.size() == cfg.betas.size());
  for (const auto& p : sum) {
    CHECK(p.efficient_so >= p.unregulated_so);  // the benchmark favors SOs here
    CHECK(p.unregulated_welfare > 0.0);
  }
  // beta = 0 regulated and unregulated coincide on most draws; both columns
  // must at least be populated
  CHECK(sum[0].regulated_so >= 0.0);
}

TEST_CASE("appendix regression table is all green") {
  const auto rows = run_appendix_regression();
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CAPTURE(r.scenario, r.expected_po, r.expected_so, r.got_po, r.got_so);
    CHECK(r.pass);
  }
}
