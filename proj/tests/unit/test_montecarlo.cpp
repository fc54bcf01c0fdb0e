#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hestonwlse/montecarlo.hpp"
#include "json.hpp"

using namespace hestonwlse;
using nlohmann::json;

namespace {

const HestonParams kBase{1.0, -2.0, 0.0, -0.5, -0.7};

McConfig small(std::size_t n, double t_end, unsigned threads) {
  McConfig cfg;
  cfg.n_paths = n;
  cfg.threads = threads;
  cfg.sim.t_end = t_end;
  cfg.sim.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("reports are identical for any thread count") {
  const auto r1 = run_consistency(kBase, 1.0, {2.0, 5.0}, small(16, 5.0, 1));
  const auto r4 = run_consistency(kBase, 1.0, {2.0, 5.0}, small(16, 5.0, 4));
  CHECK(report_to_json(r1) == report_to_json(r4));
  const auto m1 = run_mle_vs_wlse(kBase, 1.0, small(12, 5.0, 1));
  const auto m3 = run_mle_vs_wlse(kBase, 1.0, small(12, 5.0, 3));
  CHECK(report_to_json(m1) == report_to_json(m3));
}

TEST_CASE("consistency report layout") {
  std::size_t calls = 0;
  const auto r = run_consistency(kBase, 1.0, {1.0, 2.0, 4.0}, small(10, 4.0, 2),
                                 [&](std::size_t, std::size_t total) {
                                   ++calls;
                                   CHECK(total == 10);
                                 });
  CHECK(calls > 0);
  CHECK(r.kind == "consistency");
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[1].key == 2.0);
  for (const auto& rec : r.records) {
    CHECK(rec.seed == 17);
    REQUIRE(rec.coords.size() == 4);
    for (const auto& s : rec.coords) CHECK(s.n_success + s.n_failed == 10);
  }
  CHECK(r.samples.size() == 40);
  CHECK_FALSE(r.highlighted_path.empty());
  CHECK(r.highlighted_path.back().t == doctest::Approx(4.0));
  REQUIRE(r.sim.x0.has_value());
  CHECK(*r.sim.x0 == 0.5);

  CHECK_THROWS_AS(run_consistency(kBase, 1.0, {2.0, 1.0}, small(4, 2.0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_consistency(kBase, 1.0, {}, small(4, 2.0, 1)), std::invalid_argument);
}

TEST_CASE("MLE arms record zero hits as failures for a < 2") {
  const auto r = run_mle_vs_wlse(kBase, 1.0, small(20, 40.0, 0));
  REQUIRE(r.records.size() == 1);
  std::size_t mle_failed = 0;
  for (const auto& s : r.records[0].coords) {
    CHECK(s.n_success + s.n_failed == 20);
    if (s.coord == "a_mle") mle_failed = s.n_failed;
    if (s.coord == "a_wlse" || s.coord == "b_wlse_known_a") CHECK(s.n_failed == 0);
  }
  CHECK(mle_failed > 0);
  CHECK(r.summary.at("mle_zero_hit_fraction") == doctest::Approx(mle_failed / 20.0));
  CHECK(r.summary.at("wlse_success_fraction") == 1.0);
  CHECK(r.summary.at("zero_path_fraction") > 0.0);
  CHECK(r.failures.size() >= mle_failed);
  for (const auto& f : r.failures) CHECK(f.error.find("ZeroHit") != std::string::npos);
  // The known-b MLE of a fails on almost every path, leaving too few pairs.
  REQUIRE_FALSE(r.comparisons.empty());
  CHECK(r.comparisons[0].name == "var_b_wlse_ge_mle");
}

TEST_CASE("c sweep keeps one record per c on common paths") {
  const auto r = run_c_sweep(kBase, {0.01, 0.1, 1.0}, small(12, 10.0, 0));
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].key == 0.01);
  CHECK(r.records[2].key == 1.0);
  CHECK(r.summary.count("argmin_c_var_a") == 1);
  CHECK(r.summary.count("argmin_c_var_b") == 1);
  CHECK_THROWS_AS(run_c_sweep(kBase, {}, small(4, 2.0, 1)), std::invalid_argument);
}

TEST_CASE("CLT report carries histograms and correlations") {
  auto cfg = small(30, 10.0, 0);
  cfg.histogram_bins = 16;
  const auto r = run_clt(kBase, 1.0, cfg);
  REQUIRE(r.histograms.size() == 4);
  for (const auto& h : r.histograms) {
    CHECK(h.counts.size() == 16);
    CHECK(h.lo == -4.0);
    CHECK(h.hi == 4.0);
  }
  CHECK(r.summary.at("corr_expected") == kBase.rho);
  CHECK(std::abs(r.summary.at("corr_a_alpha")) <= 1.0);
  CHECK(r.summary.at("ks_critical_1pct") == doctest::Approx(1.63 / std::sqrt(30.0)));
}

TEST_CASE("JSON and CSV serialization") {
  const auto r = run_mle_vs_wlse(kBase, 1.0, small(8, 20.0, 1));
  const auto j = json::parse(report_to_json(r));
  CHECK(j["kind"] == "mle_vs_wlse");
  CHECK(j["params"]["rho"] == -0.7);
  CHECK(j["n_paths"] == 8);
  CHECK(j["sim"]["seed"] == 17);
  CHECK(j["records"][0]["coords"].size() == 8);
  CHECK(j["summary"].contains("mle_zero_hit_fraction"));

  McReport nan_report;
  nan_report.kind = "x";
  nan_report.c = NAN;
  const auto jn = json::parse(report_to_json(nan_report));
  CHECK(jn["c"].is_null());

  std::ostringstream summary, samples;
  write_summary_csv(summary, r);
  write_samples_csv(samples, r);
  std::istringstream s1(summary.str()), s2(samples.str());
  std::string line;
  std::getline(s1, line);
  CHECK(line == "horizon_or_c,coord,mean,var,var_se,ks_stat");
  std::size_t rows = 0;
  while (std::getline(s1, line)) ++rows;
  CHECK(rows == 8);
  std::getline(s2, line);
  CHECK(line == "path_index,coord,value");
}
