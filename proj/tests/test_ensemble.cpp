#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nsch/ensemble.hpp"
#include "nsch/errors.hpp"

using namespace nsch::ensemble;

namespace {

EnsembleConfig tiny(long paths = 8, long steps = 6) {
  EnsembleConfig cfg;
  cfg.dim = 1;
  cfg.modes = 16;
  cfg.params.m = 4;
  cfg.params.n = 6;
  cfg.params.dt = 1e-4;
  cfg.paths = paths;
  cfg.steps = steps;
  return cfg;
}

std::vector<double> gaussian(std::mt19937_64& eng, int n, double mean) {
  std::normal_distribution<double> d(mean, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = d(eng);
  return v;
}

}  // namespace

TEST_CASE("a single-path ensemble reproduces the single trajectory") {
  const auto cfg = tiny(1);
  const auto res = run_paths_serial(cfg);
  REQUIRE(res.size() == 1);
  REQUIRE_FALSE(res[0].failed);

  nsch::noise::RngStream rng(cfg.base_seed, 0);
  std::vector<nsch::diagnostics::LedgerRow> rows;
  const auto s0 = initial_state(cfg, 0);
  rows.push_back(nsch::diagnostics::ledger_initial(s0, cfg.params));
  const auto fin = run_trajectory(s0, cfg.params, rng, 0, cfg.steps,
                                  [&](long, const auto&, const auto&, const auto& row) { rows.push_back(row); });
  CHECK(rows == res[0].ledger);
  CHECK(fin == *res[0].final_state);
  CHECK(res[0].ledger.size() == static_cast<std::size_t>(cfg.steps + 1));
}

TEST_CASE("without noise all paths coincide and standard errors vanish") {
  auto cfg = tiny(8);
  cfg.params.noise.family = nsch::noise::SigmaFamily::Zero;
  const auto rep = aggregate(cfg, run_paths_serial(cfg));
  CHECK(rep.survivors == 8);
  for (const auto& s : rep.statistics) CHECK(s.summary.se == 0.0);
  REQUIRE(rep.martingale.size() == 4);
  for (const auto& m : rep.martingale) {
    CHECK(m.deterministic);
    CHECK(std::isnan(m.z));
    CHECK(m.se == 0.0);
  }
  const auto j = to_json(cfg, rep);
  CHECK(j["martingale"][0]["z"].is_null());
}

TEST_CASE("martingale test is calibrated on Gaussian residuals") {
  std::mt19937_64 eng(99);
  int inside = 0;
  const int experiments = 1000;
  for (int e = 0; e < experiments; ++e)
    if (martingale_test(gaussian(eng, 64, 0.0), true).pass) ++inside;
  CHECK(inside >= 990);
}

TEST_CASE("martingale test detects an injected unit mean") {
  std::mt19937_64 eng(100);
  int detected16 = 0, detected64 = 0;
  for (int e = 0; e < 200; ++e) {
    if (std::abs(martingale_test(gaussian(eng, 16, 1.0), true).z) > 3.0) ++detected16;
    if (std::abs(martingale_test(gaussian(eng, 64, 1.0), true).z) > 3.0) ++detected64;
  }
  CHECK(detected16 > 100);
  CHECK(detected64 == 200);
}

TEST_CASE("martingale test needs eight paths") {
  CHECK_THROWS(martingale_test(std::vector<double>(7, 0.0), true));
  const auto r = martingale_test(std::vector<double>(8, 0.0), true);
  CHECK(r.z == 0.0);
  CHECK(r.pass);
}

TEST_CASE("summary statistics") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
  CHECK(s.count == 4);
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("serial and parallel runs agree bitwise for any worker count") {
  const auto cfg = tiny(6);
  const auto ref = run_paths_serial(cfg);
  for (int threads : {1, 2, 3}) {
    const auto par = run_paths_parallel(cfg, threads);
    REQUIRE(par.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(par[i].index == ref[i].index);
      CHECK(par[i].ledger == ref[i].ledger);
      CHECK(*par[i].final_state == *ref[i].final_state);
    }
    CHECK(to_json(cfg, aggregate(cfg, par)) == to_json(cfg, aggregate(cfg, ref)));
  }
}

TEST_CASE("report is invariant under path reordering") {
  const auto cfg = tiny(8);
  auto res = run_paths_serial(cfg);
  const auto a = to_json(cfg, aggregate(cfg, res));
  std::reverse(res.begin(), res.end());
  std::swap(res[1], res[5]);
  CHECK(to_json(cfg, aggregate(cfg, res)) == a);
}

TEST_CASE("paths use distinct noise") {
  const auto cfg = tiny(2);
  const auto res = run_paths_serial(cfg);
  CHECK(res[0].ledger.back().stochastic_increment != res[1].ledger.back().stochastic_increment);
}

TEST_CASE("doubling the path count shrinks the standard error by sqrt 2") {
  auto cfg = tiny(256, 3);
  const auto small = aggregate(cfg, run_paths_serial(cfg));
  cfg.paths = 512;
  cfg.base_seed = 2;
  const auto large = aggregate(cfg, run_paths_serial(cfg));
  auto se = [](const EnsembleReport& r) {
    for (const auto& s : r.statistics)
      if (s.name == "sup_c_l2" && s.beta == 1) return s.summary.se;
    return 0.0;
  };
  CHECK(se(small) / se(large) == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("failed paths are recorded and an all-failed ensemble is an error") {
  const auto cfg = tiny(2);
  auto res = run_paths_serial(cfg);
  res[1].failed = true;
  res[1].failure_kind = "PositivityLoss";
  res[1].failure_time = 0.5;
  const auto rep = aggregate(cfg, res);
  CHECK(rep.survivors == 1);
  CHECK(rep.survivor_fraction() == 0.5);
  CHECK(rep.failures.at("PositivityLoss") == 1);
  REQUIRE(rep.failure_times.size() == 1);
  CHECK(rep.failure_times[0] == std::pair<long, double>{1, 0.5});
  CHECK(rep.martingale.empty());
  res[0].failed = true;
  res[0].failure_kind = "GramFailure";
  CHECK_THROWS_AS(aggregate(cfg, res), nsch::EnsembleFailure);
}

TEST_CASE("report JSON carries the schema version") {
  const auto cfg = tiny(8);
  const auto j = to_json(cfg, aggregate(cfg, run_paths_serial(cfg)));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["paths"] == 8);
  CHECK(j["statistics"].size() == 10);
  CHECK(j["martingale"].size() == 4);
  CHECK(j["martingale"][0]["z"].is_number());
}

TEST_CASE("moment bound stays within ten times its initial value") {
  const auto cfg = tiny(8, 20);
  const auto rep = aggregate(cfg, run_paths_serial(cfg));
  CHECK(rep.max_bound_ratio >= 1.0);
  CHECK(rep.max_bound_ratio < 10.0);
}

TEST_CASE("sweep over R with small data gives identical cells") {
  const auto cfg = tiny(2, 4);
  const auto cells = sweep(cfg, SweepParameter::R, {10.0, 20.0});
  REQUIRE(cells.size() == 2);
  CHECK(cells[1].l2_diff_prev == 0.0);
  CHECK(to_json(cfg, cells[0].report) == to_json(cfg, cells[1].report));
}

TEST_CASE("dt sweep keeps the horizon") {
  auto cfg = tiny(1, 4);
  cfg.paths = 1;
  const auto cells = sweep(cfg, SweepParameter::Dt, {1e-4, 5e-5});
  CHECK(cells[0].report.martingale.empty());
  const auto csv = trend_table_csv(SweepParameter::Dt, cells);
  CHECK(csv.rfind("dt,paths,survivors,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(cells[1].l2_diff_prev > 0.0);
  CHECK(cells[1].l2_diff_prev < 1e-2);
}

TEST_CASE("sweep parameter names") {
  for (const char* n : {"eps", "m", "n", "R", "dt"}) CHECK(to_string(parse_sweep_parameter(n)) == n);
  CHECK_THROWS(parse_sweep_parameter("gamma"));
}

TEST_CASE("validation of ensemble configs") {
  auto cfg = tiny();
  CHECK(validate(cfg).empty());
  cfg.paths = 0;
  cfg.params.alpha_exp = 3.0;
  const auto v = validate(cfg);
  CHECK(v.size() == 2);
}
