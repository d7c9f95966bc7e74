#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "urllc/experiment.hpp"

using namespace urllc;

TEST_CASE("SNR distribution weights of a uniform disc") {
  // slope 20 dB/decade, edge -4 dB: P(SNR >= s) = 10^(-(s + 4) / 10)
  const std::vector<double> grid{-4.0, 0.0, 4.0};
  const auto w = snr_distribution_weights(grid, -4.0, 20.0);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(0.36904265551980675).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.37976870132923524).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(0.251188643150958).epsilon(1e-12));
  CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0));

  const std::vector<double> below{-8.0, -4.0, 4.0};
  const auto wb = snr_distribution_weights(below, -4.0, 20.0);
  CHECK(wb[0] == 0.0);
  CHECK(wb[1] + wb[2] == doctest::Approx(1.0));
}

TEST_CASE("results CSV: header, row order and nan") {
  std::vector<ResultRow> rows{
      {"wideband_snr", 2.0, 7, 0.0, 4.0, 0.1, "optimal"},
      {"wideband_snr", -2.0, 9, 1e-3, std::nan(""), 0.0, "mcs0"},
      {"wideband_snr", 2.0, 3, 0.0, 4.5, 0.2, "adaptive"},
      {"window", 500.0, 1, 0.0, 3.0, 0.5, "adaptive"},
  };
  std::ostringstream a, b;
  write_results_csv(a, rows);
  std::reverse(rows.begin(), rows.end());
  write_results_csv(b, rows);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kResultsHeader);
  std::getline(in, line);
  CHECK(line == "wideband_snr,-2,9,0.001,nan,0,mcs0");
  std::getline(in, line);
  CHECK(line.ends_with(",adaptive"));
  std::getline(in, line);
  CHECK(line.ends_with(",optimal"));
  std::getline(in, line);
  CHECK(line.starts_with("window,500,"));
}

TEST_CASE("point_seed separates points and replicates") {
  CHECK(point_seed(1, 0.0, 0) == point_seed(1, 0.0, 0));
  CHECK(point_seed(1, 0.0, 0) != point_seed(1, 0.0, 1));
  CHECK(point_seed(1, 0.0, 0) != point_seed(1, 2.0, 0));
  CHECK(point_seed(1, 0.0, 0) != point_seed(2, 0.0, 0));
}

TEST_CASE("parallel_for visits every index once and forwards errors") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("optimal_search agrees with the flat-channel analytic optimum") {
  ScenarioConfig sc;
  sc.fading = false;
  sc.duration_s = 200.0;  // 2e4 packets per configuration
  const BlerModel model = make_bler_model(sc);
  const double target = 1e-2;
  int checked = 0;

  for (double snr_db : {-6.0, -3.0, 0.0, 5.0}) {
    // Analytic PLR of {mcs, K} on a flat channel: every RBG after power
    // reallocation sees snr * M / M_MCS, CC after i attempts multiplies it by i.
    int best_cost = 1 << 30;
    bool margin_ok = true;
    for (const auto& c : feasible_configs(sc, model)) {
      const int m = required_rbgs(model, c.mcs, sc.packet_size_bytes, sc.rbg_count);
      const double s = db_to_linear(snr_db) * sc.rbg_count / m;
      double plr = 1.0;
      for (int i = 1; i <= c.k; ++i) plr *= bler_lookup(model, c.mcs, i * s);
      if (plr > target / 3 && plr < target * 3) margin_ok = false;
      if (plr <= target) best_cost = std::min(best_cost, m * c.k);
    }
    if (!margin_ok) continue;  // too close to the target for 2e4 packets

    const std::vector<std::uint64_t> seeds{11, 12};
    const auto r = optimal_search(sc, model, snr_db, target, seeds, 2);
    CAPTURE(snr_db);
    REQUIRE(r.best.has_value());
    CHECK(r.best->cost == best_cost);
    CHECK(r.best->packets == 2 * 20000);
    CHECK(r.per_config.size() == 32);
    ++checked;
  }
  CHECK(checked >= 2);
}

TEST_CASE("min_k_for_mcs picks the cheapest passing K") {
  OptimalSearchResult r;
  r.per_config = {{{0, 1}, 8, 100, 50, 0.5},
                  {{0, 2}, 16, 100, 0, 0.0},
                  {{0, 3}, 24, 100, 0, 0.0},
                  {{1, 1}, 4, 100, 0, 0.0}};
  const auto c = min_k_for_mcs(r, 0, 1e-3);
  REQUIRE(c.has_value());
  CHECK(c->config == TxConfig{0, 2});
  CHECK_FALSE(min_k_for_mcs(r, 2, 1e-3).has_value());
}
