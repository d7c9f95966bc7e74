#include <cmath>
#include <vector>

#include "doctest.h"
#include "urllc/adaptive_selector.hpp"

using namespace urllc;

namespace {

AdaptiveSelector make_selector(double window, int k_max = 4) {
  SelectorParams p;
  p.window = window;
  p.k_max = k_max;
  return AdaptiveSelector(synthetic_bler_model(default_curve_params()), p, 16, 32);
}

std::vector<double> all(const AdaptiveSelector& s, double v) {
  return std::vector<double>(s.estimates().size(), v);
}

}  // namespace

TEST_CASE("ewma_update reference values") {
  CHECK(ewma_update(1e-3, 1e-2, 100.0) == doctest::Approx(1.09e-3).epsilon(1e-12));
  CHECK(ewma_update(0.0, 1.0, 4.0) == doctest::Approx(0.25));
  CHECK(ewma_update(0.3, 0.7, 1.0) == 0.7);
  CHECK(ewma_update(0.5, 0.5, 200.0) == 0.5);
  CHECK_THROWS_AS(ewma_update(0.0, 1.0, 0.5), std::domain_error);
}

TEST_CASE("initial configuration is the most robust one") {
  CHECK(initial_config(4) == TxConfig{0, 4});
  CHECK_THROWS_AS(initial_config(0), std::domain_error);
  auto s = make_selector(10.0);
  CHECK(s.current() == TxConfig{0, 4});
  CHECK(s.estimate({0, 4}).marking == Marking::valid);
  CHECK(s.estimate({3, 1}).marking == Marking::invalid);
  CHECK(s.estimate({0, 3}).cost == 24);
  CHECK(s.estimate({2, 2}).cost == 4);
  CHECK(s.estimate({7, 1}).cost == 1);
}

TEST_CASE("selector parameter validation") {
  SelectorParams p;
  p.plr_low = 1e-3;
  p.plr_high = 1e-4;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.window = 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.k_max = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  McsEntry tiny;
  tiny.bits_per_rbg = 1;
  tiny.curve = {{0.0, 0.5}};
  CHECK_THROWS_AS(AdaptiveSelector(BlerModel({tiny}), SelectorParams{}, 16, 32),
                  ConfigurationInfeasible);
}

TEST_CASE("nothing valid falls back to MCS 0 with K_max") {
  auto s = make_selector(1.0);
  s.observe(all(s, 0.5));
  CHECK(s.estimate({0, 4}).marking == Marking::invalid);
  const auto sel = s.select_config();
  CHECK(sel.config == TxConfig{0, 4});
  CHECK_FALSE(sel.reconfigured);
}

TEST_CASE("select_config picks the cheapest valid configuration") {
  auto s = make_selector(1.0);
  std::vector<double> x = all(s, 0.5);
  x[s.index_of({1, 2})] = 1e-6;  // cost 8
  x[s.index_of({2, 3})] = 1e-6;  // cost 6
  x[s.index_of({0, 1})] = 1e-6;  // cost 8
  s.observe(x);
  const auto sel = s.select_config();
  CHECK(sel.config == TxConfig{2, 3});
  CHECK(sel.reconfigured);
  CHECK(s.reconfiguration_count() == 1);
  CHECK_FALSE(s.select_config().reconfigured);
}

TEST_CASE("select_config tie-breaks: lower EWMA, then lower K, then lower MCS") {
  auto s = make_selector(1.0);
  std::vector<double> x = all(s, 0.5);
  x[s.index_of({4, 2})] = 5e-6;  // cost 2
  x[s.index_of({3, 2})] = 2e-6;  // cost 2
  s.observe(x);
  CHECK(s.select_config().config == TxConfig{3, 2});

  auto t = make_selector(1.0);
  x = all(t, 0.5);
  x[t.index_of({5, 1})] = 1e-6;
  x[t.index_of({4, 1})] = 1e-6;
  t.observe(x);
  CHECK(t.select_config().config == TxConfig{4, 1});

  auto u = make_selector(1.0);
  x = all(u, 0.5);
  x[u.index_of({2, 1})] = 1e-6;  // cost 2, K = 1
  x[u.index_of({3, 2})] = 1e-6;  // cost 2, K = 2
  u.observe(x);
  CHECK(u.select_config().config == TxConfig{2, 1});
}

TEST_CASE("selected cost is minimal among valid configurations") {
  auto s = make_selector(1.0);
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(s.estimates().size());
    for (auto& v : x) v = std::pow(10.0, -6.0 * uniform01(rng));
    s.observe(x);
    const auto chosen = s.select_config().config;
    int best = 1 << 30;
    bool any = false;
    for (const auto& e : s.estimates())
      if (e.feasible && e.marking == Marking::valid) {
        best = std::min(best, e.cost);
        any = true;
      }
    if (any) CHECK(s.estimate(chosen).cost == best);
  }
}

TEST_CASE("first SRS sample seeds the estimate") {
  auto s = make_selector(200.0);
  s.observe(all(s, 3e-5));
  CHECK(s.estimate({1, 1}).ewma_plr == 3e-5);
  CHECK(s.estimate({1, 1}).marking == Marking::valid);
  s.observe(all(s, 1.0));
  CHECK(s.estimate({1, 1}).ewma_plr == doctest::Approx(3e-5 + (1.0 - 3e-5) / 200.0));
}

TEST_CASE("update_on_srs: high SNR validates cheap configurations") {
  auto s = make_selector(1.0);
  Rng rng(1);
  const RbgSnrVector srs = RbgSnrVector::Constant(16, db_to_linear(40.0));
  s.update_on_srs(srs, rng);
  CHECK(s.estimate({7, 1}).marking == Marking::valid);
  const auto chosen = s.select_config().config;
  CHECK(chosen.k == 1);
  CHECK(s.estimate(chosen).cost == 1);

  const RbgSnrVector wrong = RbgSnrVector::Constant(8, 1.0);
  CHECK_THROWS_AS(s.update_on_srs(wrong, rng), std::domain_error);
}

TEST_CASE("PLR estimates are non-increasing in K for a fixed MCS") {
  auto s = make_selector(1.0);
  Rng rng(4);
  const RbgSnrVector srs = RbgSnrVector::LinSpaced(16, 0.2, 3.0);
  s.update_on_srs(srs, rng);
  for (int mcs = 0; mcs < 8; ++mcs)
    for (int k = 2; k <= 4; ++k)
      CHECK(s.estimate({mcs, k}).ewma_plr <= s.estimate({mcs, k - 1}).ewma_plr);
}
