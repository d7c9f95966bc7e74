#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "urllc/grant_scheduler.hpp"

using namespace urllc;

TEST_CASE("rbg_comb reference cases") {
  CHECK(rbg_comb(16, 4, 1).indices == std::vector<int>{1, 5, 9, 13});
  CHECK(rbg_comb(16, 1, 7).indices == std::vector<int>{7});
  CHECK(rbg_comb(16, 16, 3).indices.size() == 16);

  const auto three = rbg_comb(16, 3, 0);
  auto gaps = circular_gaps(three, 16);
  std::sort(gaps.begin(), gaps.end());
  CHECK(gaps == std::vector<int>{5, 5, 6});
}

TEST_CASE("rbg_comb output is sorted and wraps") {
  const auto sel = rbg_comb(16, 4, 14);
  CHECK(sel.indices == std::vector<int>{2, 6, 10, 14});
}

TEST_CASE("rbg_comb and select_slots reject bad input") {
  CHECK_THROWS_AS(rbg_comb(16, 0, 0), std::domain_error);
  CHECK_THROWS_AS(rbg_comb(16, 17, 0), std::domain_error);
  CHECK_THROWS_AS(rbg_comb(16, 4, 16), std::domain_error);
  CHECK_THROWS_AS(rbg_comb(16, 4, -1), std::domain_error);
  CHECK_THROWS_AS(select_slots(0, 14), std::domain_error);
  CHECK_THROWS_AS(select_slots(15, 14), std::domain_error);
}

TEST_CASE("select_slots reference cases") {
  CHECK(select_slots(4, 14).slots == std::vector<int>{0, 3, 7, 10});
  CHECK(select_slots(1, 14).slots == std::vector<int>{0});
  CHECK(select_slots(2, 14).slots == std::vector<int>{0, 7});
  CHECK(select_slots(14, 14).slots.back() == 13);
}

TEST_CASE("select_rbgs offsets are uniform") {
  Rng rng(11);
  std::map<int, int> first;
  const int n = 160000;
  for (int i = 0; i < n; ++i) ++first[select_rbgs(16, 1, rng).indices[0]];
  REQUIRE(first.size() == 16);
  for (const auto& [idx, count] : first) CHECK(std::abs(count - n / 16) < 0.05 * n / 16);
}

TEST_CASE("select_rbgs is deterministic per seed") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(select_rbgs(16, 5, a).indices == select_rbgs(16, 5, b).indices);
}
