#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ccran/content.hpp"
#include "doctest.h"

using namespace ccran;

TEST_CASE("zipf pmf") {
  CHECK(zipf_pmf(1, 1.0) == std::vector<double>{1.0});
  const auto two = zipf_pmf(2, 1.0);
  CHECK(two[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(two[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto three = zipf_pmf(3, 1.0);
  CHECK(std::abs(three[0] - 6.0 / 11.0) < 1e-12);
  CHECK(std::abs(three[1] - 3.0 / 11.0) < 1e-12);
  CHECK(std::abs(three[2] - 2.0 / 11.0) < 1e-12);
  for (double skew : {0.3, 1.0, 2.5}) {
    const auto p = zipf_pmf(50, skew);
    double total = 0.0;
    for (std::size_t f = 0; f < p.size(); ++f) {
      total += p[f];
      if (f) CHECK(p[f] <= p[f - 1]);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("popularity-aware cache") {
  const auto catalog = Catalog::zipf(3, 1.0);
  const std::vector<int> one{2};
  const auto c = popularity_aware_cache(catalog, one);
  CHECK(c.cached(0, 0));
  CHECK(c.cached(0, 1));
  CHECK_FALSE(c.cached(0, 2));

  const auto big = Catalog::zipf(20, 1.0);
  const std::vector<int> budgets{0, 4, 4};
  const auto d = popularity_aware_cache(big, budgets);
  CHECK(d.row_count(0) == 0);
  for (int f = 0; f < 20; ++f) CHECK(d.cached(1, f) == d.cached(2, f));
  CHECK(d.row_count(1) == 4);
}

TEST_CASE("budgets must stay below the catalog size") {
  CHECK_THROWS_AS(CachePlacement(1, 5, {5}), std::invalid_argument);
  CHECK_THROWS_AS(CachePlacement(1, 5, {-1}), std::invalid_argument);
  CachePlacement c(1, 5, {1});
  c.set(0, 0, true);
  c.set(0, 1, true);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("random cache") {
  const auto catalog = Catalog::zipf(10, 1.0);
  const std::vector<int> budgets{3, 9, 0};
  const auto c = random_cache(catalog, budgets, 4);
  CHECK(c.row_count(0) == 3);
  CHECK(c.row_count(1) == 9);
  CHECK(c.row_count(2) == 0);
  CHECK(c == random_cache(catalog, budgets, 4));

  // Each content equally likely under F_l = 1.
  std::vector<int> hits(10, 0);
  const std::vector<int> single{1};
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const auto r = random_cache(catalog, single, s);
    for (int f = 0; f < 10; ++f) hits[f] += r.cached(0, f);
  }
  for (int f = 0; f < 10; ++f) CHECK(std::abs(hits[f] / double(seeds) - 0.1) <= 0.01);
}

TEST_CASE("cache file round trip") {
  const auto c = random_cache(Catalog::zipf(7, 1.0), std::vector<int>{2, 3}, 8);
  std::stringstream io;
  write_cache(io, c);
  const auto back = read_cache(io);
  for (int l = 0; l < 2; ++l) {
    for (int f = 0; f < 7; ++f) CHECK(back.cached(l, f) == c.cached(l, f));
  }
  std::istringstream bad("1 3\n0 2 1\n");
  CHECK_THROWS(read_cache(bad));
}

TEST_CASE("round-robin schedule") {
  auto range = [](int a, int n) {
    std::vector<int> v;
    for (int i = 0; i < n; ++i) v.push_back(a + i);
    return v;
  };
  CHECK(round_robin_schedule(140, 14, 0) == range(0, 14));
  CHECK(round_robin_schedule(140, 14, 10) == range(0, 14));
  CHECK(round_robin_schedule(140, 14, 1) == range(14, 14));
  const auto wrap = round_robin_schedule(10, 4, 2);
  CHECK(wrap == std::vector<int>{8, 9, 0, 1});
}

TEST_CASE("request draws") {
  const auto catalog = Catalog::zipf(100, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto req = draw_requests(14, 0.5, catalog, seed);
    std::map<int, int> count;
    for (int f : req) ++count[f];
    int most = 0;
    for (const auto& [f, n] : count) most = std::max(most, n);
    CHECK(most >= 7);
  }
  const auto all = draw_requests(9, 1.0, catalog, 3);
  CHECK(std::set<int>(all.begin(), all.end()).size() == 1);
  const auto single = draw_requests(5, 0.0, Catalog::zipf(1, 1.0), 3);
  CHECK(single == std::vector<int>(5, 0));
  const auto popular = draw_requests(6, 0.5, catalog, 3, CommonContent::kMostPopular);
  CHECK(std::count(popular.begin(), popular.end(), 0) >= 3);
  CHECK(draw_requests(14, 0.5, catalog, 11) == draw_requests(14, 0.5, catalog, 11));
}

TEST_CASE("group formation") {
  const double gamma = 10.0;
  const auto g = form_groups(std::vector<int>{4, 4, 7}, gamma);
  REQUIRE(g.size() == 2);
  std::multiset<std::size_t> sizes{g.groups[0].users.size(), g.groups[1].users.size()};
  CHECK(sizes == std::multiset<std::size_t>{1, 2});
  for (const auto& m : g.groups) CHECK(m.rate == doctest::Approx(3.4594).epsilon(1e-4));
  CHECK(g.groups[0].rate == std::log2(11.0));

  const auto distinct = form_groups(std::vector<int>{1, 2, 3, 4}, gamma);
  CHECK(distinct.size() == 4);

  const auto uni = form_unicast_groups(std::vector<int>{4, 4, 7}, gamma);
  CHECK(uni.size() == 3);
  uni.validate(false);
  CHECK_THROWS(uni.validate(true));
}

TEST_CASE("groups partition the users") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + trial % 15;
    std::vector<int> req(K);
    for (int& r : req) r = std::uniform_int_distribution<int>(0, 5)(rng);
    const auto g = form_groups(req, 10.0);
    g.validate(true);
    std::vector<int> seen(K, 0);
    for (const auto& m : g.groups) {
      for (int k : m.users) {
        ++seen[k];
        CHECK(req[k] == m.content);
      }
    }
    for (int s : seen) CHECK(s == 1);
    CHECK(g.num_users() == K);
  }
}

TEST_CASE("coupling weights") {
  const auto groups = form_groups(std::vector<int>{0, 0, 3}, 10.0);
  CachePlacement cache(2, 5, {1, 1});
  cache.set(0, 0, true);
  cache.set(1, 3, true);
  const auto alpha = coupling_weights(cache, groups);
  REQUIRE(alpha.rows() == 2);
  REQUIRE(alpha.cols() == 2);
  const double R = std::log2(11.0);
  CHECK(alpha(0, 0) == 0.0);
  CHECK(alpha(1, 0) == R);
  CHECK(alpha(0, 1) == R);
  CHECK(alpha(1, 1) == 0.0);

  const auto none = coupling_weights(empty_cache(2, 5), groups);
  CHECK((none.array() == R).all());
  CHECK(R == doctest::Approx(3.4594).epsilon(1e-4));

  CachePlacement full(2, 5, {4, 4});
  for (int l = 0; l < 2; ++l) {
    for (int f : {0, 3}) full.set(l, f, true);
  }
  CHECK((coupling_weights(full, groups).array() == 0.0).all());
}
