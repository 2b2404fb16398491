#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "jobml/rng.hpp"

using jobml::Rng;

TEST_CASE("same seed reproduces the stream", "[rng]") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge", "[rng]") {
  Rng a(1), b(2);
  bool any_diff = false;
  for (int i = 0; i < 10; ++i) any_diff |= (a.next_u64() != b.next_u64());
  REQUIRE(any_diff);
}

TEST_CASE("uniform stays in [0, 1)", "[rng]") {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    const double x = r.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("bounded uniform stays in its interval", "[rng]") {
  Rng r(9);
  for (int i = 0; i < 10000; ++i) {
    const double x = r.uniform(-0.25, 0.25);
    REQUIRE(x >= -0.25);
    REQUIRE(x < 0.25);
  }
}

TEST_CASE("below covers the whole range and stays inside it", "[rng]") {
  Rng r(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = r.below(5);
    REQUIRE(x < 5);
    seen.insert(x);
  }
  REQUIRE(seen.size() == 5);
}

TEST_CASE("shuffle produces a permutation", "[rng]") {
  Rng r(13);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<int> shuffled = v;
  r.shuffle(shuffled);
  std::vector<int> sorted = shuffled;
  std::sort(sorted.begin(), sorted.end());
  REQUIRE(sorted == v);
}

TEST_CASE("shuffle is deterministic per seed", "[rng]") {
  std::vector<int> a{1, 2, 3, 4, 5}, b{1, 2, 3, 4, 5};
  Rng(99).shuffle(a);
  Rng(99).shuffle(b);
  REQUIRE(a == b);
}

TEST_CASE("sample_indices returns k distinct ascending indices", "[rng]") {
  Rng r(17);
  for (std::size_t n : {1u, 5u, 50u}) {
    for (std::size_t k = 0; k <= n; k += (n > 10 ? 7 : 1)) {
      const auto s = Rng(r.next_u64()).sample_indices(n, k);
      REQUIRE(s.size() == k);
      REQUIRE(std::is_sorted(s.begin(), s.end()));
      REQUIRE(std::adjacent_find(s.begin(), s.end()) == s.end());
      for (const std::size_t i : s) REQUIRE(i < n);
    }
  }
}

TEST_CASE("sample_indices rejects oversampling", "[rng]") {
  Rng r(1);
  REQUIRE_THROWS_AS(r.sample_indices(3, 4), jobml::ValidationError);
}

TEST_CASE("split yields a distinct but deterministic stream", "[rng]") {
  Rng parent1(5), parent2(5);
  Rng child1 = parent1.split();
  Rng child2 = parent2.split();
  REQUIRE(child1.next_u64() == child2.next_u64());
  Rng parent3(5);
  Rng child3 = parent3.split();
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= (child3.next_u64() != parent3.next_u64());
  REQUIRE(differs);
}
