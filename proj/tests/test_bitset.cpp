#include <doctest.h>

#include <vector>

#include "recourse/bitset.hpp"
#include "recourse/rng.hpp"

using recourse::Bitset;

TEST_CASE("bitset basics across the word boundary") {
  Bitset b(130);
  CHECK(b.size() == 130);
  CHECK(b.count() == 0);
  CHECK_FALSE(b.any());
  b.set(0);
  b.set(63);
  b.set(64);
  b.set(129);
  CHECK(b.count() == 4);
  CHECK(b.test(63));
  CHECK(b.test(64));
  CHECK_FALSE(b.test(65));
  b.reset(63);
  CHECK_FALSE(b.test(63));
  CHECK(b.count() == 3);
}

TEST_CASE("full() sets exactly size() bits, padding stays zero") {
  for (std::size_t n : {1u, 63u, 64u, 65u, 128u, 130u}) {
    Bitset f = Bitset::full(n);
    CHECK(f.count() == n);
    // A later and_not against empty must not resurrect padding bits.
    Bitset empty(n);
    CHECK(f.and_not(empty).count() == n);
    CHECK(f.and_with(f).count() == n);
  }
}

TEST_CASE("set algebra agrees with per-bit reference") {
  recourse::SplitMix64 rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t n = 1 + rng.below(200);
    Bitset a(n), b(n);
    std::vector<bool> ra(n, false), rb(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.chance(0.5)) { a.set(i); ra[i] = true; }
      if (rng.chance(0.5)) { b.set(i); rb[i] = true; }
    }
    Bitset band = a.and_with(b);
    Bitset bnot = a.and_not(b);
    std::size_t want_and = 0, want_not = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ra[i] && rb[i]) ++want_and;
      if (ra[i] && !rb[i]) ++want_not;
      CHECK(band.test(i) == (ra[i] && rb[i]));
      CHECK(bnot.test(i) == (ra[i] && !rb[i]));
    }
    CHECK(band.count() == want_and);
    CHECK(bnot.count() == want_not);
    CHECK(a.count_and(b) == want_and);
  }
}

TEST_CASE("for_each and to_indices visit set bits ascending") {
  Bitset b(100);
  b.set(3);
  b.set(64);
  b.set(99);
  std::vector<std::size_t> seen;
  b.for_each([&](std::size_t i) { seen.push_back(i); });
  CHECK(seen == std::vector<std::size_t>{3, 64, 99});
  CHECK(b.to_indices() == std::vector<std::uint32_t>{3, 64, 99});
}

TEST_CASE("equality and hash distinguish size and content") {
  Bitset a(70), b(70), c(71);
  a.set(5);
  b.set(5);
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK_FALSE(a == c);
  b.set(6);
  CHECK_FALSE(a == b);
}
