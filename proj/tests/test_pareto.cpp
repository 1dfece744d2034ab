#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "recourse/pareto.hpp"
#include "recourse/rng.hpp"

using recourse::ArchiveEntry;
using recourse::combine;
using recourse::CostLossPair;
using recourse::dominates;
using recourse::FrontAccumulator;
using recourse::nondominated;
using recourse::SplitMix64;

namespace {

bool int_less(const int& a, const int& b) { return a < b; }

std::vector<ArchiveEntry<int>> random_entries(SplitMix64& rng, std::size_t max_size,
                                              std::int64_t max_loss) {
  std::vector<ArchiveEntry<int>> out;
  std::size_t k = rng.below(max_size + 1);
  for (std::size_t i = 0; i < k; ++i) {
    // Dyadic grid costs so exact ties occur often.
    double c = static_cast<double>(rng.below(6)) * 0.25;
    std::int64_t l = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_loss) + 1));
    out.push_back({{c, l}, static_cast<int>(rng.below(100))});
  }
  return out;
}

// Reference implementation: quadratic scan, ties collapsed by payload order.
std::vector<ArchiveEntry<int>> nondominated_oracle(const std::vector<ArchiveEntry<int>>& in) {
  std::vector<ArchiveEntry<int>> out;
  for (const auto& e : in) {
    bool keep = true;
    for (const auto& o : in)
      if (dominates(o.value, e.value)) {
        keep = false;
        break;
      }
    if (!keep) continue;
    bool duplicate = false;
    for (auto& prev : out)
      if (prev.value == e.value) {
        duplicate = true;
        if (e.payload < prev.payload) prev.payload = e.payload;
        break;
      }
    if (!duplicate) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const ArchiveEntry<int>& a, const ArchiveEntry<int>& b) {
    return a.value.cost < b.value.cost;
  });
  return out;
}

bool same(const std::vector<ArchiveEntry<int>>& a, const std::vector<ArchiveEntry<int>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].value != b[i].value || a[i].payload != b[i].payload) return false;
  return true;
}

}  // namespace

TEST_CASE("dominance is strict and irreflexive") {
  CostLossPair a{1.0, 3};
  CHECK_FALSE(dominates(a, a));
  CHECK(dominates({1.0, 2}, a));
  CHECK(dominates({0.5, 3}, a));
  CHECK(dominates({0.5, 2}, a));
  CHECK_FALSE(dominates({0.5, 4}, a));   // better cost, worse loss
  CHECK_FALSE(dominates({2.0, 1}, a));   // worse cost, better loss
  CHECK_FALSE(dominates(a, {1.0, 3}));   // equality never dominates
}

TEST_CASE("combine adds componentwise and has the zero identity") {
  CostLossPair z{0.0, 0};
  CostLossPair v{0.75, 4};
  CHECK(combine(v, z) == v);
  CHECK(combine(z, v) == v);
  CHECK(combine({0.25, 1}, {0.5, 3}) == CostLossPair{0.75, 4});
  SplitMix64 rng(11);
  for (int i = 0; i < 200; ++i) {
    CostLossPair a{rng.unit(), static_cast<std::int64_t>(rng.below(50))};
    CostLossPair b{rng.unit(), static_cast<std::int64_t>(rng.below(50))};
    CHECK(combine(a, b) == combine(b, a));
  }
}

TEST_CASE("combine preserves dominance at least weakly") {
  SplitMix64 rng(12);
  for (int i = 0; i < 500; ++i) {
    CostLossPair b{rng.unit(), static_cast<std::int64_t>(rng.below(40))};
    CostLossPair a{b.cost * rng.unit(), b.loss - static_cast<std::int64_t>(rng.below(3))};
    if (!dominates(a, b)) continue;
    CostLossPair u{rng.unit() * 10.0, static_cast<std::int64_t>(rng.below(40))};
    CostLossPair ca = combine(a, u);
    CostLossPair cb = combine(b, u);
    CHECK(ca.cost <= cb.cost);
    CHECK(ca.loss <= cb.loss);
  }
}

TEST_CASE("nondominated matches the quadratic oracle") {
  SplitMix64 rng(13);
  for (int rep = 0; rep < 500; ++rep) {
    auto in = random_entries(rng, 30, 8);
    auto got = nondominated(in, int_less);
    auto want = nondominated_oracle(in);
    REQUIRE(same(got, want));
  }
}

TEST_CASE("nondominated is idempotent and a staircase") {
  SplitMix64 rng(14);
  for (int rep = 0; rep < 200; ++rep) {
    auto in = random_entries(rng, 30, 8);
    auto once = nondominated(in, int_less);
    auto twice = nondominated(once, int_less);
    REQUIRE(same(once, twice));
    for (std::size_t i = 1; i < once.size(); ++i) {
      CHECK(once[i - 1].value.cost < once[i].value.cost);
      CHECK(once[i - 1].value.loss > once[i].value.loss);
    }
  }
}

TEST_CASE("FrontAccumulator agrees with nondominated, tie winners included") {
  SplitMix64 rng(15);
  for (int rep = 0; rep < 300; ++rep) {
    auto in = random_entries(rng, 40, 10);
    FrontAccumulator<int> acc(10);
    for (const auto& e : in)
      acc.offer(e.value, [&] { return e.payload; }, int_less);
    auto got = std::move(acc).finish();
    auto want = nondominated(in, int_less);
    REQUIRE(same(got, want));
  }
}

TEST_CASE("FrontAccumulator::strictly_dominated never rejects a front value") {
  SplitMix64 rng(16);
  for (int rep = 0; rep < 200; ++rep) {
    auto in = random_entries(rng, 25, 8);
    FrontAccumulator<int> acc(8);
    for (const auto& e : in)
      acc.offer(e.value, [&] { return e.payload; }, int_less);
    auto front = nondominated(in, int_less);
    for (const auto& e : front) CHECK_FALSE(acc.strictly_dominated(e.value));
    // A value strictly worse than an archived one must be flagged.
    if (!front.empty()) {
      CostLossPair worse{front[0].value.cost + 1.0, front[0].value.loss + 1};
      CHECK(acc.strictly_dominated(worse));
    }
  }
}

TEST_CASE("merge_archives equals the filtered cross product") {
  SplitMix64 rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    auto a = nondominated(random_entries(rng, 10, 5), int_less);
    auto b = nondominated(random_entries(rng, 10, 5), int_less);
    auto got = recourse::merge_archives<int>(
        a, b, [](int x, int y) { return x * 1000 + y; }, int_less);
    std::vector<ArchiveEntry<int>> crossed;
    for (const auto& ea : a)
      for (const auto& eb : b)
        crossed.push_back({combine(ea.value, eb.value), ea.payload * 1000 + eb.payload});
    auto want = nondominated_oracle(crossed);
    REQUIRE(same(got, want));
  }
}
