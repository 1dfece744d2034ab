#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace recourse {

// One objective vector: aggregate recourse cost and recourse loss of a
// candidate (sub)tree over some instance subset. Loss counts instances that
// stay adversely classified, so it is integral; cost is a sum of percentile
// shifts. Comparisons are exact: every path that produces a CostLossPair
// accumulates in a fixed order (instance index within a leaf, then
// fail-child + pass-child up the tree), so equal trees produce equal bits.
struct CostLossPair {
  double cost = 0.0;
  std::int64_t loss = 0;

  friend bool operator==(const CostLossPair& a, const CostLossPair& b) {
    return a.cost == b.cost && a.loss == b.loss;
  }
  friend bool operator!=(const CostLossPair& a, const CostLossPair& b) { return !(a == b); }
};

// Strict Pareto dominance: no worse in both objectives, not identical.
inline bool dominates(const CostLossPair& a, const CostLossPair& b) {
  return a.cost <= b.cost && a.loss <= b.loss && !(a == b);
}

// Values of independent sibling subtrees add. Together with dominance this
// is order preserving: if a dominates b then combine(a, u) is componentwise
// <= combine(b, u), i.e. still at least weakly dominating (strictness can
// collapse to equality under float rounding, never reverse).
inline CostLossPair combine(const CostLossPair& a, const CostLossPair& b) {
  return {a.cost + b.cost, a.loss + b.loss};
}

template <typename Payload>
struct ArchiveEntry {
  CostLossPair value;
  Payload payload;
};

// Nondominated subset of `entries`: keeps exactly the entries whose value no
// other entry strictly dominates, collapsing equal values to the single
// entry whose payload is least under tie_less. Output is sorted by cost
// ascending (equivalently loss descending).
template <typename Payload, typename TieLess>
std::vector<ArchiveEntry<Payload>> nondominated(std::vector<ArchiveEntry<Payload>> entries,
                                                TieLess tie_less) {
  std::sort(entries.begin(), entries.end(),
            [&](const ArchiveEntry<Payload>& a, const ArchiveEntry<Payload>& b) {
              if (a.value.cost != b.value.cost) return a.value.cost < b.value.cost;
              if (a.value.loss != b.value.loss) return a.value.loss < b.value.loss;
              return tie_less(a.payload, b.payload);
            });
  std::vector<ArchiveEntry<Payload>> out;
  std::int64_t best_loss = std::numeric_limits<std::int64_t>::max();
  for (auto& e : entries) {
    // Sorted by cost: e can only be dominated by (or tie with) earlier
    // entries, all of which have loss >= best_loss kept so far.
    if (e.value.loss < best_loss) {
      best_loss = e.value.loss;
      out.push_back(std::move(e));
    }
  }
  return out;
}

// merge of two archives under the combining operator: the nondominated set
// of all pairwise sums. compose(left_payload, right_payload) builds the
// payload of a combined entry.
template <typename OutPayload, typename P1, typename P2, typename Compose, typename TieLess>
std::vector<ArchiveEntry<OutPayload>> merge_archives(const std::vector<ArchiveEntry<P1>>& a,
                                                     const std::vector<ArchiveEntry<P2>>& b,
                                                     Compose compose, TieLess tie_less) {
  std::vector<ArchiveEntry<OutPayload>> crossed;
  crossed.reserve(a.size() * b.size());
  for (const auto& ea : a)
    for (const auto& eb : b)
      crossed.push_back({combine(ea.value, eb.value), compose(ea.payload, eb.payload)});
  return nondominated(std::move(crossed), tie_less);
}

// Incremental front builder for the solver's hot path. Loss is bounded by
// the instance count of the current subproblem, so candidates live in a
// dense min-cost-per-loss table; finish() runs the staircase sweep and
// yields exactly nondominated(everything offered). Payload construction is
// deferred until a slot actually improves, which keeps tree-node allocation
// off the rejected-candidate path.
template <typename Payload>
class FrontAccumulator {
 public:
  explicit FrontAccumulator(std::int64_t max_loss)
      : slots_(static_cast<std::size_t>(max_loss) + 1) {}

  std::int64_t max_loss() const { return static_cast<std::int64_t>(slots_.size()) - 1; }

  bool empty() const {
    for (const auto& s : slots_)
      if (s.occupied) return false;
    return true;
  }

  // make() -> Payload is called only when v lands in the archive (strict
  // improvement, or an exact value tie that tie_less must arbitrate).
  template <typename Make, typename TieLess>
  void offer(const CostLossPair& v, Make&& make, TieLess&& tie_less) {
    assert(v.loss >= 0 && v.loss <= max_loss());
    Slot& s = slots_[static_cast<std::size_t>(v.loss)];
    if (!s.occupied || v.cost < s.cost) {
      s.occupied = true;
      s.cost = v.cost;
      s.payload = make();
      return;
    }
    if (v.cost == s.cost) {
      Payload candidate = make();
      if (tie_less(candidate, s.payload)) s.payload = std::move(candidate);
    }
  }

  // True when some already-offered value strictly dominates v. Equality
  // alone never counts: a candidate tied with an archived value may still
  // win the payload tie rule, so it must not be pruned away.
  bool strictly_dominated(const CostLossPair& v) const {
    std::int64_t limit = std::min(v.loss, max_loss());
    for (std::int64_t l = 0; l <= limit; ++l) {
      const Slot& s = slots_[static_cast<std::size_t>(l)];
      if (!s.occupied) continue;
      if (s.cost < v.cost || (s.cost <= v.cost && l < v.loss)) return true;
    }
    return false;
  }

  // Staircase sweep; result sorted cost ascending, loss descending.
  std::vector<ArchiveEntry<Payload>> finish() && {
    std::vector<ArchiveEntry<Payload>> out;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::int64_t l = 0; l < static_cast<std::int64_t>(slots_.size()); ++l) {
      Slot& s = slots_[static_cast<std::size_t>(l)];
      if (!s.occupied) continue;
      // Entries at lower loss with cost <= s.cost dominate s.
      if (s.cost < best_cost) {
        best_cost = s.cost;
        out.push_back({{s.cost, l}, std::move(s.payload)});
      }
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  struct Slot {
    bool occupied = false;
    double cost = 0.0;
    Payload payload{};
  };
  std::vector<Slot> slots_;
};

}  // namespace recourse
