#include "recourse/solver.hpp"

#include <chrono>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include "recourse/errors.hpp"

namespace recourse {

void SolverConfig::validate() const {
  if (max_depth < 0 || max_depth > 20) throw ConfigError("solver: max_depth must be in [0, 20]");
  if (max_nodes < -1) throw ConfigError("solver: max_nodes must be >= 0 (or -1 for unbounded)");
  if (min_leaf < 1) throw ConfigError("solver: min_leaf must be >= 1");
  if (timeout_seconds < 0) throw ConfigError("solver: timeout must be >= 0");
  if (threads < 1) throw ConfigError("solver: threads must be >= 1");
}

namespace {

using Archive = std::vector<ArchiveEntry<TreePtr>>;
using ArchivePtr = std::shared_ptr<const Archive>;
using Clock = std::chrono::steady_clock;

struct MemoKey {
  Bitset bits;
  int depth;
  int nodes;

  friend bool operator==(const MemoKey& a, const MemoKey& b) {
    return a.depth == b.depth && a.nodes == b.nodes && a.bits == b.bits;
  }
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const {
    std::size_t h = k.bits.hash();
    h ^= static_cast<std::size_t>(k.depth) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::size_t>(k.nodes) * 0xc2b2ae3d27d4eb4fULL;
    return h;
  }
};

int clamp_nodes(int nodes, int depth) {
  // 2^depth - 1 branch nodes fill a depth-`depth` tree completely.
  long long cap = (1LL << depth) - 1;
  if (nodes < 0 || nodes > cap) return static_cast<int>(cap);
  return nodes;
}

class Solver {
 public:
  Solver(const CacheMatrix& cache, const BinarizedView& view, const SolverConfig& cfg,
         ThreadPool& pool)
      : cache_(cache), view_(view), cfg_(cfg), pool_(pool) {
    n_ = cache.n_instances();
    // Per-instance loss minima power the relaxation bound. Cost minima are
    // kept for completeness; with the null action in the set they are zero.
    row_min_cost_.resize(n_);
    row_min_loss_.assign(n_, 1);
    for (std::size_t i = 0; i < n_; ++i) {
      double mc = cache.cost(i, 0);
      for (std::size_t a = 1; a < cache.n_actions(); ++a) mc = std::min(mc, cache.cost(i, a));
      row_min_cost_[i] = mc;
    }
    // min loss is 0 exactly when some action flips the instance.
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t a = 0; a < cache_.n_actions(); ++a)
        if (!cache_.loss_column(a).test(i)) {
          row_min_loss_[i] = 0;
          break;
        }
    }
  }

  SolveResult run() {
    auto t0 = Clock::now();
    if (cfg_.timeout_seconds > 0)
      deadline_ = t0 + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(cfg_.timeout_seconds));

    SolveResult result;
    if (n_ < static_cast<std::size_t>(cfg_.min_leaf)) {
      result.status = SolveStatus::infeasible;
      result.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      return result;
    }

    Bitset all = Bitset::full(n_);
    bool complete = true;
    ArchivePtr arch = recurse(all, n_, cfg_.max_depth, clamp_nodes(cfg_.max_nodes, cfg_.max_depth),
                              complete);
    result.front.reserve(arch->size());
    for (const auto& e : *arch) result.front.push_back({e.value, e.payload});
    result.status = complete ? SolveStatus::complete : SolveStatus::timed_out;
    result.stats = stats_;
    result.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
  }

 private:
  bool expired() const { return deadline_ != Clock::time_point{} && Clock::now() >= deadline_; }

  // One shared leaf node per action: archives reference it instead of
  // allocating a fresh node per entry, which matters once the memo holds
  // hundreds of thousands of leaf archives.
  const TreePtr& leaf_node(std::uint32_t action) {
    if (leaf_nodes_.empty()) leaf_nodes_.resize(cache_.n_actions());
    TreePtr& n = leaf_nodes_[action];
    if (!n) n = TreeNode::leaf(action);
    return n;
  }

  // The leaf-only subproblem (depth 0). Always runs to completion: it is
  // the unit of work the deadline never interrupts.
  ArchivePtr leaf_archive(const Bitset& bits) {
    MemoKey key{bits, 0, 0};
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
    ++stats_.subproblems;
    std::vector<std::uint32_t> subset = bits.to_indices();
    auto options = best_leaf_solutions(subset, bits, cache_, pool_);
    auto arch = std::make_shared<Archive>();
    arch->reserve(options.size());
    for (const auto& o : options) arch->push_back({o.value, leaf_node(o.payload)});
    memo_.emplace(std::move(key), arch);
    return arch;
  }

  // Front over trees of depth <= depth and at most `nodes` branch nodes on
  // the instances in `bits`. Guarantees |bits| >= min_leaf. Sets `complete`
  // to false when the deadline cut enumeration short; partial results are
  // still genuine trees and are not memoized.
  ArchivePtr recurse(const Bitset& bits, std::size_t count, int depth, int nodes,
                     bool& complete) {
    nodes = clamp_nodes(nodes, depth);
    if (depth == 0 || nodes == 0) return leaf_archive(bits);

    MemoKey key{bits, depth, nodes};
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }

    ++stats_.subproblems;

    bool local_complete = true;
    FrontAccumulator<TreePtr> acc(static_cast<std::int64_t>(count));
    TreeCanonicalLess tie;

    // Leaf options first: even a subproblem cut off by the deadline hands
    // back a usable (if shallow) front.
    ArchivePtr leaves = leaf_archive(bits);
    for (const auto& e : *leaves)
      acc.offer(e.value, [&] { return e.payload; }, tie);

    if (expired()) local_complete = false;
    bool splittable = local_complete && count >= 2 * static_cast<std::size_t>(cfg_.min_leaf);
    if (splittable) {
      int child_cap = (1 << (depth - 1)) - 1;
      int bl_lo = std::max(0, nodes - 1 - child_cap);
      int bl_hi = std::min(child_cap, nodes - 1);
      std::unordered_set<std::size_t> seen_partitions;
      std::vector<Bitset> seen_bits;

      for (std::size_t p = 0; p < view_.columns.size(); ++p) {
        if (expired()) {
          local_complete = false;
          break;
        }
        const Bitset& col = view_.columns[p];
        std::size_t npass = bits.count_and(col);
        std::size_t nfail = count - npass;
        if (npass == 0 || nfail == 0) continue;  // degenerate split
        if (npass < static_cast<std::size_t>(cfg_.min_leaf) ||
            nfail < static_cast<std::size_t>(cfg_.min_leaf))
          continue;  // a child could never host a feasible subtree

        Bitset pass_bits = bits.and_with(col);
        // Identical partitions can only repeat candidates that lose every
        // canonical tie to the first (smallest) predicate that produced
        // them; skipping repeats changes nothing observable.
        std::size_t ph = pass_bits.hash();
        bool duplicate = false;
        if (seen_partitions.count(ph)) {
          for (const Bitset& sb : seen_bits)
            if (sb == pass_bits) {
              duplicate = true;
              break;
            }
        }
        if (duplicate) {
          ++stats_.duplicate_splits;
          continue;
        }
        seen_partitions.insert(ph);
        seen_bits.push_back(pass_bits);

        Bitset fail_bits = bits.and_not(col);
        if (cfg_.pruning) {
          CostLossPair lb = combine(lower_bound_cached(fail_bits), lower_bound_cached(pass_bits));
          if (acc.strictly_dominated(lb)) {
            ++stats_.pruned;
            continue;
          }
        }

        for (int bl = bl_lo; bl <= bl_hi; ++bl) {
          int br = nodes - 1 - bl;
          bool cl = true, cr = true;
          ArchivePtr left = recurse(fail_bits, nfail, depth - 1, bl, cl);
          ArchivePtr right = recurse(pass_bits, npass, depth - 1, br, cr);
          if (!cl || !cr) local_complete = false;
          auto pi = static_cast<std::int32_t>(p);
          for (const auto& el : *left)
            for (const auto& er : *right)
              acc.offer(combine(el.value, er.value),
                        [&] { return TreeNode::branch(pi, el.payload, er.payload); }, tie);
          if (!local_complete) break;
        }
        if (!local_complete) break;
      }
    }

    auto arch = std::make_shared<Archive>(std::move(acc).finish());
    if (local_complete) {
      memo_.emplace(std::move(key), arch);
    } else {
      complete = false;
    }
    return arch;
  }

  CostLossPair lower_bound_cached(const Bitset& bits) {
    CostLossPair lb{0.0, 0};
    bits.for_each([&](std::size_t i) {
      lb.cost += row_min_cost_[i];
      lb.loss += row_min_loss_[i];
    });
    return lb;
  }

  const CacheMatrix& cache_;
  const BinarizedView& view_;
  SolverConfig cfg_;
  ThreadPool& pool_;
  std::size_t n_ = 0;
  std::vector<double> row_min_cost_;
  std::vector<int> row_min_loss_;
  Clock::time_point deadline_{};
  SolveStats stats_;
  std::unordered_map<MemoKey, ArchivePtr, MemoKeyHash> memo_;
  std::vector<TreePtr> leaf_nodes_;
};

}  // namespace

SolveResult solve(const CacheMatrix& cache, const BinarizedView& view, const SolverConfig& cfg,
                  ThreadPool& pool) {
  cfg.validate();
  if (view.n_instances != cache.n_instances())
    throw ConfigError("solver: view and cache disagree on the instance count");
  Solver solver(cache, view, cfg, pool);
  return solver.run();
}

CostLossPair lower_bound(const Bitset& subset, const CacheMatrix& cache) {
  CostLossPair lb{0.0, 0};
  subset.for_each([&](std::size_t i) {
    double mc = cache.cost(i, 0);
    for (std::size_t a = 1; a < cache.n_actions(); ++a) mc = std::min(mc, cache.cost(i, a));
    lb.cost += mc;
    int ml = 1;
    for (std::size_t a = 0; a < cache.n_actions(); ++a)
      if (!cache.loss_column(a).test(i)) {
        ml = 0;
        break;
      }
    lb.loss += ml;
  });
  return lb;
}

CostLossPair evaluate_tree_on_cache(const TreeNode& tree, const Bitset& subset,
                                    const BinarizedView& view, const CacheMatrix& cache) {
  if (tree.is_leaf) return leaf_value(subset.to_indices(), tree.action, cache);
  const Bitset& col = view.columns[static_cast<std::size_t>(tree.predicate)];
  CostLossPair fail = evaluate_tree_on_cache(*tree.fail, subset.and_not(col), view, cache);
  CostLossPair pass = evaluate_tree_on_cache(*tree.pass, subset.and_with(col), view, cache);
  return combine(fail, pass);
}

}  // namespace recourse
