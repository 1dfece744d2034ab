#include <algorithm>
#include <chrono>
#include <limits>
#include <vector>

#include "recourse/errors.hpp"
#include "recourse/solver.hpp"

namespace recourse {

// Reference implementation: enumerates every admissible tree by structural
// recursion and keeps, per subproblem, all candidates that are not
// (cost, loss, branch count)-dominated. A candidate may be discarded only
// when another one matches it on every axis with budget to spare, which
// cannot remove any value from the root front. Shares nothing with the
// production solver beyond the elementary leaf_value definition.

namespace {

struct Candidate {
  CostLossPair value;
  int branches;
  TreePtr tree;
};

class Enumerator {
 public:
  Enumerator(const CacheMatrix& cache, const BinarizedView& view, const SolverConfig& cfg,
             int max_branches)
      : cache_(cache), view_(view), cfg_(cfg), max_branches_(max_branches) {}

  std::vector<Candidate> enumerate(const Bitset& bits, std::size_t count, int depth) {
    std::vector<Candidate> out;
    if (count >= static_cast<std::size_t>(cfg_.min_leaf)) {
      for (std::size_t a = 0; a < cache_.n_actions(); ++a) {
        CostLossPair v = leaf_value(bits.to_indices(), static_cast<std::uint32_t>(a), cache_);
        out.push_back({v, 0, TreeNode::leaf(static_cast<std::uint32_t>(a))});
      }
    }
    if (depth > 0 && count >= 2 * static_cast<std::size_t>(cfg_.min_leaf)) {
      for (std::size_t p = 0; p < view_.columns.size(); ++p) {
        const Bitset& col = view_.columns[p];
        std::size_t npass = bits.count_and(col);
        std::size_t nfail = count - npass;
        if (npass < static_cast<std::size_t>(cfg_.min_leaf) ||
            nfail < static_cast<std::size_t>(cfg_.min_leaf))
          continue;
        std::vector<Candidate> left = enumerate(bits.and_not(col), nfail, depth - 1);
        std::vector<Candidate> right = enumerate(bits.and_with(col), npass, depth - 1);
        for (const auto& cl : left)
          for (const auto& cr : right) {
            int b = cl.branches + cr.branches + 1;
            if (b > max_branches_) continue;
            out.push_back({combine(cl.value, cr.value), b,
                           TreeNode::branch(static_cast<std::int32_t>(p), cl.tree, cr.tree)});
          }
      }
    }
    reduce(out);
    return out;
  }

 private:
  // Keep c unless some other candidate is at least as good on cost, loss
  // and branch count; identical triples collapse to the canonical tree.
  // Sorted sweep: after ordering by (cost, loss, branches, canonical tree),
  // a candidate is redundant exactly when an already kept one reaches an
  // equal or lower loss using no more branches.
  void reduce(std::vector<Candidate>& cands) const {
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.value.cost != b.value.cost) return a.value.cost < b.value.cost;
      if (a.value.loss != b.value.loss) return a.value.loss < b.value.loss;
      if (a.branches != b.branches) return a.branches < b.branches;
      return tree_canonical_less(*a.tree, *b.tree);
    });
    std::vector<std::int64_t> best_loss(static_cast<std::size_t>(max_branches_) + 1,
                                        std::numeric_limits<std::int64_t>::max());
    std::vector<Candidate> kept;
    kept.reserve(cands.size());
    for (auto& c : cands) {
      auto b = static_cast<std::size_t>(c.branches);
      if (best_loss[b] <= c.value.loss) continue;
      for (std::size_t i = b; i < best_loss.size(); ++i)
        best_loss[i] = std::min(best_loss[i], c.value.loss);
      kept.push_back(std::move(c));
    }
    cands.swap(kept);
  }

  const CacheMatrix& cache_;
  const BinarizedView& view_;
  SolverConfig cfg_;
  int max_branches_;
};

}  // namespace

SolveResult brute_force_solve(const CacheMatrix& cache, const BinarizedView& view,
                              const SolverConfig& cfg) {
  cfg.validate();
  if (view.n_instances != cache.n_instances())
    throw ConfigError("brute force: view and cache disagree on the instance count");
  if (cache.n_instances() > 128)
    throw ConfigError("brute force: limited to 128 instances");
  if (cache.n_actions() > 64) throw ConfigError("brute force: limited to 64 actions");
  if (view.columns.size() > 12) throw ConfigError("brute force: limited to 12 predicates");
  if (cfg.max_depth > 3) throw ConfigError("brute force: limited to depth 3");

  auto t0 = std::chrono::steady_clock::now();
  SolveResult result;
  std::size_t n = cache.n_instances();
  if (n < static_cast<std::size_t>(cfg.min_leaf)) {
    result.status = SolveStatus::infeasible;
    result.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }

  long long full = (1LL << cfg.max_depth) - 1;
  int max_branches = cfg.max_nodes < 0 ? static_cast<int>(full)
                                       : static_cast<int>(std::min<long long>(cfg.max_nodes, full));

  Enumerator en(cache, view, cfg, max_branches);
  std::vector<Candidate> cands = en.enumerate(Bitset::full(n), n, cfg.max_depth);

  // Final two-objective sweep, written out directly rather than through the
  // production kernel so the oracle stands on its own.
  std::vector<Candidate> front;
  for (const auto& c : cands) {
    bool drop = false;
    for (const auto& o : cands) {
      if (&o == &c) continue;
      if (o.value.cost > c.value.cost || o.value.loss > c.value.loss) continue;
      if (o.value.cost < c.value.cost || o.value.loss < c.value.loss) {
        drop = true;
        break;
      }
      if (tree_canonical_less(*o.tree, *c.tree)) {
        drop = true;
        break;
      }
    }
    if (!drop) front.push_back(c);
  }
  std::sort(front.begin(), front.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value.cost != b.value.cost) return a.value.cost < b.value.cost;
    return a.value.loss < b.value.loss;
  });

  result.status = SolveStatus::complete;
  result.front.reserve(front.size());
  for (const auto& c : front) result.front.push_back({c.value, c.tree});
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace recourse
