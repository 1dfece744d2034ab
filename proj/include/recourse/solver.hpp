#pragma once

#include <cstdint>
#include <vector>

#include "recourse/binarize.hpp"
#include "recourse/cache.hpp"
#include "recourse/pareto.hpp"
#include "recourse/threading.hpp"
#include "recourse/tree.hpp"

namespace recourse {

struct SolverConfig {
  int max_depth = 3;
  // Branch-node budget; -1 means unconstrained, i.e. 2^max_depth - 1. Any
  // larger value is clamped to that bound on entry.
  int max_nodes = -1;
  int min_leaf = 1;
  // 0 disables the deadline. The deadline is polled between subproblems and
  // between split enumerations; a unit of work in flight always completes,
  // so every archived solution is a genuine tree.
  double timeout_seconds = 0.0;
  unsigned threads = 1;
  // Disables the relaxation-bound prune; fronts must be identical either
  // way (the prune only ever discards strictly dominated completions).
  bool pruning = true;

  void validate() const;  // throws ConfigError
};

enum class SolveStatus { complete, timed_out, infeasible };

struct SolveStats {
  std::size_t subproblems = 0;      // memo misses actually solved
  std::size_t memo_hits = 0;
  std::size_t pruned = 0;           // (predicate, budget) pairs cut by the bound
  std::size_t duplicate_splits = 0; // predicates skipped for repeating a partition
  double wall_seconds = 0.0;
};

struct FrontEntry {
  CostLossPair value;
  TreePtr tree;
};

struct SolveResult {
  SolveStatus status = SolveStatus::complete;
  std::vector<FrontEntry> front;  // cost ascending, loss descending
  SolveStats stats;
};

// Exact bi-objective search over depth- and node-budgeted trees on the
// binarized view, one shared action per leaf. Returns the complete Pareto
// front of (total cost, total loss) with witness trees; under a deadline,
// the nondominated set of the complete solutions found so far.
SolveResult solve(const CacheMatrix& cache, const BinarizedView& view, const SolverConfig& cfg,
                  ThreadPool& pool);

// Test oracle: enumerates every admissible tree explicitly (leaf choices
// restricted to per-leaf nondominated options, which provably preserves the
// value front) and filters once at the end. No memoization, no bounds, no
// budget-split reasoning shared with solve(). Guarded to small instances.
SolveResult brute_force_solve(const CacheMatrix& cache, const BinarizedView& view,
                              const SolverConfig& cfg);

// Sum of per-instance cache minima over the subset, a relaxation of every
// achievable value on it (each objective minimized independently per
// instance, ignoring tree structure).
CostLossPair lower_bound(const Bitset& subset, const CacheMatrix& cache);

// Re-evaluates a solver tree from scratch against the cache, reproducing
// the archived value bit-for-bit (leaf sums in instance order, children
// combined fail-then-pass).
CostLossPair evaluate_tree_on_cache(const TreeNode& tree, const Bitset& subset,
                                    const BinarizedView& view, const CacheMatrix& cache);

}  // namespace recourse
