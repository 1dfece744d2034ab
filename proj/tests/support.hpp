#pragma once

// Shared fixtures for the unit and acceptance suites: randomized solver
// problems built directly on the cache/view layer, and a couple of tiny
// hand-written datasets.

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/bitset.hpp"
#include "recourse/cache.hpp"
#include "recourse/rng.hpp"
#include "recourse/schema.hpp"
#include "recourse/solver.hpp"

namespace testsupport {

// Self-cleaning scratch directory.
struct TempDir {
  std::string path;
  TempDir() {
    char buf[] = "/tmp/rstree_test_XXXXXX";
    if (!mkdtemp(buf)) throw std::runtime_error("mkdtemp failed");
    path = buf;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const { return path + "/" + name; }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct Problem {
  recourse::CacheMatrix cache;
  recourse::BinarizedView view;
};

struct ProblemShape {
  std::size_t min_n = 2, max_n = 60;
  std::size_t min_actions = 2, max_actions = 12;
  std::size_t min_preds = 1, max_preds = 6;
};

// Random instance of the core search problem. Respects the cache row-0
// invariants (null action: cost 0, loss 1). Half the costs land on a coarse
// dyadic grid so exact value ties actually occur; occasionally a predicate
// column duplicates an earlier one to exercise the duplicate-partition skip.
inline Problem random_problem(std::uint64_t seed, const ProblemShape& shape = {}) {
  using recourse::Bitset;
  recourse::SplitMix64 rng(seed);
  std::size_t n = shape.min_n + rng.below(shape.max_n - shape.min_n + 1);
  std::size_t na = shape.min_actions + rng.below(shape.max_actions - shape.min_actions + 1);
  std::size_t np = shape.min_preds + rng.below(shape.max_preds - shape.min_preds + 1);

  recourse::CacheMatrix cache(n, na);
  for (std::size_t i = 0; i < n; ++i) cache.set_loss(i, 0);
  bool grid = rng.chance(0.5);
  for (std::size_t a = 1; a < na; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      double c = grid ? static_cast<double>(rng.below(8)) * 0.125 : rng.unit();
      cache.set_cost(i, a, c);
      if (rng.chance(0.45)) cache.set_loss(i, a);
    }
  }

  recourse::BinarizedView view;
  view.n_instances = n;
  for (std::size_t p = 0; p < np; ++p) {
    Bitset col(n);
    if (p > 0 && rng.chance(0.15)) {
      col = view.columns[rng.below(p)];
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (rng.chance(0.5)) col.set(i);
    }
    view.columns.push_back(col);
    recourse::Predicate pr;
    pr.kind = recourse::PredicateKind::numeric_le;
    pr.feature = static_cast<int>(p);
    pr.threshold = static_cast<double>(p);
    view.predicates.push_back(pr);
  }
  return {std::move(cache), std::move(view)};
}

inline std::vector<recourse::CostLossPair> front_values(
    const std::vector<recourse::FrontEntry>& front) {
  std::vector<recourse::CostLossPair> out;
  out.reserve(front.size());
  for (const auto& e : front) out.push_back(e.value);
  return out;
}

// Every value of `inner` is weakly dominated by some value of `outer`.
inline bool weakly_covered(const std::vector<recourse::CostLossPair>& inner,
                           const std::vector<recourse::CostLossPair>& outer) {
  for (const auto& v : inner) {
    bool ok = false;
    for (const auto& u : outer)
      if (u.cost <= v.cost && u.loss <= v.loss) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

// No entry strictly dominates another (and no duplicate values).
inline bool internally_nondominated(const std::vector<recourse::CostLossPair>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = 0; j < vals.size(); ++j)
      if (i != j && (recourse::dominates(vals[i], vals[j]) || vals[i] == vals[j])) return false;
  return true;
}

// Walks a solver tree over the view, checking structure against the config:
// every leaf covers >= min_leaf instances, depth and branch budgets hold.
inline bool tree_respects_config(const recourse::TreeNode& t, const recourse::Bitset& subset,
                                 const recourse::BinarizedView& view, int depth_left,
                                 int min_leaf) {
  if (t.is_leaf) return subset.count() >= static_cast<std::size_t>(min_leaf);
  if (depth_left <= 0) return false;
  const recourse::Bitset& col = view.columns[static_cast<std::size_t>(t.predicate)];
  recourse::Bitset pass = subset.and_with(col);
  recourse::Bitset fail = subset.and_not(col);
  return tree_respects_config(*t.fail, fail, view, depth_left - 1, min_leaf) &&
         tree_respects_config(*t.pass, pass, view, depth_left - 1, min_leaf);
}

// Small labeled dataset used across schema/predictor/cache tests: two
// numerics, one categorical, one binary.
inline nlohmann::json demo_schema_json() {
  return nlohmann::json::parse(R"({
    "label_column": "outcome",
    "features": [
      {"name": "income", "kind": "numeric", "actionability": "increase_only",
       "bins": 6, "max_bin_shift": 3},
      {"name": "age", "kind": "numeric", "actionability": "immutable"},
      {"name": "job", "kind": "categorical", "actionability": "free",
       "categories": ["none", "basic", "skilled"]},
      {"name": "owns_home", "kind": "binary", "actionability": "free"}
    ]
  })");
}

inline std::string demo_csv() {
  return "income,age,job,owns_home,outcome\n"
         "1200,34,none,0,0\n"
         "2600,41,basic,0,0\n"
         "4100,29,basic,1,0\n"
         "5900,52,skilled,1,1\n"
         "7400,45,skilled,0,1\n"
         "8800,38,none,1,1\n"
         "3300,61,skilled,0,0\n"
         "6500,27,basic,1,1\n";
}

inline recourse::Dataset demo_dataset() {
  recourse::Dataset ds;
  ds.schema = recourse::FeatureSchema::from_json(demo_schema_json());
  ds.rows = {
      {1200, 34, 0, 0}, {2600, 41, 1, 0}, {4100, 29, 1, 1}, {5900, 52, 2, 1},
      {7400, 45, 2, 0}, {8800, 38, 0, 1}, {3300, 61, 2, 0}, {6500, 27, 1, 1},
  };
  ds.labels = {0, 0, 0, 1, 1, 1, 0, 1};
  return ds;
}

}  // namespace testsupport
