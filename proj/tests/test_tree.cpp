#include <doctest.h>

#include <algorithm>
#include <vector>

#include "recourse/action.hpp"
#include "recourse/binarize.hpp"
#include "recourse/cdf.hpp"
#include "recourse/tree.hpp"
#include "support.hpp"

using recourse::Binning;
using recourse::Dataset;
using recourse::PortableTree;
using recourse::TreeNode;
using recourse::TreePtr;

TEST_CASE("depth and branch count") {
  TreePtr l0 = TreeNode::leaf(0);
  TreePtr l1 = TreeNode::leaf(1);
  CHECK(recourse::tree_depth(*l0) == 0);
  CHECK(recourse::tree_branch_count(*l0) == 0);
  TreePtr b = TreeNode::branch(2, l0, l1);
  CHECK(recourse::tree_depth(*b) == 1);
  CHECK(recourse::tree_branch_count(*b) == 1);
  TreePtr c = TreeNode::branch(0, b, l0);
  CHECK(recourse::tree_depth(*c) == 2);
  CHECK(recourse::tree_branch_count(*c) == 2);
}

TEST_CASE("canonical order: leaf actions first, then predicates, then shape") {
  TreePtr a = TreeNode::leaf(1);
  TreePtr b = TreeNode::leaf(2);
  CHECK(recourse::tree_canonical_less(*a, *b));
  CHECK_FALSE(recourse::tree_canonical_less(*b, *a));
  CHECK_FALSE(recourse::tree_canonical_less(*a, *a));

  // Same leaf sequence (1, 2), different split predicate.
  TreePtr p0 = TreeNode::branch(0, a, b);
  TreePtr p1 = TreeNode::branch(1, a, b);
  CHECK(recourse::tree_canonical_less(*p0, *p1));

  // Same leaves in-order, same predicate list, different shape:
  // (1 2) 3 under roots vs 1 (2 3).
  TreePtr left_heavy = TreeNode::branch(0, TreeNode::branch(1, TreeNode::leaf(1), TreeNode::leaf(2)),
                                        TreeNode::leaf(3));
  TreePtr right_heavy = TreeNode::branch(0, TreeNode::leaf(1),
                                         TreeNode::branch(1, TreeNode::leaf(2), TreeNode::leaf(3)));
  bool lr = recourse::tree_canonical_less(*left_heavy, *right_heavy);
  bool rl = recourse::tree_canonical_less(*right_heavy, *left_heavy);
  CHECK(lr != rl);  // total order separates them

  // A leaf against a branch with the same first action.
  TreePtr lone = TreeNode::leaf(1);
  bool ab = recourse::tree_canonical_less(*lone, *p0);
  bool ba = recourse::tree_canonical_less(*p0, *lone);
  CHECK(ab != ba);
}

TEST_CASE("canonical order is a strict total order on distinct trees") {
  std::vector<TreePtr> trees = {
      TreeNode::leaf(0),
      TreeNode::leaf(3),
      TreeNode::branch(0, TreeNode::leaf(0), TreeNode::leaf(3)),
      TreeNode::branch(1, TreeNode::leaf(0), TreeNode::leaf(3)),
      TreeNode::branch(0, TreeNode::leaf(3), TreeNode::leaf(0)),
      TreeNode::branch(1, TreeNode::branch(0, TreeNode::leaf(1), TreeNode::leaf(2)),
                       TreeNode::leaf(0)),
  };
  std::sort(trees.begin(), trees.end(), recourse::TreeCanonicalLess{});
  for (std::size_t i = 0; i < trees.size(); ++i)
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      CHECK(recourse::tree_canonical_less(*trees[i], *trees[j]));
      CHECK_FALSE(recourse::tree_canonical_less(*trees[j], *trees[i]));
    }
}

TEST_CASE("materialize + route mirror the solver's routing") {
  Dataset ds = testsupport::demo_dataset();
  Binning binning = Binning::fit(ds);
  std::vector<std::uint32_t> all;
  for (std::uint32_t i = 0; i < ds.size(); ++i) all.push_back(i);
  recourse::BinarizedView view = recourse::binarize(ds, all, binning);
  auto actions = recourse::generate_action_set(ds.schema, 1, 1u << 20);
  REQUIRE(view.predicates.size() >= 2);

  TreePtr t = TreeNode::branch(0, TreeNode::leaf(1), TreeNode::leaf(2));
  PortableTree pt = recourse::materialize(*t, view, actions);
  REQUIRE(pt.nodes.size() == 3);
  CHECK_FALSE(pt.nodes[0].is_leaf);
  for (std::uint32_t i = 0; i < ds.size(); ++i) {
    int leaf = recourse::route(pt, ds.rows[i]);
    bool passes = view.predicates[0].pass(ds.rows[i]);
    CHECK(leaf == (passes ? pt.nodes[0].pass : pt.nodes[0].fail));
  }
}

TEST_CASE("portable tree json round trip") {
  Dataset ds = testsupport::demo_dataset();
  Binning binning = Binning::fit(ds);
  std::vector<std::uint32_t> all;
  for (std::uint32_t i = 0; i < ds.size(); ++i) all.push_back(i);
  recourse::BinarizedView view = recourse::binarize(ds, all, binning);
  auto actions = recourse::generate_action_set(ds.schema, 2, 1u << 20);

  TreePtr t = TreeNode::branch(1, TreeNode::leaf(0),
                               TreeNode::branch(3, TreeNode::leaf(2), TreeNode::leaf(5)));
  PortableTree pt = recourse::materialize(*t, view, actions);
  auto j = recourse::tree_to_json(pt, ds.schema);
  PortableTree back = recourse::tree_from_json(j, ds.schema);
  REQUIRE(back.nodes.size() == pt.nodes.size());
  for (std::uint32_t i = 0; i < ds.size(); ++i)
    CHECK(recourse::route(back, ds.rows[i]) == recourse::route(pt, ds.rows[i]));
  // Actions survive structurally.
  for (std::size_t k = 0; k < pt.nodes.size(); ++k) {
    CHECK(back.nodes[k].is_leaf == pt.nodes[k].is_leaf);
    if (pt.nodes[k].is_leaf) CHECK(back.nodes[k].action == pt.nodes[k].action);
  }
}
