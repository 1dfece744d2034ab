#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "recourse/action.hpp"
#include "recourse/binarize.hpp"
#include "recourse/schema.hpp"

namespace recourse {

// Solver-side tree: leaves carry an action index into the action set,
// branches a predicate index into the binarized view. Children are shared
// between archive entries, so nodes are immutable and refcounted.
struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

struct TreeNode {
  bool is_leaf = true;
  std::uint32_t action = 0;  // leaves
  std::int32_t predicate = -1;
  TreePtr fail;  // predicate false
  TreePtr pass;  // predicate true

  static TreePtr leaf(std::uint32_t action_index) {
    auto n = std::make_shared<TreeNode>();
    n->action = action_index;
    return n;
  }
  static TreePtr branch(std::int32_t predicate_index, TreePtr fail_child, TreePtr pass_child) {
    auto n = std::make_shared<TreeNode>();
    n->is_leaf = false;
    n->predicate = predicate_index;
    n->fail = std::move(fail_child);
    n->pass = std::move(pass_child);
    return n;
  }
};

int tree_depth(const TreeNode& t);
int tree_branch_count(const TreeNode& t);

// The canonical payload encoding that breaks exact value ties: compare
// in-order leaf action indices first, then preorder split predicate
// indices, then a full preorder token walk so trees that agree on both
// lists but differ in shape still order totally.
bool tree_canonical_less(const TreeNode& a, const TreeNode& b);

struct TreeCanonicalLess {
  bool operator()(const TreePtr& a, const TreePtr& b) const {
    return tree_canonical_less(*a, *b);
  }
};

// Export form: predicates and actions resolved to values, so a serialized
// tree can be routed and evaluated without the solver's index spaces.
struct PortableTree {
  struct Node {
    bool is_leaf = true;
    Action action;      // leaves
    Predicate pred;     // branches
    int fail = -1;      // node indices; -1 on leaves
    int pass = -1;
  };
  std::vector<Node> nodes;  // preorder, root at 0

  bool empty() const { return nodes.empty(); }
};

PortableTree materialize(const TreeNode& t, const BinarizedView& view,
                         const std::vector<Action>& actions);

// Node index of the leaf x routes to.
int route(const PortableTree& tree, const Instance& x);

nlohmann::ordered_json tree_to_json(const PortableTree& tree, const FeatureSchema& schema);
PortableTree tree_from_json(const nlohmann::json& j, const FeatureSchema& schema);

}  // namespace recourse
