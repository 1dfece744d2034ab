#include "recourse/tree.hpp"

#include <algorithm>

#include "recourse/csv.hpp"
#include "recourse/errors.hpp"

namespace recourse {

int tree_depth(const TreeNode& t) {
  if (t.is_leaf) return 0;
  return 1 + std::max(tree_depth(*t.fail), tree_depth(*t.pass));
}

int tree_branch_count(const TreeNode& t) {
  if (t.is_leaf) return 0;
  return 1 + tree_branch_count(*t.fail) + tree_branch_count(*t.pass);
}

namespace {

void collect_leaves(const TreeNode& t, std::vector<std::uint32_t>& out) {
  if (t.is_leaf) {
    out.push_back(t.action);
    return;
  }
  collect_leaves(*t.fail, out);
  collect_leaves(*t.pass, out);
}

void collect_splits(const TreeNode& t, std::vector<std::int32_t>& out) {
  if (t.is_leaf) return;
  out.push_back(t.predicate);
  collect_splits(*t.fail, out);
  collect_splits(*t.pass, out);
}

// Preorder token walk: (0, action) for leaves, (1, predicate) for branches.
// Uniquely encodes the tree, so it is a safe final tiebreaker.
void collect_tokens(const TreeNode& t, std::vector<std::int64_t>& out) {
  if (t.is_leaf) {
    out.push_back(0);
    out.push_back(t.action);
    return;
  }
  out.push_back(1);
  out.push_back(t.predicate);
  collect_tokens(*t.fail, out);
  collect_tokens(*t.pass, out);
}

}  // namespace

bool tree_canonical_less(const TreeNode& a, const TreeNode& b) {
  std::vector<std::uint32_t> la, lb;
  collect_leaves(a, la);
  collect_leaves(b, lb);
  if (la != lb) return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
  std::vector<std::int32_t> sa, sb;
  collect_splits(a, sa);
  collect_splits(b, sb);
  if (sa != sb) return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
  std::vector<std::int64_t> ta, tb;
  collect_tokens(a, ta);
  collect_tokens(b, tb);
  return std::lexicographical_compare(ta.begin(), ta.end(), tb.begin(), tb.end());
}

namespace {

int materialize_node(const TreeNode& t, const BinarizedView& view,
                     const std::vector<Action>& actions, PortableTree& out) {
  int idx = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  if (t.is_leaf) {
    out.nodes[static_cast<std::size_t>(idx)].action = actions[t.action];
  } else {
    out.nodes[static_cast<std::size_t>(idx)].is_leaf = false;
    out.nodes[static_cast<std::size_t>(idx)].pred =
        view.predicates[static_cast<std::size_t>(t.predicate)];
    int fail = materialize_node(*t.fail, view, actions, out);
    int pass = materialize_node(*t.pass, view, actions, out);
    out.nodes[static_cast<std::size_t>(idx)].fail = fail;
    out.nodes[static_cast<std::size_t>(idx)].pass = pass;
  }
  return idx;
}

}  // namespace

PortableTree materialize(const TreeNode& t, const BinarizedView& view,
                         const std::vector<Action>& actions) {
  PortableTree out;
  materialize_node(t, view, actions, out);
  return out;
}

int route(const PortableTree& tree, const Instance& x) {
  int at = 0;
  while (!tree.nodes[static_cast<std::size_t>(at)].is_leaf) {
    const auto& n = tree.nodes[static_cast<std::size_t>(at)];
    at = n.pred.pass(x) ? n.pass : n.fail;
  }
  return at;
}

namespace {

nlohmann::ordered_json node_to_json(const PortableTree& tree, int idx,
                                    const FeatureSchema& schema) {
  const auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  nlohmann::ordered_json j;
  if (n.is_leaf) {
    j["kind"] = "leaf";
    nlohmann::ordered_json ja;
    ja["edits"] = nlohmann::ordered_json::array();
    for (const Edit& e : n.action.edits) {
      nlohmann::ordered_json je;
      je["feature"] = schema.features[static_cast<std::size_t>(e.feature)].name;
      switch (e.op) {
        case EditOp::flip_binary:
          je["op"] = "flip";
          break;
        case EditOp::set_category:
          je["op"] = "set";
          je["category"] =
              schema.features[static_cast<std::size_t>(e.feature)].categories[static_cast<std::size_t>(e.param)];
          break;
        case EditOp::shift_bins:
          je["op"] = "shift";
          je["bins"] = e.param;
          break;
      }
      ja["edits"].push_back(std::move(je));
    }
    ja["description"] = n.action.describe(schema);
    j["action"] = std::move(ja);
  } else {
    j["kind"] = "branch";
    nlohmann::ordered_json jp;
    jp["feature"] = schema.features[static_cast<std::size_t>(n.pred.feature)].name;
    switch (n.pred.kind) {
      case PredicateKind::numeric_le:
        jp["test"] = "<=";
        jp["threshold"] = n.pred.threshold;
        break;
      case PredicateKind::category_eq:
        jp["test"] = "==";
        jp["category"] =
            schema.features[static_cast<std::size_t>(n.pred.feature)].categories[static_cast<std::size_t>(n.pred.category)];
        break;
      case PredicateKind::binary_one:
        jp["test"] = "==";
        jp["value"] = 1;
        break;
    }
    jp["description"] = n.pred.describe(schema);
    j["predicate"] = std::move(jp);
    // children[0] is the fail side, children[1] the pass side.
    j["children"] = nlohmann::ordered_json::array();
    j["children"].push_back(node_to_json(tree, n.fail, schema));
    j["children"].push_back(node_to_json(tree, n.pass, schema));
  }
  return j;
}

int node_from_json(const nlohmann::json& j, const FeatureSchema& schema, PortableTree& out) {
  int idx = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    Action a;
    for (const auto& je : j.at("action").at("edits")) {
      Edit e;
      std::string fname = je.at("feature").get<std::string>();
      e.feature = schema.feature_index(fname);
      if (e.feature < 0) throw ConfigError("tree: unknown feature '" + fname + "'");
      const FeatureSpec& f = schema.features[static_cast<std::size_t>(e.feature)];
      std::string op = je.at("op").get<std::string>();
      if (op == "flip") {
        e.op = EditOp::flip_binary;
      } else if (op == "set") {
        e.op = EditOp::set_category;
        std::string cat = je.at("category").get<std::string>();
        auto it = std::find(f.categories.begin(), f.categories.end(), cat);
        if (it == f.categories.end())
          throw ConfigError("tree: unknown category '" + cat + "' for '" + fname + "'");
        e.param = static_cast<int>(it - f.categories.begin());
      } else if (op == "shift") {
        e.op = EditOp::shift_bins;
        e.param = je.at("bins").get<int>();
      } else {
        throw ConfigError("tree: unknown edit op '" + op + "'");
      }
      a.edits.push_back(e);
    }
    out.nodes[static_cast<std::size_t>(idx)].action = std::move(a);
  } else if (kind == "branch") {
    const auto& jp = j.at("predicate");
    Predicate p;
    std::string fname = jp.at("feature").get<std::string>();
    p.feature = schema.feature_index(fname);
    if (p.feature < 0) throw ConfigError("tree: unknown feature '" + fname + "'");
    const FeatureSpec& f = schema.features[static_cast<std::size_t>(p.feature)];
    switch (f.kind) {
      case FeatureKind::numeric:
        p.kind = PredicateKind::numeric_le;
        p.threshold = jp.at("threshold").get<double>();
        break;
      case FeatureKind::categorical: {
        p.kind = PredicateKind::category_eq;
        std::string cat = jp.at("category").get<std::string>();
        auto it = std::find(f.categories.begin(), f.categories.end(), cat);
        if (it == f.categories.end())
          throw ConfigError("tree: unknown category '" + cat + "' for '" + fname + "'");
        p.category = static_cast<int>(it - f.categories.begin());
        break;
      }
      case FeatureKind::binary:
        p.kind = PredicateKind::binary_one;
        break;
    }
    out.nodes[static_cast<std::size_t>(idx)].is_leaf = false;
    out.nodes[static_cast<std::size_t>(idx)].pred = p;
    const auto& children = j.at("children");
    if (!children.is_array() || children.size() != 2)
      throw ConfigError("tree: branch must carry exactly two children");
    int fail = node_from_json(children[0], schema, out);
    int pass = node_from_json(children[1], schema, out);
    out.nodes[static_cast<std::size_t>(idx)].fail = fail;
    out.nodes[static_cast<std::size_t>(idx)].pass = pass;
  } else {
    throw ConfigError("tree: unknown node kind '" + kind + "'");
  }
  return idx;
}

}  // namespace

nlohmann::ordered_json tree_to_json(const PortableTree& tree, const FeatureSchema& schema) {
  if (tree.empty()) throw RuntimeError("tree: cannot serialize an empty tree");
  return node_to_json(tree, 0, schema);
}

PortableTree tree_from_json(const nlohmann::json& j, const FeatureSchema& schema) {
  PortableTree out;
  node_from_json(j, schema, out);
  return out;
}

}  // namespace recourse
