#include "recourse/action.hpp"

#include <sstream>

#include "recourse/csv.hpp"
#include "recourse/errors.hpp"

namespace recourse {

std::string Edit::describe(const FeatureSchema& schema) const {
  const FeatureSpec& f = schema.features[static_cast<std::size_t>(feature)];
  std::ostringstream oss;
  switch (op) {
    case EditOp::flip_binary:
      oss << f.name << ": flip";
      break;
    case EditOp::set_category:
      oss << f.name << ": set to '" << f.categories[static_cast<std::size_t>(param)] << "'";
      break;
    case EditOp::shift_bins:
      oss << f.name << ": " << (param > 0 ? "+" : "") << param
          << (param == 1 || param == -1 ? " bin" : " bins");
      break;
  }
  return oss.str();
}

std::string Action::describe(const FeatureSchema& schema) const {
  if (is_null()) return "keep everything";
  std::string out;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (i) out += "; ";
    out += edits[i].describe(schema);
  }
  return out;
}

std::vector<Edit> generate_single_edits(const FeatureSchema& schema) {
  std::vector<Edit> edits;
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    const FeatureSpec& f = schema.features[j];
    if (f.actionability == Actionability::immutable) continue;
    switch (f.kind) {
      case FeatureKind::numeric: {
        int s = f.effective_max_shift();
        for (int delta = -s; delta <= s; ++delta) {
          if (delta == 0) continue;
          if (delta < 0 && f.actionability == Actionability::increase_only) continue;
          if (delta > 0 && f.actionability == Actionability::decrease_only) continue;
          edits.push_back({static_cast<int>(j), EditOp::shift_bins, delta});
        }
        break;
      }
      case FeatureKind::categorical:
        for (std::size_t c = 0; c < f.categories.size(); ++c)
          edits.push_back({static_cast<int>(j), EditOp::set_category, static_cast<int>(c)});
        break;
      case FeatureKind::binary:
        edits.push_back({static_cast<int>(j), EditOp::flip_binary, 0});
        break;
    }
  }
  return edits;
}

namespace {

// Contiguous runs of the single-edit list that share a feature.
struct Block {
  std::size_t begin;
  std::size_t end;
};

std::vector<Block> feature_blocks(const std::vector<Edit>& singles) {
  std::vector<Block> blocks;
  std::size_t i = 0;
  while (i < singles.size()) {
    std::size_t j = i;
    while (j < singles.size() && singles[j].feature == singles[i].feature) ++j;
    blocks.push_back({i, j});
    i = j;
  }
  return blocks;
}

}  // namespace

std::size_t count_action_set(const FeatureSchema& schema, int max_edits) {
  std::vector<Edit> singles = generate_single_edits(schema);
  std::vector<Block> blocks = feature_blocks(singles);
  // ways[s] = number of s-edit combinations over the blocks seen so far
  std::vector<std::size_t> ways(static_cast<std::size_t>(max_edits) + 1, 0);
  ways[0] = 1;
  for (const Block& b : blocks) {
    std::size_t block_size = b.end - b.begin;
    for (int s = max_edits; s >= 1; --s)
      ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - 1)] * block_size;
  }
  std::size_t total = 0;
  for (int s = 0; s <= max_edits; ++s) total += ways[static_cast<std::size_t>(s)];
  return total;
}

std::vector<Action> generate_action_set(const FeatureSchema& schema, int max_edits,
                                        std::size_t cap) {
  if (max_edits < 1) throw ConfigError("actions: max_edits must be >= 1");
  std::size_t total = count_action_set(schema, max_edits);
  if (total > cap) {
    std::ostringstream oss;
    oss << "actions: the action set would hold " << total << " actions, above the cap of " << cap
        << "; use coarser bins, a smaller max_bin_shift, or a lower edit budget";
    throw ConfigError(oss.str());
  }

  std::vector<Edit> singles = generate_single_edits(schema);
  std::vector<Block> blocks = feature_blocks(singles);

  std::vector<Action> actions;
  actions.reserve(total);
  actions.push_back(Action{});  // the null action, index 0

  // Lexicographic enumeration over single-edit indices; distinct features
  // enforced by advancing block-by-block.
  std::vector<Edit> current;
  auto recurse = [&](auto&& self, std::size_t block_from, int remaining) -> void {
    if (remaining == 0) return;
    for (std::size_t bi = block_from; bi < blocks.size(); ++bi) {
      for (std::size_t e = blocks[bi].begin; e < blocks[bi].end; ++e) {
        current.push_back(singles[e]);
        actions.push_back(Action{current});
        self(self, bi + 1, remaining - 1);
        current.pop_back();
      }
    }
  };
  recurse(recurse, 0, max_edits);
  return actions;
}

Instance apply_action(const Action& a, const Instance& x, const FeatureSchema& schema,
                      const Binning& binning) {
  Instance out = x;
  for (const Edit& e : a.edits) {
    auto j = static_cast<std::size_t>(e.feature);
    switch (e.op) {
      case EditOp::flip_binary:
        out[j] = out[j] != 0.0 ? 0.0 : 1.0;
        break;
      case EditOp::set_category:
        out[j] = static_cast<double>(e.param);
        break;
      case EditOp::shift_bins: {
        const FeatureBinning& fb = binning.per_feature[j];
        if (fb.degenerate()) break;  // constant feature: nothing to move
        int dest = fb.bin_of(out[j]) + e.param;
        if (dest < 0) dest = 0;
        if (dest > fb.bins - 1) dest = fb.bins - 1;
        out[j] = fb.midpoint(dest);
        break;
      }
    }
  }
  (void)schema;
  return out;
}

std::uint64_t action_set_fingerprint(const std::vector<Action>& actions) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(actions.size());
  for (const Action& a : actions) {
    mix(0xA5);
    for (const Edit& e : a.edits) {
      mix(static_cast<std::uint64_t>(e.feature));
      mix(static_cast<std::uint64_t>(e.op));
      mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(e.param)));
    }
  }
  return h;
}

}  // namespace recourse
