#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recourse/cdf.hpp"
#include "recourse/schema.hpp"

namespace recourse {

// One atomic feature change. Semantics at application time:
//  - flip_binary:   x_j := 1 - x_j
//  - set_category:  x_j := param (a category index; a no-op when equal)
//  - shift_bins:    move x_j by param bins relative to its current bin,
//    clamped to [0, bins-1]; the new raw value is the destination bin's
//    midpoint (also when clamping lands back in the current bin).
enum class EditOp { flip_binary, set_category, shift_bins };

struct Edit {
  int feature = -1;
  EditOp op = EditOp::shift_bins;
  int param = 0;

  std::string describe(const FeatureSchema& schema) const;

  friend bool operator==(const Edit& a, const Edit& b) {
    return a.feature == b.feature && a.op == b.op && a.param == b.param;
  }
};

// A shared action: at most one edit per feature, edits sorted by feature
// index. The null action (no edits) leaves instances untouched.
struct Action {
  std::vector<Edit> edits;

  bool is_null() const { return edits.empty(); }
  std::string describe(const FeatureSchema& schema) const;

  friend bool operator==(const Action& a, const Action& b) { return a.edits == b.edits; }
};

// Every admissible single edit, in canonical order: features ascending;
// numeric deltas ascending over [-max_shift, -1] u [1, max_shift] filtered
// by directionality; categorical targets in vocabulary order; binary flip.
// Immutable features contribute nothing.
std::vector<Edit> generate_single_edits(const FeatureSchema& schema);

// The full action set: the null action at index 0, then every combination
// of 1..max_edits single edits on pairwise-distinct features, enumerated in
// lexicographic order over the single-edit list. Throws ConfigError when
// the count would exceed `cap` (the message suggests coarser bins or a
// smaller edit budget).
std::vector<Action> generate_action_set(const FeatureSchema& schema, int max_edits,
                                        std::size_t cap);

// Counts what generate_action_set would produce without materializing it.
std::size_t count_action_set(const FeatureSchema& schema, int max_edits);

Instance apply_action(const Action& a, const Instance& x, const FeatureSchema& schema,
                      const Binning& binning);

// 64-bit FNV-1a over the action list's structural encoding, for cache
// fingerprints.
std::uint64_t action_set_fingerprint(const std::vector<Action>& actions);

}  // namespace recourse
