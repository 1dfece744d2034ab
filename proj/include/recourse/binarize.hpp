#pragma once

#include <string>
#include <vector>

#include "recourse/bitset.hpp"
#include "recourse/cdf.hpp"
#include "recourse/schema.hpp"

namespace recourse {

// Split predicates in the binarized feature space. An instance "passes" a
// predicate when the condition holds; the solver routes passing instances
// to the right child and failing ones to the left.
enum class PredicateKind { numeric_le, category_eq, binary_one };

struct Predicate {
  PredicateKind kind = PredicateKind::numeric_le;
  int feature = -1;
  double threshold = 0.0;  // numeric_le: x_j <= threshold
  int category = 0;        // category_eq: x_j == category

  bool pass(const Instance& x) const;
  std::string describe(const FeatureSchema& schema) const;
};

// Predicate columns over a fixed instance subset (row i of the subset is
// bit i). Column order is canonical: features ascending; for numerics the
// bins-1 interior thresholds ascending; for categoricals one column per
// category in vocabulary order; for binaries the single [x == 1] column.
struct BinarizedView {
  std::vector<Predicate> predicates;
  std::vector<Bitset> columns;
  std::size_t n_instances = 0;
};

// Builds the view for dataset rows `subset` (indices into ds.rows), with
// thresholds derived from the full-dataset binning. Constant numeric
// features contribute nothing and emit a warning on stderr.
BinarizedView binarize(const Dataset& ds, const std::vector<std::uint32_t>& subset,
                       const Binning& binning);

}  // namespace recourse
