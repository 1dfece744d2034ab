#include "recourse/binarize.hpp"

#include <iostream>
#include <sstream>

#include "recourse/csv.hpp"

namespace recourse {

bool Predicate::pass(const Instance& x) const {
  switch (kind) {
    case PredicateKind::numeric_le:
      return x[static_cast<std::size_t>(feature)] <= threshold;
    case PredicateKind::category_eq:
      return static_cast<int>(x[static_cast<std::size_t>(feature)]) == category;
    case PredicateKind::binary_one:
      return x[static_cast<std::size_t>(feature)] != 0.0;
  }
  return false;
}

std::string Predicate::describe(const FeatureSchema& schema) const {
  const FeatureSpec& f = schema.features[static_cast<std::size_t>(feature)];
  std::ostringstream oss;
  switch (kind) {
    case PredicateKind::numeric_le:
      oss << f.name << " <= " << format_double(threshold);
      break;
    case PredicateKind::category_eq:
      oss << f.name << " == " << f.categories[static_cast<std::size_t>(category)];
      break;
    case PredicateKind::binary_one:
      oss << f.name << " == 1";
      break;
  }
  return oss.str();
}

BinarizedView binarize(const Dataset& ds, const std::vector<std::uint32_t>& subset,
                       const Binning& binning) {
  BinarizedView view;
  view.n_instances = subset.size();
  for (std::size_t j = 0; j < ds.schema.features.size(); ++j) {
    const FeatureSpec& f = ds.schema.features[j];
    switch (f.kind) {
      case FeatureKind::numeric: {
        const FeatureBinning& fb = binning.per_feature[j];
        if (fb.degenerate()) {
          std::cerr << "warning: feature '" << f.name
                    << "' is constant; it contributes no split predicates\n";
          break;
        }
        for (int b = 1; b < fb.bins; ++b) {
          Predicate p;
          p.kind = PredicateKind::numeric_le;
          p.feature = static_cast<int>(j);
          p.threshold = fb.lo + fb.width * static_cast<double>(b);
          view.predicates.push_back(p);
        }
        break;
      }
      case FeatureKind::categorical:
        for (std::size_t c = 0; c < f.categories.size(); ++c) {
          Predicate p;
          p.kind = PredicateKind::category_eq;
          p.feature = static_cast<int>(j);
          p.category = static_cast<int>(c);
          view.predicates.push_back(p);
        }
        break;
      case FeatureKind::binary: {
        Predicate p;
        p.kind = PredicateKind::binary_one;
        p.feature = static_cast<int>(j);
        view.predicates.push_back(p);
        break;
      }
    }
  }
  view.columns.reserve(view.predicates.size());
  for (const Predicate& p : view.predicates) {
    Bitset col(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i)
      if (p.pass(ds.rows[subset[i]])) col.set(i);
    view.columns.push_back(std::move(col));
  }
  return view;
}

}  // namespace recourse
