#pragma once

#include <vector>

#include "recourse/schema.hpp"

namespace recourse {

// Per-feature empirical CDFs over the full training dataset:
// Q_j(v) = |{x in D : x_j <= v}| / |D|. Only numeric features are stored;
// the cost model handles categorical/binary changes as a fixed unit shift.
class EmpiricalCdf {
 public:
  static EmpiricalCdf fit(const Dataset& ds);

  // Rebuild from persisted per-feature sorted columns (see columns()).
  static EmpiricalCdf from_columns(std::vector<std::vector<double>> columns, std::size_t n);

  // Q_j(v); feature j must be numeric.
  double at(int feature, double v) const;

  std::size_t n() const { return n_; }

  // Per-feature ascending sample values; empty for non-numeric features.
  const std::vector<std::vector<double>>& columns() const { return sorted_; }

 private:
  std::vector<std::vector<double>> sorted_;
  std::size_t n_ = 0;
};

// Equal-width binning fitted on the full dataset's [min, max] per numeric
// feature. A constant feature gets a degenerate binning (width 0) that
// contributes no thresholds and no shift edits.
struct FeatureBinning {
  double lo = 0.0;
  double width = 0.0;
  int bins = 0;

  bool degenerate() const { return width <= 0.0 || bins <= 0; }
  int bin_of(double v) const;
  double midpoint(int b) const { return lo + (static_cast<double>(b) + 0.5) * width; }
};

struct Binning {
  std::vector<FeatureBinning> per_feature;  // non-numeric features: bins == 0

  static Binning fit(const Dataset& ds);
};

}  // namespace recourse
