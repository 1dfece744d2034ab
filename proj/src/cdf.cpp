#include "recourse/cdf.hpp"

#include <algorithm>
#include <cmath>

#include "recourse/errors.hpp"

namespace recourse {

EmpiricalCdf EmpiricalCdf::fit(const Dataset& ds) {
  if (ds.rows.empty()) throw ConfigError("cdf: empty dataset");
  EmpiricalCdf cdf;
  cdf.n_ = ds.rows.size();
  cdf.sorted_.resize(ds.schema.features.size());
  for (std::size_t j = 0; j < ds.schema.features.size(); ++j) {
    if (ds.schema.features[j].kind != FeatureKind::numeric) continue;
    auto& col = cdf.sorted_[j];
    col.reserve(ds.rows.size());
    for (const auto& row : ds.rows) col.push_back(row[j]);
    std::sort(col.begin(), col.end());
  }
  return cdf;
}

EmpiricalCdf EmpiricalCdf::from_columns(std::vector<std::vector<double>> columns, std::size_t n) {
  if (n == 0) throw ConfigError("cdf: sample count must be positive");
  for (const auto& col : columns)
    if (!col.empty() && col.size() != n)
      throw ConfigError("cdf: persisted column length disagrees with the sample count");
  EmpiricalCdf cdf;
  cdf.sorted_ = std::move(columns);
  cdf.n_ = n;
  return cdf;
}

double EmpiricalCdf::at(int feature, double v) const {
  const auto& col = sorted_[static_cast<std::size_t>(feature)];
  if (col.empty()) throw RuntimeError("cdf: feature is not numeric");
  auto it = std::upper_bound(col.begin(), col.end(), v);
  return static_cast<double>(it - col.begin()) / static_cast<double>(n_);
}

int FeatureBinning::bin_of(double v) const {
  if (degenerate()) return 0;
  double rel = (v - lo) / width;
  int b = static_cast<int>(std::floor(rel));
  if (b < 0) b = 0;
  if (b > bins - 1) b = bins - 1;
  return b;
}

Binning Binning::fit(const Dataset& ds) {
  if (ds.rows.empty()) throw ConfigError("binning: empty dataset");
  Binning binning;
  binning.per_feature.resize(ds.schema.features.size());
  for (std::size_t j = 0; j < ds.schema.features.size(); ++j) {
    const FeatureSpec& f = ds.schema.features[j];
    if (f.kind != FeatureKind::numeric) continue;
    double lo = ds.rows[0][j];
    double hi = lo;
    for (const auto& row : ds.rows) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    FeatureBinning fb;
    fb.lo = lo;
    fb.bins = f.bins;
    fb.width = (hi - lo) / static_cast<double>(f.bins);
    binning.per_feature[j] = fb;
  }
  return binning;
}

}  // namespace recourse
