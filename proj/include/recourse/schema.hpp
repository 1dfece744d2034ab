#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace recourse {

/**
 * @brief Feature typing and mutability metadata for a tabular dataset.
 *
 * Three feature kinds are supported:
 *  - numeric: real-valued, discretized into equal-width bins for both the
 *    split predicates and the action space;
 *  - categorical: a fixed category vocabulary, stored as category indices;
 *  - binary: 0/1.
 *
 * Actionability controls which edits the action generator may emit for a
 * feature. Directional constraints (increase_only / decrease_only) are only
 * meaningful for numeric features and are rejected elsewhere.
 */
enum class FeatureKind { numeric, categorical, binary };
enum class Actionability { free, immutable, increase_only, decrease_only };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  Actionability actionability = Actionability::free;

  /// Number of equal-width bins (numeric only), >= 2.
  int bins = 10;
  /// True when the schema file set "bins" explicitly; the CLI --bins
  /// override only applies to features that did not.
  bool bins_explicit = false;
  /// Largest admissible |delta| for shift_bins edits (numeric only).
  /// -1 means unrestricted, i.e. bins - 1.
  int max_bin_shift = -1;
  /// Category vocabulary (categorical only), order defines the index coding.
  std::vector<std::string> categories;

  int effective_max_shift() const { return max_bin_shift < 0 ? bins - 1 : max_bin_shift; }
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;
  /// Name of the label column in CSVs, empty when unlabeled.
  std::string label_column;

  /// Index of the named feature, -1 when absent.
  int feature_index(const std::string& name) const;

  /// Throws ConfigError on duplicate names, bad bin counts, empty or
  /// duplicate category vocabularies, or directional non-numeric features.
  void validate() const;

  static FeatureSchema from_json(const nlohmann::json& j);
  static FeatureSchema from_json_file(const std::string& path);
  /// Canonical form: field order fixed, defaults materialized. Used both
  /// for schema files written by gen-synth and for cache fingerprints.
  nlohmann::ordered_json to_json() const;
};

/**
 * Instances store every feature as a double: numerics raw, categoricals as
 * category index, binaries as 0/1. Rendering back to strings goes through
 * the schema.
 */
using Instance = std::vector<double>;

struct Dataset {
  FeatureSchema schema;
  std::vector<Instance> rows;
  /// Empty, or one 0/1 label per row.
  std::vector<int> labels;

  std::size_t size() const { return rows.size(); }
  bool has_labels() const { return !labels.empty(); }
};

/**
 * @brief Loads a CSV against a schema.
 *
 * The header must contain every schema feature by name (any column order);
 * the schema's label column is read when present. Extra columns are an
 * error, as are unparsable numerics, unknown categories, or non-0/1
 * binaries; messages name the row and column. Throws ConfigError.
 */
Dataset load_dataset(const std::string& csv_path, const FeatureSchema& schema);

/// Writes features (+ label column when labeled) in schema order.
void write_dataset_csv(const std::string& path, const Dataset& ds);

/// One CSV cell for feature value v under spec f.
std::string render_value(const FeatureSpec& f, double v);

/// 64-bit FNV-1a over the canonical schema JSON, for cache fingerprints.
std::uint64_t schema_fingerprint(const FeatureSchema& schema);

}  // namespace recourse
