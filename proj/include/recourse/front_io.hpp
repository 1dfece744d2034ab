#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/cdf.hpp"
#include "recourse/evaluate.hpp"
#include "recourse/solver.hpp"

namespace recourse {

// The self-contained solve artifact: schema, classifier, training cost
// model, archived values and portable trees. Held-out evaluation and
// audits reload all of it from the one file and refit nothing.
// Deliberately free of timing, seeds and thread counts: solving the same
// problem twice must serialize byte-identically.
struct FrontDocument {
  int format_version = 1;
  FeatureSchema schema;
  std::uint64_t schema_fp = 0;
  nlohmann::ordered_json predictor;
  SolveStatus status = SolveStatus::complete;
  std::size_t n_affected = 0;
  std::size_t cdf_n = 0;
  std::vector<std::vector<double>> cdf_columns;  // empty for non-numeric features
  std::vector<FeatureBinning> binning;
  PortableFront front;

  EmpiricalCdf rebuild_cdf() const { return EmpiricalCdf::from_columns(cdf_columns, cdf_n); }
  Binning rebuild_binning() const { return Binning{binning}; }
};

std::string solve_status_name(SolveStatus s);
SolveStatus solve_status_from_name(const std::string& name);

nlohmann::ordered_json front_to_json(const FrontDocument& doc);

// Validates the format version and that the stored fingerprint matches the
// embedded schema; a tampered or stitched-together file is refused.
FrontDocument front_from_json(const nlohmann::ordered_json& j);

void write_front_file(const std::string& path, const FrontDocument& doc);
FrontDocument read_front_file(const std::string& path);

}  // namespace recourse
