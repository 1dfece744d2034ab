#pragma once

#include <json.hpp>

#include "recourse/schema.hpp"

namespace recourse {

// Seeded synthetic populations for tests and demos. The spec document is
// JSON:
//
//   {
//     "rows": 400, "seed": 7, "label_column": "outcome", "noise": 0.05,
//     "numeric": [{"name": "income", "min": 0, "max": 9000, "bins": 10,
//                  "max_bin_shift": 4, "actionability": "increase_only",
//                  "distribution": "uniform"}, ...],
//     "categorical": [{"name": "job", "categories": ["none", "skilled"],
//                      "weights": [0.4, 0.6], "actionability": "free"}],
//     "binary": [{"name": "owns_home", "p": 0.35,
//                 "actionability": "immutable"}],
//     "rule": {"default": 1, "rules": [...]}
//   }
//
// Numeric distributions: "uniform" over [min, max] (default) or "normal"
// with "mean"/"sd", clamped to [min, max]. Labels come from the embedded
// rule list, each flipped independently with probability `noise`. The
// rule document doubles as the generated population's ground-truth
// predictor, which makes minimal recourse analytically computable for
// single-threshold rules.
struct SynthResult {
  Dataset data;
  nlohmann::json rule_json;
};

SynthResult generate_synthetic(const nlohmann::json& spec);

}  // namespace recourse
