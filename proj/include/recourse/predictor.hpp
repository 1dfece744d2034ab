#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "recourse/schema.hpp"

namespace recourse {

// A fixed binary classifier f. 1 is the favorable outcome; instances with
// f(x) == 0 form the affected population that recourse summaries cover.
// Implementations must be deterministic and safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<int> predict(const std::vector<Instance>& batch) const = 0;
  virtual std::string name() const = 0;
  // Self-describing serialization; predictor_from_json inverts it. Lets a
  // solve artifact carry its classifier, so held-out evaluation reuses the
  // exact model instead of refitting one.
  virtual nlohmann::ordered_json to_json() const = 0;
};

std::unique_ptr<Predictor> predictor_from_json(const nlohmann::json& j,
                                               const FeatureSchema& schema);

struct LogisticConfig {
  double learning_rate = 0.5;
  int epochs = 300;
  std::uint64_t seed = 1;
};

// Full-batch gradient descent on standardized numerics + one-hot
// categoricals. A stand-in model: auditing the solver needs a fixed f, not
// a strong one. Deterministic under a fixed seed. Throws ConfigError when
// the dataset is unlabeled or the labels are single-class.
std::unique_ptr<Predictor> train_logistic(const Dataset& ds, const LogisticConfig& cfg);

// First-match rule list from a JSON file:
//   {"default": 1, "rules": [{"if": [{"feature": "income", "op": "<",
//    "value": 4000}, ...], "then": 0}, ...]}
// Ops: <, <=, >, >= (numeric), ==, != (any kind; categorical values are
// category strings).
std::unique_ptr<Predictor> load_rule_predictor(const std::string& path,
                                               const FeatureSchema& schema);
std::unique_ptr<Predictor> rule_predictor_from_json(const nlohmann::json& j,
                                                    const FeatureSchema& schema);

// Wraps an external process. Protocol, one conversation per predict() call,
// conversations serialized by an internal mutex:
//   parent -> child: CSV header, one CSV row per instance, one blank line;
//   child -> parent: one line per instance, each "0" or "1".
// The child is spawned on first use via /bin/sh -c <command> and must flush
// after every batch. Nonzero exit, malformed output, or a short read raise
// RuntimeError including captured stderr.
std::unique_ptr<Predictor> make_external_predictor(const std::string& command,
                                                   const FeatureSchema& schema);

// Indices of instances the predictor classifies adversely (f(x) == 0),
// ascending. Prediction is batched once over the whole dataset.
std::vector<std::uint32_t> compute_affected(const Dataset& ds, const Predictor& f);

}  // namespace recourse
