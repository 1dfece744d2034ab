#include "recourse/synth.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "recourse/errors.hpp"
#include "recourse/predictor.hpp"
#include "recourse/rng.hpp"

namespace recourse {

namespace {

// Per-feature draw recipe, parallel to the schema's feature order. One RNG
// draw sequence per row, features in schema order, then one noise draw per
// row: the whole population is a pure function of the spec.
struct DrawPlan {
  // numeric
  double lo = 0.0, hi = 1.0, mean = 0.0, sd = 1.0;
  bool normal_dist = false;
  // categorical
  std::vector<double> cumulative;
  // binary
  double p = 0.5;
};

double require_number(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("synth: " + where + " needs a numeric '" + key + "'");
  return j[key].get<double>();
}

}  // namespace

SynthResult generate_synthetic(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("synth: spec must be a JSON object");
  long long rows = spec.value("rows", 0LL);
  if (rows < 1) throw ConfigError("synth: 'rows' must be >= 1");
  double noise = spec.value("noise", 0.0);
  if (noise < 0.0 || noise > 0.5) throw ConfigError("synth: 'noise' must be in [0, 0.5]");
  if (!spec.contains("rule")) throw ConfigError("synth: missing 'rule' predictor document");
  auto seed = spec.value("seed", std::uint64_t{1});

  nlohmann::ordered_json sj;
  sj["label_column"] = spec.value("label_column", std::string("label"));
  sj["features"] = nlohmann::ordered_json::array();
  std::vector<DrawPlan> plans;

  for (const auto& jf : spec.value("numeric", nlohmann::json::array())) {
    nlohmann::ordered_json out;
    out["name"] = jf.value("name", std::string());
    out["kind"] = "numeric";
    out["actionability"] = jf.value("actionability", std::string("free"));
    if (jf.contains("bins")) out["bins"] = jf["bins"];
    if (jf.contains("max_bin_shift")) out["max_bin_shift"] = jf["max_bin_shift"];
    sj["features"].push_back(out);

    DrawPlan plan;
    plan.lo = require_number(jf, "min", "numeric feature");
    plan.hi = require_number(jf, "max", "numeric feature");
    if (!(plan.lo < plan.hi))
      throw ConfigError("synth: numeric feature needs min < max");
    std::string dist = jf.value("distribution", std::string("uniform"));
    if (dist == "normal") {
      plan.normal_dist = true;
      plan.mean = jf.value("mean", (plan.lo + plan.hi) / 2.0);
      plan.sd = jf.value("sd", (plan.hi - plan.lo) / 6.0);
      if (plan.sd <= 0.0) throw ConfigError("synth: normal feature needs sd > 0");
    } else if (dist != "uniform") {
      throw ConfigError("synth: unknown distribution '" + dist + "'");
    }
    plans.push_back(plan);
  }

  for (const auto& jf : spec.value("categorical", nlohmann::json::array())) {
    nlohmann::ordered_json out;
    out["name"] = jf.value("name", std::string());
    out["kind"] = "categorical";
    out["actionability"] = jf.value("actionability", std::string("free"));
    if (!jf.contains("categories")) throw ConfigError("synth: categorical feature needs categories");
    out["categories"] = jf["categories"];
    sj["features"].push_back(out);

    DrawPlan plan;
    std::size_t k = jf["categories"].size();
    std::vector<double> weights(k, 1.0);
    if (jf.contains("weights")) {
      weights = jf["weights"].get<std::vector<double>>();
      if (weights.size() != k)
        throw ConfigError("synth: weights and categories differ in length");
    }
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw ConfigError("synth: negative category weight");
      total += w;
    }
    if (total <= 0.0) throw ConfigError("synth: category weights sum to zero");
    double cum = 0.0;
    for (double w : weights) {
      cum += w / total;
      plan.cumulative.push_back(cum);
    }
    plan.cumulative.back() = 1.0;  // guard against rounding
    plans.push_back(plan);
  }

  for (const auto& jf : spec.value("binary", nlohmann::json::array())) {
    nlohmann::ordered_json out;
    out["name"] = jf.value("name", std::string());
    out["kind"] = "binary";
    out["actionability"] = jf.value("actionability", std::string("free"));
    sj["features"].push_back(out);

    DrawPlan plan;
    plan.p = jf.value("p", 0.5);
    if (plan.p < 0.0 || plan.p > 1.0) throw ConfigError("synth: binary 'p' must be in [0, 1]");
    plans.push_back(plan);
  }

  SynthResult result;
  result.data.schema = FeatureSchema::from_json(sj);
  result.rule_json = spec.at("rule");
  const auto& features = result.data.schema.features;

  SplitMix64 rng(seed);
  result.data.rows.reserve(static_cast<std::size_t>(rows));
  for (long long r = 0; r < rows; ++r) {
    Instance x(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) {
      const DrawPlan& plan = plans[j];
      switch (features[j].kind) {
        case FeatureKind::numeric:
          x[j] = plan.normal_dist
                     ? std::clamp(plan.mean + plan.sd * rng.normal(), plan.lo, plan.hi)
                     : rng.range(plan.lo, plan.hi);
          break;
        case FeatureKind::categorical: {
          double u = rng.unit();
          std::size_t c = 0;
          while (u >= plan.cumulative[c]) ++c;
          x[j] = static_cast<double>(c);
          break;
        }
        case FeatureKind::binary:
          x[j] = rng.chance(plan.p) ? 1.0 : 0.0;
          break;
      }
    }
    result.data.rows.push_back(std::move(x));
  }

  auto rule = rule_predictor_from_json(result.rule_json, result.data.schema);
  std::vector<int> clean = rule->predict(result.data.rows);
  result.data.labels.resize(result.data.rows.size());
  for (std::size_t r = 0; r < result.data.rows.size(); ++r) {
    bool flip = rng.chance(noise);
    result.data.labels[r] = flip ? 1 - clean[r] : clean[r];
  }
  return result;
}

}  // namespace recourse
