#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "recourse/errors.hpp"
#include "recourse/predictor.hpp"
#include "recourse/synth.hpp"
#include "support.hpp"

using recourse::Dataset;

namespace {

nlohmann::json base_spec() {
  return nlohmann::json::parse(R"({
    "rows": 300, "seed": 17, "label_column": "y", "noise": 0.0,
    "numeric": [
      {"name": "income", "min": 0, "max": 9000, "bins": 8, "max_bin_shift": 3,
       "actionability": "increase_only"},
      {"name": "age", "min": 18, "max": 80, "actionability": "immutable",
       "distribution": "normal", "mean": 40, "sd": 12}
    ],
    "categorical": [
      {"name": "job", "categories": ["none", "basic", "skilled"],
       "weights": [0.2, 0.5, 0.3], "actionability": "free"}
    ],
    "binary": [
      {"name": "owns_home", "p": 0.35, "actionability": "free"}
    ],
    "rule": {"default": 0, "rules": [
      {"if": [{"feature": "income", "op": ">=", "value": 5000}], "then": 1}
    ]}
  })");
}

}  // namespace

TEST_CASE("generation is reproducible and seed-sensitive") {
  auto a = recourse::generate_synthetic(base_spec());
  auto b = recourse::generate_synthetic(base_spec());
  REQUIRE(a.data.size() == 300);
  CHECK(a.data.labels == b.data.labels);
  for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data.rows[i] == b.data.rows[i]);

  auto spec2 = base_spec();
  spec2["seed"] = 18;
  auto c = recourse::generate_synthetic(spec2);
  bool all_equal = true;
  for (std::size_t i = 0; i < a.data.size() && all_equal; ++i)
    all_equal = (a.data.rows[i] == c.data.rows[i]);
  CHECK_FALSE(all_equal);
}

TEST_CASE("schema comes out with the requested shapes and bounds hold") {
  auto r = recourse::generate_synthetic(base_spec());
  const auto& s = r.data.schema;
  REQUIRE(s.features.size() == 4);
  CHECK(s.label_column == "y");
  CHECK(s.features[0].kind == recourse::FeatureKind::numeric);
  CHECK(s.features[0].bins == 8);
  CHECK(s.features[0].max_bin_shift == 3);
  CHECK(s.features[1].actionability == recourse::Actionability::immutable);
  CHECK(s.features[2].categories.size() == 3);
  CHECK(s.features[3].kind == recourse::FeatureKind::binary);

  for (const auto& x : r.data.rows) {
    CHECK(x[0] >= 0.0);
    CHECK(x[0] <= 9000.0);
    CHECK(x[1] >= 18.0);   // normal draws are clamped into [min, max]
    CHECK(x[1] <= 80.0);
    CHECK(x[2] >= 0.0);
    CHECK(x[2] <= 2.0);
    CHECK((x[3] == 0.0 || x[3] == 1.0));
  }
}

TEST_CASE("labels follow the embedded rule exactly at zero noise") {
  auto r = recourse::generate_synthetic(base_spec());
  auto f = recourse::rule_predictor_from_json(r.rule_json, r.data.schema);
  auto p = f->predict(r.data.rows);
  REQUIRE(p.size() == r.data.labels.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == r.data.labels[i]);
}

TEST_CASE("noise flips roughly the requested label fraction") {
  auto spec = base_spec();
  spec["rows"] = 4000;
  spec["noise"] = 0.3;
  auto r = recourse::generate_synthetic(spec);
  auto f = recourse::rule_predictor_from_json(r.rule_json, r.data.schema);
  auto clean = f->predict(r.data.rows);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (clean[i] != r.data.labels[i]) ++flips;
  double rate = static_cast<double>(flips) / static_cast<double>(clean.size());
  CHECK(rate > 0.25);
  CHECK(rate < 0.35);
}

TEST_CASE("category weights are respected, zero weight never drawn") {
  auto spec = base_spec();
  spec["rows"] = 3000;
  spec["categorical"][0]["weights"] = {0.0, 0.5, 0.5};
  auto r = recourse::generate_synthetic(spec);
  std::size_t none_count = 0, basic_count = 0;
  for (const auto& x : r.data.rows) {
    if (x[2] == 0.0) ++none_count;
    if (x[2] == 1.0) ++basic_count;
  }
  CHECK(none_count == 0);
  double basic_rate = static_cast<double>(basic_count) / 3000.0;
  CHECK(basic_rate > 0.44);
  CHECK(basic_rate < 0.56);
}

TEST_CASE("bad specs are rejected") {
  auto no_rows = base_spec();
  no_rows["rows"] = 0;
  CHECK_THROWS_AS(recourse::generate_synthetic(no_rows), recourse::ConfigError);

  auto bad_noise = base_spec();
  bad_noise["noise"] = 0.7;
  CHECK_THROWS_AS(recourse::generate_synthetic(bad_noise), recourse::ConfigError);

  auto bad_weights = base_spec();
  bad_weights["categorical"][0]["weights"] = {0.5};
  CHECK_THROWS_AS(recourse::generate_synthetic(bad_weights), recourse::ConfigError);

  auto no_rule = base_spec();
  no_rule.erase("rule");
  CHECK_THROWS_AS(recourse::generate_synthetic(no_rule), recourse::ConfigError);

  auto bad_dist = base_spec();
  bad_dist["numeric"][1]["distribution"] = "cauchy";
  CHECK_THROWS_AS(recourse::generate_synthetic(bad_dist), recourse::ConfigError);

  auto bad_range = base_spec();
  bad_range["numeric"][0]["min"] = 9000;
  bad_range["numeric"][0]["max"] = 0;
  CHECK_THROWS_AS(recourse::generate_synthetic(bad_range), recourse::ConfigError);
}
