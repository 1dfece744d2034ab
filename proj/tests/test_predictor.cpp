#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/errors.hpp"
#include "recourse/predictor.hpp"
#include "recourse/rng.hpp"
#include "support.hpp"

using recourse::ConfigError;
using recourse::Dataset;
using recourse::Instance;
using testsupport::TempDir;

namespace {

// 400-row labeled dataset, linearly separable on income with a little slack.
Dataset separable_dataset(std::uint64_t seed) {
  Dataset ds;
  ds.schema = recourse::FeatureSchema::from_json(testsupport::demo_schema_json());
  recourse::SplitMix64 rng(seed);
  for (int i = 0; i < 400; ++i) {
    double income = rng.range(0.0, 9000.0);
    double age = rng.range(20.0, 70.0);
    double job = static_cast<double>(rng.below(3));
    double home = rng.chance(0.5) ? 1.0 : 0.0;
    ds.rows.push_back({income, age, job, home});
    ds.labels.push_back(income >= 4500.0 ? 1 : 0);
  }
  return ds;
}

}  // namespace

TEST_CASE("logistic training is deterministic and fits separable data") {
  Dataset ds = separable_dataset(31);
  recourse::LogisticConfig cfg;
  auto f1 = recourse::train_logistic(ds, cfg);
  auto f2 = recourse::train_logistic(ds, cfg);
  auto p1 = f1->predict(ds.rows);
  auto p2 = f2->predict(ds.rows);
  CHECK(p1 == p2);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (p1[i] == ds.labels[i]) ++correct;
  CHECK(static_cast<double>(correct) / static_cast<double>(ds.size()) > 0.9);
}

TEST_CASE("logistic refuses unlabeled or single-class data") {
  Dataset ds = separable_dataset(32);
  Dataset unlabeled = ds;
  unlabeled.labels.clear();
  CHECK_THROWS_AS(recourse::train_logistic(unlabeled, {}), ConfigError);
  Dataset single = ds;
  for (auto& y : single.labels) y = 1;
  CHECK_THROWS_AS(recourse::train_logistic(single, {}), ConfigError);
}

TEST_CASE("logistic serializes and reloads to identical predictions") {
  Dataset ds = separable_dataset(33);
  auto f = recourse::train_logistic(ds, {});
  auto j = f->to_json();
  CHECK(j.at("type") == "logistic");
  auto back = recourse::predictor_from_json(j, ds.schema);
  CHECK(back->predict(ds.rows) == f->predict(ds.rows));
}

TEST_CASE("rule predictor: first match wins, all ops work") {
  Dataset ds = testsupport::demo_dataset();
  auto spec = nlohmann::json::parse(R"({
    "default": 0,
    "rules": [
      {"if": [{"feature": "job", "op": "==", "value": "skilled"},
              {"feature": "owns_home", "op": "==", "value": 1}], "then": 1},
      {"if": [{"feature": "income", "op": ">=", "value": 6000}], "then": 1},
      {"if": [{"feature": "age", "op": "<", "value": 30}], "then": 0},
      {"if": [{"feature": "income", "op": ">", "value": 4000}], "then": 1}
    ]
  })");
  auto f = recourse::rule_predictor_from_json(spec, ds.schema);
  auto p = f->predict(ds.rows);
  // row 3: skilled + owns_home -> rule 1. row 4: income 7400 -> rule 2.
  // row 7: income 6500 -> rule 2. row 2 (age 29): rule 3 fires 0 before
  // rule 4 could say 1. rows 0,1,6: default/ranges -> 0.
  CHECK(p == std::vector<int>{0, 0, 0, 1, 1, 1, 0, 1});

  auto round = recourse::predictor_from_json(f->to_json(), ds.schema);
  CHECK(round->predict(ds.rows) == p);
}

TEST_CASE("rule predictor rejects malformed specs") {
  Dataset ds = testsupport::demo_dataset();
  auto unknown_feature = nlohmann::json::parse(
      R"({"default": 0, "rules": [{"if": [{"feature": "nope", "op": "<", "value": 1}], "then": 1}]})");
  CHECK_THROWS_AS(recourse::rule_predictor_from_json(unknown_feature, ds.schema), ConfigError);
  auto bad_op = nlohmann::json::parse(
      R"({"default": 0, "rules": [{"if": [{"feature": "income", "op": "~", "value": 1}], "then": 1}]})");
  CHECK_THROWS_AS(recourse::rule_predictor_from_json(bad_op, ds.schema), ConfigError);
  auto bad_category = nlohmann::json::parse(
      R"({"default": 0, "rules": [{"if": [{"feature": "job", "op": "==", "value": "wizard"}], "then": 1}]})");
  CHECK_THROWS_AS(recourse::rule_predictor_from_json(bad_category, ds.schema), ConfigError);
  auto directional_category = nlohmann::json::parse(
      R"({"default": 0, "rules": [{"if": [{"feature": "job", "op": "<", "value": "basic"}], "then": 1}]})");
  CHECK_THROWS_AS(recourse::rule_predictor_from_json(directional_category, ds.schema), ConfigError);
}

TEST_CASE("compute_affected returns adverse rows ascending") {
  Dataset ds = testsupport::demo_dataset();
  auto spec = nlohmann::json::parse(
      R"({"default": 1, "rules": [{"if": [{"feature": "income", "op": "<", "value": 5000}], "then": 0}]})");
  auto f = recourse::rule_predictor_from_json(spec, ds.schema);
  auto affected = recourse::compute_affected(ds, *f);
  CHECK(affected == std::vector<std::uint32_t>{0, 1, 2, 6});
}

TEST_CASE("external predictor speaks the line protocol") {
  if (std::system("python3 -c '' >/dev/null 2>&1") != 0) return;  // no interpreter, skip

  TempDir tmp;
  testsupport::write_file(tmp.file("clf.py"), R"(import sys
while True:
    header = sys.stdin.readline()
    if not header:
        break
    cols = header.rstrip("\n").split(",")
    idx = cols.index("income")
    rows = []
    while True:
        line = sys.stdin.readline()
        if not line:
            sys.exit(0)
        line = line.rstrip("\n")
        if line == "":
            break
        rows.append(line)
    for r in rows:
        v = float(r.split(",")[idx])
        sys.stdout.write("1\n" if v >= 5000.0 else "0\n")
    sys.stdout.flush()
)");

  Dataset ds = testsupport::demo_dataset();
  auto f = recourse::make_external_predictor("python3 " + tmp.file("clf.py"), ds.schema);
  auto p = f->predict(ds.rows);
  CHECK(p == std::vector<int>{0, 0, 0, 1, 1, 1, 0, 1});
  // Second conversation over the same child.
  CHECK(f->predict({ds.rows[0], ds.rows[5]}) == std::vector<int>{0, 1});
  CHECK(f->to_json().at("type") == "external");
}

TEST_CASE("external predictor surfaces child failures with stderr") {
  if (std::system("python3 -c '' >/dev/null 2>&1") != 0) return;

  TempDir tmp;
  testsupport::write_file(tmp.file("boom.py"),
                          "import sys\nsys.stderr.write(\"model exploded\\n\")\nsys.exit(3)\n");
  Dataset ds = testsupport::demo_dataset();
  auto f = recourse::make_external_predictor("python3 " + tmp.file("boom.py"), ds.schema);
  CHECK_THROWS_WITH_AS(f->predict(ds.rows), doctest::Contains("model exploded"),
                       recourse::RuntimeError);
}
