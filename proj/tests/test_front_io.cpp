#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "recourse/binarize.hpp"
#include "recourse/cache.hpp"
#include "recourse/errors.hpp"
#include "recourse/front_io.hpp"
#include "recourse/predictor.hpp"
#include "recourse/solver.hpp"
#include "recourse/threading.hpp"
#include "support.hpp"

using recourse::Binning;
using recourse::Dataset;
using recourse::EmpiricalCdf;
using recourse::FrontDocument;
using recourse::ThreadPool;
using testsupport::TempDir;

namespace {

FrontDocument demo_document() {
  Dataset ds = testsupport::demo_dataset();
  auto spec = nlohmann::json::parse(
      R"({"default": 1, "rules": [{"if": [{"feature": "income", "op": "<", "value": 5000}], "then": 0}]})");
  auto f = recourse::rule_predictor_from_json(spec, ds.schema);
  auto cdf = EmpiricalCdf::fit(ds);
  auto binning = Binning::fit(ds);
  auto affected = recourse::compute_affected(ds, *f);
  auto actions = recourse::generate_action_set(ds.schema, 2, 1u << 20);
  auto view = recourse::binarize(ds, affected, binning);
  ThreadPool pool(1);
  auto cache = recourse::build_cache(ds, affected, actions, *f, cdf, binning, pool, 1u << 30);
  recourse::SolverConfig cfg;
  cfg.max_depth = 1;
  auto result = recourse::solve(cache, view, cfg, pool);

  FrontDocument doc;
  doc.schema = ds.schema;
  doc.schema_fp = recourse::schema_fingerprint(ds.schema);
  doc.predictor = f->to_json();
  doc.status = result.status;
  doc.n_affected = affected.size();
  doc.cdf_n = cdf.n();
  doc.cdf_columns = cdf.columns();
  doc.binning = binning.per_feature;
  for (const auto& e : result.front)
    doc.front.push_back({e.value, recourse::materialize(*e.tree, view, actions)});
  return doc;
}

}  // namespace

TEST_CASE("front document survives a file round trip") {
  FrontDocument doc = demo_document();
  TempDir tmp;
  recourse::write_front_file(tmp.file("front.json"), doc);
  FrontDocument back = recourse::read_front_file(tmp.file("front.json"));

  CHECK(back.format_version == 1);
  CHECK(back.schema_fp == doc.schema_fp);
  CHECK(back.status == doc.status);
  CHECK(back.n_affected == doc.n_affected);
  REQUIRE(back.front.size() == doc.front.size());
  for (std::size_t i = 0; i < doc.front.size(); ++i) {
    CHECK(back.front[i].value.cost == doc.front[i].value.cost);
    CHECK(back.front[i].value.loss == doc.front[i].value.loss);
    CHECK(back.front[i].tree.nodes.size() == doc.front[i].tree.nodes.size());
  }
  CHECK(back.cdf_columns == doc.cdf_columns);
  REQUIRE(back.binning.size() == doc.binning.size());
  for (std::size_t j = 0; j < doc.binning.size(); ++j) {
    CHECK(back.binning[j].lo == doc.binning[j].lo);
    CHECK(back.binning[j].width == doc.binning[j].width);
    CHECK(back.binning[j].bins == doc.binning[j].bins);
  }

  // The embedded predictor reloads and still predicts.
  auto f = recourse::predictor_from_json(back.predictor, back.schema);
  Dataset ds = testsupport::demo_dataset();
  CHECK(f->predict(ds.rows).size() == ds.size());

  // Serialization is deterministic: writing the reloaded document again
  // yields identical bytes.
  recourse::write_front_file(tmp.file("again.json"), back);
  CHECK(testsupport::read_file(tmp.file("again.json")) ==
        testsupport::read_file(tmp.file("front.json")));
}

TEST_CASE("tampered schema fingerprint is refused") {
  FrontDocument doc = demo_document();
  auto j = recourse::front_to_json(doc);
  j["schema"]["features"][0]["bins"] = 12;  // fingerprint now disagrees
  CHECK_THROWS_AS(recourse::front_from_json(j), recourse::RuntimeError);
}

TEST_CASE("wrong version and malformed documents are refused") {
  FrontDocument doc = demo_document();
  auto j = recourse::front_to_json(doc);
  j["format_version"] = 99;
  CHECK_THROWS_AS(recourse::front_from_json(j), recourse::RuntimeError);

  auto k = recourse::front_to_json(doc);
  k.erase("cost_model");
  CHECK_THROWS_AS(recourse::front_from_json(k), recourse::RuntimeError);

  CHECK_THROWS_AS(recourse::read_front_file("/nonexistent/front.json"), recourse::RuntimeError);
}

TEST_CASE("status names round trip") {
  for (auto s : {recourse::SolveStatus::complete, recourse::SolveStatus::timed_out,
                 recourse::SolveStatus::infeasible})
    CHECK(recourse::solve_status_from_name(recourse::solve_status_name(s)) == s);
  CHECK_THROWS_AS(recourse::solve_status_from_name("finished"), recourse::RuntimeError);
}
