#include "recourse/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "recourse/action.hpp"
#include "recourse/binarize.hpp"
#include "recourse/cache.hpp"
#include "recourse/cdf.hpp"
#include "recourse/csv.hpp"
#include "recourse/errors.hpp"
#include "recourse/evaluate.hpp"
#include "recourse/front_io.hpp"
#include "recourse/predictor.hpp"
#include "recourse/schema.hpp"
#include "recourse/solver.hpp"
#include "recourse/synth.hpp"
#include "recourse/threading.hpp"
#include "recourse/tree.hpp"

namespace recourse {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kActionCap = 2'000'000;
constexpr std::size_t kCacheMemoryCap = std::size_t{4} << 30;  // 4 GiB

// "30" or "30s" are seconds, "2m" minutes, "0" disables the deadline.
double parse_timeout(const std::string& s) {
  if (s.empty()) throw ConfigError("--timeout: empty value");
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  std::string suffix(end);
  double scale = 1.0;
  if (suffix == "m")
    scale = 60.0;
  else if (!suffix.empty() && suffix != "s")
    throw ConfigError("--timeout: expected seconds, e.g. '30', '30s' or '2m'");
  if (v < 0 || end == s.c_str()) throw ConfigError("--timeout: malformed value '" + s + "'");
  return v * scale;
}

std::unique_ptr<Predictor> make_predictor(const std::string& spec, const Dataset& ds,
                                          std::uint64_t seed) {
  if (spec == "logistic") {
    LogisticConfig cfg;
    cfg.seed = seed;
    return train_logistic(ds, cfg);
  }
  if (spec.rfind("rules:", 0) == 0) return load_rule_predictor(spec.substr(6), ds.schema);
  if (spec.rfind("exec:", 0) == 0) return make_external_predictor(spec.substr(5), ds.schema);
  throw ConfigError("--predictor must be 'logistic', 'rules:PATH' or 'exec:COMMAND'");
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeError("short write on " + path.string());
}

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string(what) + ": cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + ": " + path + ": " + e.what());
  }
  return j;
}

struct SolveArgs {
  std::string data, schema, out;
  std::string predictor = "logistic";
  std::string timeout = "0";
  int depth = 3;
  int max_nodes = -1;
  int min_leaf = 1;
  int sparsity = 3;
  int threads = 1;
  int bins = 0;  // 0: keep schema bin counts
  std::uint64_t seed = 1;
};

int cmd_solve(const SolveArgs& a) {
  FeatureSchema schema = FeatureSchema::from_json_file(a.schema);
  if (a.bins != 0) {
    if (a.bins < 2) throw ConfigError("--bins must be >= 2");
    // The override respects per-feature bin counts the schema pinned down.
    for (auto& f : schema.features)
      if (f.kind == FeatureKind::numeric && !f.bins_explicit) f.bins = a.bins;
  }
  Dataset ds = load_dataset(a.data, schema);
  if (ds.rows.empty()) throw ConfigError("solve: dataset is empty");

  SolverConfig cfg;
  cfg.max_depth = a.depth;
  cfg.max_nodes = a.max_nodes;
  cfg.min_leaf = a.min_leaf;
  cfg.timeout_seconds = parse_timeout(a.timeout);
  cfg.threads = a.threads;
  cfg.validate();

  std::unique_ptr<Predictor> f = make_predictor(a.predictor, ds, a.seed);
  std::vector<std::uint32_t> affected = compute_affected(ds, *f);
  std::cout << "affected: " << affected.size() << " of " << ds.rows.size() << " instances\n";

  fs::create_directories(a.out);
  nlohmann::ordered_json stats;
  stats["config"] = {{"data", a.data},         {"schema", a.schema},
                     {"predictor", a.predictor}, {"depth", a.depth},
                     {"max_nodes", a.max_nodes}, {"min_leaf", a.min_leaf},
                     {"sparsity", a.sparsity},   {"timeout", a.timeout},
                     {"threads", a.threads},     {"bins", a.bins},
                     {"seed", a.seed}};
  stats["n_instances"] = ds.rows.size();
  stats["n_affected"] = affected.size();

  if (affected.size() < static_cast<std::size_t>(a.min_leaf)) {
    stats["status"] = solve_status_name(SolveStatus::infeasible);
    write_text_file(fs::path(a.out) / "stats.json", stats.dump(2) + "\n");
    std::cerr << "infeasible: " << affected.size() << " affected instances cannot fill a leaf of "
              << a.min_leaf << "\n";
    return 3;
  }

  ThreadPool pool(static_cast<unsigned>(a.threads));
  EmpiricalCdf cdf = EmpiricalCdf::fit(ds);
  Binning binning = Binning::fit(ds);
  BinarizedView view = binarize(ds, affected, binning);
  std::vector<Action> actions = generate_action_set(ds.schema, a.sparsity, kActionCap);
  CacheMatrix cache = build_cache(ds, affected, actions, *f, cdf, binning, pool, kCacheMemoryCap);
  std::cout << "actions: " << actions.size() << ", predicates: " << view.predicates.size()
            << ", cache: " << cache.byte_size() / (1024 * 1024) << " MiB\n";

  SolveResult res = solve(cache, view, cfg, pool);

  stats["status"] = solve_status_name(res.status);
  stats["n_actions"] = actions.size();
  stats["n_predicates"] = view.predicates.size();
  stats["cache_bytes"] = cache.byte_size();
  stats["front_size"] = res.front.size();
  stats["subproblems"] = res.stats.subproblems;
  stats["memo_hits"] = res.stats.memo_hits;
  stats["pruned"] = res.stats.pruned;
  stats["duplicate_splits"] = res.stats.duplicate_splits;
  stats["wall_seconds"] = res.stats.wall_seconds;
  write_text_file(fs::path(a.out) / "stats.json", stats.dump(2) + "\n");

  FrontDocument doc;
  doc.schema = ds.schema;
  doc.schema_fp = schema_fingerprint(ds.schema);
  doc.predictor = f->to_json();
  doc.status = res.status;
  doc.n_affected = affected.size();
  doc.cdf_n = cdf.n();
  doc.cdf_columns = cdf.columns();
  doc.binning = binning.per_feature;
  doc.front.reserve(res.front.size());
  for (const auto& e : res.front)
    doc.front.push_back({e.value, materialize(*e.tree, view, actions)});
  write_front_file((fs::path(a.out) / "front.json").string(), doc);

  std::string csv = "solution_index,cost,loss,cost_mean,loss_mean,invalidity\n";
  auto n = static_cast<double>(affected.size());
  for (std::size_t i = 0; i < res.front.size(); ++i) {
    const CostLossPair& v = res.front[i].value;
    double cm = v.cost / n;
    double lm = static_cast<double>(v.loss) / n;
    csv += std::to_string(i) + "," + format_double(v.cost) + "," +
           std::to_string(v.loss) + "," + format_double(cm) + "," + format_double(lm) + "," +
           format_double(cm + lm) + "\n";
  }
  write_text_file(fs::path(a.out) / "front.csv", csv);

  char wall[32];
  std::snprintf(wall, sizeof wall, "%.2f", res.stats.wall_seconds);
  std::cout << "status: " << solve_status_name(res.status) << "; front: " << res.front.size()
            << " solutions; wall: " << wall << " s\n"
            << "wrote " << a.out << "/front.json, front.csv, stats.json\n";
  return res.status == SolveStatus::timed_out ? 4 : 0;
}

struct EvaluateArgs {
  std::string front, data;
  std::string split = "test";
  std::string out = "-";
  int threads = 1;
};

int cmd_evaluate(const EvaluateArgs& a) {
  FrontDocument doc = read_front_file(a.front);
  if (doc.front.empty()) throw ConfigError("evaluate: the front file holds no solutions");
  Dataset ds = load_dataset(a.data, doc.schema);
  std::unique_ptr<Predictor> f = predictor_from_json(doc.predictor, doc.schema);
  EmpiricalCdf cdf = doc.rebuild_cdf();
  Binning binning = doc.rebuild_binning();
  std::vector<std::uint32_t> affected = compute_affected(ds, *f);
  if (affected.empty()) throw ConfigError("evaluate: the population has no affected instances");

  ThreadPool pool(static_cast<unsigned>(a.threads));
  std::vector<EvalOutcome> outcomes = evaluate_front(doc.front, ds, affected, *f, cdf, binning, pool);
  std::vector<SummaryMetrics> metrics;
  metrics.reserve(outcomes.size());
  for (const auto& o : outcomes) metrics.push_back(o.metrics);

  std::string csv = metrics_csv_header();
  append_metrics_csv(csv, doc.front, metrics, a.split, "all");
  if (a.out == "-")
    std::cout << csv;
  else
    write_text_file(a.out, csv);

  std::vector<SummaryMetrics> train;
  train.reserve(doc.front.size());
  for (const auto& e : doc.front)
    train.push_back({e.value.cost, e.value.loss, doc.n_affected});
  GeneralizationReport gen = generalization_distance(train, metrics);
  char line[128];
  std::snprintf(line, sizeof line, "generalization distance vs training front: %.4f +/- %.4f (%zu solutions)\n",
                gen.mean, gen.sd, gen.per_solution.size());
  std::cerr << line;
  return 0;
}

struct AuditArgs {
  std::string front, data, group;
  std::string out = ".";
  std::string split = "train";
  int threads = 1;
};

int cmd_audit(const AuditArgs& a) {
  FrontDocument doc = read_front_file(a.front);
  if (doc.front.empty()) throw ConfigError("audit: the front file holds no solutions");
  Dataset ds = load_dataset(a.data, doc.schema);
  std::unique_ptr<Predictor> f = predictor_from_json(doc.predictor, doc.schema);
  EmpiricalCdf cdf = doc.rebuild_cdf();
  Binning binning = doc.rebuild_binning();

  ThreadPool pool(static_cast<unsigned>(a.threads));
  AuditReport rep = audit(doc.front, ds, a.group, *f, cdf, binning, pool);

  fs::create_directories(a.out);
  write_text_file(fs::path(a.out) / "audit.json", audit_to_json(rep).dump(2) + "\n");
  write_text_file(fs::path(a.out) / "audit.md", audit_to_markdown(rep));
  std::string csv = metrics_csv_header();
  for (std::size_t g = 0; g < rep.groups.size(); ++g) {
    std::vector<SummaryMetrics> series;
    series.reserve(rep.series.size());
    for (const auto& row : rep.series) series.push_back(row[g]);
    append_metrics_csv(csv, doc.front, series, a.split, rep.groups[g]);
  }
  write_text_file(fs::path(a.out) / "audit.csv", csv);

  char line[160];
  std::snprintf(line, sizeof line, "groups %s: invalidity gap %+.3f, disparate impact ratio %.3f\n",
                rep.orientation.c_str(), rep.gap_invalidity, rep.disparate_impact_ratio);
  std::cout << line;
  if (rep.has_tpr) {
    std::snprintf(line, sizeof line, "TPR gap (%s): %+.3f\n", rep.orientation.c_str(), rep.tpr_gap);
    std::cout << line;
  }
  std::cout << "wrote " << a.out << "/audit.json, audit.md, audit.csv\n";
  return 0;
}

struct GenSynthArgs {
  std::string spec, out;
};

int cmd_gen_synth(const GenSynthArgs& a) {
  nlohmann::json spec = read_json_file(a.spec, "gen-synth");
  SynthResult syn = generate_synthetic(spec);
  fs::create_directories(a.out);
  write_dataset_csv((fs::path(a.out) / "data.csv").string(), syn.data);
  write_text_file(fs::path(a.out) / "schema.json", syn.data.schema.to_json().dump(2) + "\n");
  write_text_file(fs::path(a.out) / "rules.json", syn.rule_json.dump(2) + "\n");
  std::cout << "wrote " << syn.data.rows.size() << " rows to " << a.out
            << "/data.csv (+ schema.json, rules.json)\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"recourse summary trees: exact bi-objective decision trees that assign one shared "
               "recourse action per leaf"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve_cmd = app.add_subcommand("solve", "compute the Pareto front of summary trees");
  solve_cmd->add_option("--data", sa.data, "dataset CSV")->required();
  solve_cmd->add_option("--schema", sa.schema, "feature schema JSON")->required();
  solve_cmd->add_option("--predictor", sa.predictor,
                        "'logistic', 'rules:PATH' or 'exec:COMMAND' (default logistic)");
  solve_cmd->add_option("--depth", sa.depth, "maximum tree depth (default 3)");
  solve_cmd->add_option("--max-nodes", sa.max_nodes, "branch-node budget, -1 = unbounded");
  solve_cmd->add_option("--min-leaf", sa.min_leaf, "minimum instances per leaf (default 1)");
  solve_cmd->add_option("--sparsity", sa.sparsity, "max features edited per action (default 3)");
  solve_cmd->add_option("--timeout", sa.timeout, "solve deadline, e.g. '30s' or '2m'; 0 = none");
  solve_cmd->add_option("--threads", sa.threads, "worker threads (default 1)");
  solve_cmd->add_option("--bins", sa.bins,
                        "override bin count for numeric features the schema left at default");
  solve_cmd->add_option("--out", sa.out, "output directory")->required();
  solve_cmd->add_option("--seed", sa.seed, "seed for predictor training (default 1)");

  EvaluateArgs ea;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "re-evaluate a front on a population");
  eval_cmd->add_option("--front", ea.front, "front.json from solve")->required();
  eval_cmd->add_option("--data", ea.data, "population CSV")->required();
  eval_cmd->add_option("--split", ea.split, "label for the CSV 'split' column (default test)");
  eval_cmd->add_option("--out", ea.out, "metrics CSV path, '-' = stdout");
  eval_cmd->add_option("--threads", ea.threads, "worker threads (default 1)");

  AuditArgs aa;
  CLI::App* audit_cmd = app.add_subcommand("audit", "per-group bias audit of a front");
  audit_cmd->add_option("--front", aa.front, "front.json from solve")->required();
  audit_cmd->add_option("--data", aa.data, "population CSV")->required();
  audit_cmd->add_option("--group", aa.group, "categorical or binary group feature")->required();
  audit_cmd->add_option("--out", aa.out, "output directory (default .)");
  audit_cmd->add_option("--split", aa.split, "label for the CSV 'split' column (default train)");
  audit_cmd->add_option("--threads", aa.threads, "worker threads (default 1)");

  GenSynthArgs ga;
  CLI::App* gen_cmd = app.add_subcommand("gen-synth", "generate a seeded synthetic population");
  gen_cmd->add_option("--spec", ga.spec, "synthetic spec JSON")->required();
  gen_cmd->add_option("--out", ga.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(sa);
    if (eval_cmd->parsed()) return cmd_evaluate(ea);
    if (audit_cmd->parsed()) return cmd_audit(aa);
    if (gen_cmd->parsed()) return cmd_gen_synth(ga);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace recourse
