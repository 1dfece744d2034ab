#include "recourse/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "recourse/cache.hpp"
#include "recourse/csv.hpp"
#include "recourse/errors.hpp"

namespace recourse {

namespace {

// Recursive pass over one tree. Costs are summed per leaf in ascending
// instance order and combined fail side first, mirroring the solver's
// arithmetic so training-population totals match archived values exactly.
struct TreeWalk {
  const PortableTree& tree;
  const Dataset& ds;
  const std::vector<std::uint32_t>& affected;
  const Predictor& f;
  const EmpiricalCdf& cdf;
  const Binning& binning;
  std::vector<double>& cost_out;
  std::vector<char>& loss_out;

  CostLossPair visit(int node, const std::vector<std::uint32_t>& positions) const {
    const PortableTree::Node& nd = tree.nodes[static_cast<std::size_t>(node)];
    if (!nd.is_leaf) {
      std::vector<std::uint32_t> fail, pass;
      for (std::uint32_t p : positions) {
        const Instance& x = ds.rows[affected[p]];
        (nd.pred.pass(x) ? pass : fail).push_back(p);
      }
      CostLossPair f_side = visit(nd.fail, fail);
      CostLossPair p_side = visit(nd.pass, pass);
      return combine(f_side, p_side);
    }
    if (positions.empty()) return {0.0, 0};
    std::vector<Instance> batch;
    batch.reserve(positions.size());
    double cost_sum = 0.0;
    for (std::uint32_t p : positions) {
      const Instance& x = ds.rows[affected[p]];
      double c = mps_cost(nd.action, x, ds.schema, cdf, binning);
      cost_out[p] = c;
      cost_sum += c;
      batch.push_back(apply_action(nd.action, x, ds.schema, binning));
    }
    std::vector<int> preds = f.predict(batch);
    std::int64_t loss_sum = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      char miss = preds[i] == 0 ? 1 : 0;
      loss_out[positions[i]] = miss;
      loss_sum += miss;
    }
    return {cost_sum, loss_sum};
  }
};

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double population_sd(const std::vector<double>& xs, double mean) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

std::string fixed3(double v, bool forced_sign = false) {
  char buf[64];
  std::snprintf(buf, sizeof buf, forced_sign ? "%+.3f" : "%.3f", v);
  return buf;
}

}  // namespace

EvalOutcome evaluate_detailed(const PortableTree& tree, const Dataset& population,
                              const std::vector<std::uint32_t>& affected, const Predictor& f,
                              const EmpiricalCdf& cdf, const Binning& binning) {
  if (tree.empty()) throw ConfigError("evaluation: empty tree");
  if (affected.empty()) throw ConfigError("evaluation: the population has no affected instances");
  EvalOutcome out;
  out.cost.assign(affected.size(), 0.0);
  out.loss.assign(affected.size(), 0);
  std::vector<std::uint32_t> all(affected.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
  TreeWalk walk{tree, population, affected, f, cdf, binning, out.cost, out.loss};
  CostLossPair total = walk.visit(0, all);
  out.metrics = {total.cost, total.loss, affected.size()};
  return out;
}

SummaryMetrics evaluate(const PortableTree& tree, const Dataset& population, const Predictor& f,
                        const EmpiricalCdf& cdf, const Binning& binning) {
  std::vector<std::uint32_t> affected = compute_affected(population, f);
  return evaluate_detailed(tree, population, affected, f, cdf, binning).metrics;
}

std::vector<EvalOutcome> evaluate_front(const PortableFront& front, const Dataset& population,
                                        const std::vector<std::uint32_t>& affected,
                                        const Predictor& f, const EmpiricalCdf& cdf,
                                        const Binning& binning, ThreadPool& pool) {
  std::vector<EvalOutcome> out(front.size());
  pool.run(front.size(), [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i)
      out[i] = evaluate_detailed(front[i].tree, population, affected, f, cdf, binning);
  });
  return out;
}

GeneralizationReport generalization_distance(const std::vector<SummaryMetrics>& train,
                                             const std::vector<SummaryMetrics>& test) {
  if (train.size() != test.size())
    throw ConfigError("generalization: train and test metric lists differ in length");
  GeneralizationReport rep;
  rep.per_solution.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    double dc = train[i].cost_mean() - test[i].cost_mean();
    double dl = train[i].loss_mean() - test[i].loss_mean();
    rep.per_solution.push_back(std::sqrt(dc * dc + dl * dl));
  }
  rep.mean = mean_of(rep.per_solution);
  rep.sd = population_sd(rep.per_solution, rep.mean);
  return rep;
}

double best_invalidity(const std::vector<SummaryMetrics>& per_solution) {
  if (per_solution.empty()) throw ConfigError("best_invalidity: empty front");
  double best = per_solution[0].invalidity();
  for (const auto& m : per_solution) best = std::min(best, m.invalidity());
  return best;
}

double relative_degradation_percent(double partial_best, double full_best) {
  if (full_best == 0.0) return partial_best <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (partial_best - full_best) / full_best * 100.0;
}

AuditReport audit(const PortableFront& front, const Dataset& population,
                  const std::string& group_feature, const Predictor& f, const EmpiricalCdf& cdf,
                  const Binning& binning, ThreadPool& pool) {
  if (front.empty()) throw ConfigError("audit: empty front");
  int gi = population.schema.feature_index(group_feature);
  if (gi < 0) throw ConfigError("audit: unknown group feature '" + group_feature + "'");
  const FeatureSpec& gf = population.schema.features[static_cast<std::size_t>(gi)];
  if (gf.kind == FeatureKind::numeric)
    throw ConfigError("audit: group feature '" + group_feature +
                      "' must be categorical or binary");

  std::size_t n_vocab = gf.kind == FeatureKind::binary ? 2 : gf.categories.size();
  std::vector<std::size_t> row_group(population.rows.size());
  std::vector<std::size_t> vocab_n(n_vocab, 0);
  for (std::size_t r = 0; r < population.rows.size(); ++r) {
    auto g = static_cast<std::size_t>(population.rows[r][static_cast<std::size_t>(gi)]);
    row_group[r] = g;
    ++vocab_n[g];
  }

  AuditReport rep;
  rep.group_feature = group_feature;
  std::vector<std::size_t> present;  // vocabulary indices with members
  for (std::size_t g = 0; g < n_vocab; ++g)
    if (vocab_n[g] > 0) {
      present.push_back(g);
      rep.groups.push_back(render_value(gf, static_cast<double>(g)));
    }
  if (present.size() < 2)
    throw ConfigError("audit: population has a single group on '" + group_feature + "'");
  rep.orientation = rep.groups[0] + " - " + rep.groups[1];

  // One predictor pass drives the adverse rates, the TPR table and the
  // affected subset alike.
  std::vector<int> preds = f.predict(population.rows);
  std::vector<std::uint32_t> affected;
  for (std::size_t r = 0; r < preds.size(); ++r)
    if (preds[r] == 0) affected.push_back(static_cast<std::uint32_t>(r));
  if (affected.empty()) throw ConfigError("audit: the population has no affected instances");

  bool labeled = population.has_labels();
  for (std::size_t k = 0; k < present.size(); ++k) {
    AuditGroupClassifier c;
    c.group = rep.groups[k];
    for (std::size_t r = 0; r < population.rows.size(); ++r) {
      if (row_group[r] != present[k]) continue;
      ++c.n;
      if (preds[r] == 0) ++c.adverse;
      if (labeled && population.labels[r] == 1) {
        ++c.positives;
        if (preds[r] == 1) ++c.true_positives;
      }
    }
    c.adverse_rate = static_cast<double>(c.adverse) / static_cast<double>(c.n);
    if (c.positives > 0)
      c.tpr = static_cast<double>(c.true_positives) / static_cast<double>(c.positives);
    rep.classifier.push_back(c);
  }

  double fav_min = 1.0, fav_max = 0.0;
  for (const auto& c : rep.classifier) {
    double fav = 1.0 - c.adverse_rate;
    fav_min = std::min(fav_min, fav);
    fav_max = std::max(fav_max, fav);
  }
  // All-adverse populations carry no favorable-rate disparity to measure.
  rep.disparate_impact_ratio = fav_max == 0.0 ? 1.0 : fav_min / fav_max;

  rep.has_tpr = labeled && rep.classifier[0].positives > 0 && rep.classifier[1].positives > 0;
  if (rep.has_tpr) rep.tpr_gap = rep.classifier[0].tpr - rep.classifier[1].tpr;

  // Recourse quality: group membership of each affected position, then
  // per-solution per-group means over the shared front evaluation.
  std::vector<std::size_t> member_group(affected.size());
  std::vector<std::size_t> group_affected(present.size(), 0);
  for (std::size_t i = 0; i < affected.size(); ++i) {
    std::size_t vocab_g = row_group[affected[i]];
    std::size_t k = 0;
    while (present[k] != vocab_g) ++k;
    member_group[i] = k;
    ++group_affected[k];
  }
  for (std::size_t k = 0; k < 2; ++k)
    if (group_affected[k] == 0)
      throw ConfigError("audit: group '" + rep.groups[k] + "' has no affected instances");

  std::vector<EvalOutcome> outcomes =
      evaluate_front(front, population, affected, f, cdf, binning, pool);

  rep.n_solutions = front.size();
  rep.series.assign(front.size(), std::vector<SummaryMetrics>(present.size()));
  for (std::size_t s = 0; s < front.size(); ++s) {
    std::vector<SummaryMetrics>& row = rep.series[s];
    for (std::size_t k = 0; k < present.size(); ++k) row[k].n = group_affected[k];
    for (std::size_t i = 0; i < affected.size(); ++i) {
      SummaryMetrics& cell = row[member_group[i]];
      cell.cost_total += outcomes[s].cost[i];
      cell.loss_total += outcomes[s].loss[i];
    }
  }

  std::size_t worse = 0;
  for (std::size_t k = 0; k < present.size(); ++k) {
    std::vector<double> costs, losses, invs;
    costs.reserve(front.size());
    for (std::size_t s = 0; s < front.size(); ++s) {
      const SummaryMetrics& cell = rep.series[s][k];
      if (cell.n == 0) continue;
      costs.push_back(cell.cost_mean());
      losses.push_back(cell.loss_mean());
      invs.push_back(cell.invalidity());
    }
    AuditGroupRecourse gr;
    gr.group = rep.groups[k];
    gr.n_affected = group_affected[k];
    gr.cost_mean = mean_of(costs);
    gr.cost_sd = population_sd(costs, gr.cost_mean);
    gr.loss_mean = mean_of(losses);
    gr.loss_sd = population_sd(losses, gr.loss_mean);
    // Linearity holds cell by cell, so the across-solutions mean inherits it.
    gr.invalidity_mean = gr.cost_mean + gr.loss_mean;
    gr.invalidity_sd = population_sd(invs, mean_of(invs));
    rep.recourse.push_back(gr);
  }
  for (std::size_t s = 0; s < front.size(); ++s)
    if (rep.series[s][0].invalidity() > rep.series[s][1].invalidity()) ++worse;
  rep.gap_cost = rep.recourse[0].cost_mean - rep.recourse[1].cost_mean;
  rep.gap_loss = rep.recourse[0].loss_mean - rep.recourse[1].loss_mean;
  rep.gap_invalidity = rep.gap_cost + rep.gap_loss;
  rep.fraction_first_group_worse =
      static_cast<double>(worse) / static_cast<double>(front.size());
  return rep;
}

nlohmann::ordered_json audit_to_json(const AuditReport& report) {
  nlohmann::ordered_json j;
  j["group_feature"] = report.group_feature;
  j["groups"] = report.groups;
  j["orientation"] = report.orientation;

  nlohmann::ordered_json classifier;
  classifier["per_group"] = nlohmann::ordered_json::array();
  for (const auto& c : report.classifier) {
    nlohmann::ordered_json g;
    g["group"] = c.group;
    g["n"] = c.n;
    g["adverse"] = c.adverse;
    g["adverse_rate"] = c.adverse_rate;
    if (c.positives > 0) {
      g["positives"] = c.positives;
      g["true_positives"] = c.true_positives;
      g["tpr"] = c.tpr;
    }
    classifier["per_group"].push_back(g);
  }
  classifier["disparate_impact_ratio"] = report.disparate_impact_ratio;
  if (report.has_tpr) classifier["tpr_gap"] = report.tpr_gap;
  j["classifier"] = classifier;

  nlohmann::ordered_json recourse;
  recourse["n_solutions"] = report.n_solutions;
  recourse["per_group"] = nlohmann::ordered_json::array();
  for (const auto& g : report.recourse) {
    nlohmann::ordered_json r;
    r["group"] = g.group;
    r["n_affected"] = g.n_affected;
    r["cost_mean"] = g.cost_mean;
    r["cost_sd"] = g.cost_sd;
    r["loss_mean"] = g.loss_mean;
    r["loss_sd"] = g.loss_sd;
    r["invalidity_mean"] = g.invalidity_mean;
    r["invalidity_sd"] = g.invalidity_sd;
    recourse["per_group"].push_back(r);
  }
  recourse["gap"] = {{"cost", report.gap_cost},
                     {"loss", report.gap_loss},
                     {"invalidity", report.gap_invalidity}};
  recourse["fraction_first_group_worse"] = report.fraction_first_group_worse;
  j["recourse"] = recourse;
  return j;
}

std::string audit_to_markdown(const AuditReport& report) {
  std::string md;
  md += "# Bias audit: " + report.group_feature + "\n\n";
  md += "Gap orientation: " + report.orientation + "\n\n";
  md += "## Classifier\n\n";
  md += "| group | n | adverse | adverse rate | TPR |\n";
  md += "|---|---|---|---|---|\n";
  for (const auto& c : report.classifier) {
    md += "| " + c.group + " | " + std::to_string(c.n) + " | " + std::to_string(c.adverse) +
          " | " + fixed3(c.adverse_rate) + " | " +
          (c.positives > 0 ? fixed3(c.tpr) : std::string("n/a")) + " |\n";
  }
  md += "\nDisparate impact ratio: " + fixed3(report.disparate_impact_ratio) + "\n";
  if (report.has_tpr) md += "\nTPR gap (" + report.orientation + "): " + fixed3(report.tpr_gap, true) + "\n";

  md += "\n## Recourse quality across " + std::to_string(report.n_solutions) + " front solutions\n\n";
  md += "| group | affected | cost | loss | invalidity |\n";
  md += "|---|---|---|---|---|\n";
  for (const auto& g : report.recourse) {
    md += "| " + g.group + " | " + std::to_string(g.n_affected) + " | " + fixed3(g.cost_mean) +
          " ± " + fixed3(g.cost_sd) + " | " + fixed3(g.loss_mean) + " ± " + fixed3(g.loss_sd) +
          " | " + fixed3(g.invalidity_mean) + " ± " + fixed3(g.invalidity_sd) + " |\n";
  }
  md += "\nGaps (" + report.orientation + "): cost " + fixed3(report.gap_cost, true) + ", loss " +
        fixed3(report.gap_loss, true) + ", invalidity " + fixed3(report.gap_invalidity, true) +
        "\n";
  md += "\nFraction of solutions where " + report.groups[0] + " fares worse: " +
        fixed3(report.fraction_first_group_worse) + "\n";
  return md;
}

std::string metrics_csv_header() {
  return "solution_index,v_C,v_L,cost_mean,loss_mean,invalidity,split,group\n";
}

void append_metrics_csv(std::string& out, const PortableFront& front,
                        const std::vector<SummaryMetrics>& rows, const std::string& split,
                        const std::string& group) {
  if (front.size() != rows.size())
    throw ConfigError("metrics csv: front and metric list differ in length");
  for (std::size_t i = 0; i < front.size(); ++i) {
    std::vector<std::string> cells;
    cells.push_back(std::to_string(i));
    cells.push_back(format_double(front[i].value.cost));
    cells.push_back(format_double(static_cast<double>(front[i].value.loss)));
    cells.push_back(format_double(rows[i].cost_mean()));
    cells.push_back(format_double(rows[i].loss_mean()));
    cells.push_back(format_double(rows[i].invalidity()));
    cells.push_back(split);
    cells.push_back(group);
    out += csv_join(cells);
    out += "\n";
  }
}

}  // namespace recourse
