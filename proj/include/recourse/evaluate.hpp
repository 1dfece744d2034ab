#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/cdf.hpp"
#include "recourse/pareto.hpp"
#include "recourse/predictor.hpp"
#include "recourse/schema.hpp"
#include "recourse/threading.hpp"
#include "recourse/tree.hpp"

namespace recourse {

// Population-level quality of one summary tree. Totals are kept alongside
// the instance count so the solver's archived (cost, loss) pair is
// recoverable without a lossy division.
struct SummaryMetrics {
  double cost_total = 0.0;
  std::int64_t loss_total = 0;
  std::size_t n = 0;

  double cost_mean() const { return cost_total / static_cast<double>(n); }
  double loss_mean() const { return static_cast<double>(loss_total) / static_cast<double>(n); }
  // Equal-weight scalarization of the two objectives.
  double invalidity() const { return cost_mean() + loss_mean(); }
};

struct PortableFrontEntry {
  CostLossPair value;  // archived training totals
  PortableTree tree;
};
using PortableFront = std::vector<PortableFrontEntry>;

// Per-instance outcomes plus the aggregate. cost[i]/loss[i] are indexed by
// position in the affected list. The aggregate cost is summed leaf by leaf
// in instance order and combined fail-then-pass up the tree, the same
// shape the solver uses, so on the training population metrics.cost_total
// reproduces the archived value bit for bit.
struct EvalOutcome {
  SummaryMetrics metrics;
  std::vector<double> cost;
  std::vector<char> loss;  // 1 when the assigned action fails to flip
};

// Routes the affected instances of `population` through the tree, applies
// each leaf's action, and recomputes cost (against the supplied training
// cost model) and loss (one predictor batch per leaf) from scratch.
// Throws ConfigError when `affected` is empty.
EvalOutcome evaluate_detailed(const PortableTree& tree, const Dataset& population,
                              const std::vector<std::uint32_t>& affected, const Predictor& f,
                              const EmpiricalCdf& cdf, const Binning& binning);

// Convenience wrapper: computes the affected subset itself.
SummaryMetrics evaluate(const PortableTree& tree, const Dataset& population, const Predictor& f,
                        const EmpiricalCdf& cdf, const Binning& binning);

// Every front entry evaluated on one population; parallel across entries,
// output ordered by front position.
std::vector<EvalOutcome> evaluate_front(const PortableFront& front, const Dataset& population,
                                        const std::vector<std::uint32_t>& affected,
                                        const Predictor& f, const EmpiricalCdf& cdf,
                                        const Binning& binning, ThreadPool& pool);

// Train/test drift of the same solutions in (mean cost, mean loss) space.
struct GeneralizationReport {
  std::vector<double> per_solution;  // Euclidean distances
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation across solutions
};

GeneralizationReport generalization_distance(const std::vector<SummaryMetrics>& train,
                                             const std::vector<SummaryMetrics>& test);

// Smallest invalidity on a front given archived totals; the anytime
// degradation of a partial front is its relative gap to the full front's.
double best_invalidity(const std::vector<SummaryMetrics>& per_solution);
double relative_degradation_percent(double partial_best, double full_best);

// Bias audit over one population. Groups are the categories of one
// categorical or binary feature, listed in vocabulary order restricted to
// the values present. Every gap is first listed group minus second listed
// group; `orientation` spells that out. Classifier-level rates use the
// whole population, recourse statistics only its affected subset, and the
// standard deviations are across front solutions.
struct AuditGroupClassifier {
  std::string group;
  std::size_t n = 0;
  std::size_t adverse = 0;
  double adverse_rate = 0.0;
  std::size_t positives = 0;        // ground-truth favorable labels
  std::size_t true_positives = 0;   // of those, predicted favorable
  double tpr = 0.0;                 // meaningful only when positives > 0
};

struct AuditGroupRecourse {
  std::string group;
  std::size_t n_affected = 0;
  double cost_mean = 0.0, cost_sd = 0.0;
  double loss_mean = 0.0, loss_sd = 0.0;
  double invalidity_mean = 0.0, invalidity_sd = 0.0;
};

struct AuditReport {
  std::string group_feature;
  std::vector<std::string> groups;
  std::string orientation;  // "<first> - <second>"

  std::vector<AuditGroupClassifier> classifier;
  double disparate_impact_ratio = 1.0;  // min favorable rate / max favorable rate
  bool has_tpr = false;                 // labels present and both gap groups have positives
  double tpr_gap = 0.0;

  std::size_t n_solutions = 0;
  std::vector<AuditGroupRecourse> recourse;
  double gap_cost = 0.0;
  double gap_loss = 0.0;
  double gap_invalidity = 0.0;
  double fraction_first_group_worse = 0.0;  // by per-solution invalidity

  // Per-solution per-group means, [solution][group], for exported series.
  std::vector<std::vector<SummaryMetrics>> series;
};

AuditReport audit(const PortableFront& front, const Dataset& population,
                  const std::string& group_feature, const Predictor& f, const EmpiricalCdf& cdf,
                  const Binning& binning, ThreadPool& pool);

nlohmann::ordered_json audit_to_json(const AuditReport& report);
std::string audit_to_markdown(const AuditReport& report);

// Shared metrics CSV surface: header plus one row per front solution.
std::string metrics_csv_header();
void append_metrics_csv(std::string& out, const PortableFront& front,
                        const std::vector<SummaryMetrics>& rows, const std::string& split,
                        const std::string& group);

}  // namespace recourse
