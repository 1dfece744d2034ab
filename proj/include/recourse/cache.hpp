#pragma once

#include <cstdint>
#include <vector>

#include "recourse/action.hpp"
#include "recourse/bitset.hpp"
#include "recourse/cdf.hpp"
#include "recourse/pareto.hpp"
#include "recourse/predictor.hpp"
#include "recourse/threading.hpp"

namespace recourse {

// Precomputed per-(instance, action) recourse cost and loss over the
// affected population D0. Cost is stored action-major (one contiguous
// column of |D0| doubles per action) because the solver streams whole
// columns; loss is one bit per cell so a leaf's loss is a masked popcount.
// Row 0 invariants: cost(i, 0) == 0 and loss(i, 0) == 1 for every i, since
// the null action changes nothing about an adversely classified instance.
class CacheMatrix {
 public:
  CacheMatrix() = default;
  CacheMatrix(std::size_t n_instances, std::size_t n_actions);

  std::size_t n_instances() const { return n_instances_; }
  std::size_t n_actions() const { return n_actions_; }

  double cost(std::size_t i, std::size_t a) const { return cost_[a * n_instances_ + i]; }
  bool loss(std::size_t i, std::size_t a) const { return loss_[a].test(i); }

  const double* cost_column(std::size_t a) const { return cost_.data() + a * n_instances_; }
  const Bitset& loss_column(std::size_t a) const { return loss_[a]; }

  void set_cost(std::size_t i, std::size_t a, double v) { cost_[a * n_instances_ + i] = v; }
  void set_loss(std::size_t i, std::size_t a) { loss_[a].set(i); }

  std::size_t byte_size() const;

 private:
  std::size_t n_instances_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> cost_;
  std::vector<Bitset> loss_;
};

// Maximum percentile shift: the cost of action a on instance x is the
// largest per-feature shift it causes, where numeric features move by
// |Q_j(new) - Q_j(old)| under the training CDF and categorical/binary
// features count 1 when changed, 0 when not. The null action costs 0.
double mps_cost(const Action& a, const Instance& x, const FeatureSchema& schema,
                const EmpiricalCdf& cdf, const Binning& binning);

// 1 when the predictor still classifies the transformed instance adversely.
int recourse_loss(const Action& a, const Instance& x, const FeatureSchema& schema,
                  const Binning& binning, const Predictor& f);

// Fills the full |affected| x |actions| matrix. Parallel across the action
// dimension; each column batches one predictor call over instances in index
// order, so cells never depend on thread count. Throws RuntimeError when
// the estimated size exceeds memory_cap_bytes (the message carries the
// estimate).
CacheMatrix build_cache(const Dataset& ds, const std::vector<std::uint32_t>& affected,
                        const std::vector<Action>& actions, const Predictor& f,
                        const EmpiricalCdf& cdf, const Binning& binning, ThreadPool& pool,
                        std::size_t memory_cap_bytes);

// Aggregate value of assigning action a to every instance in the subset:
// costs summed in ascending instance order, losses counted.
CostLossPair leaf_value(const std::vector<std::uint32_t>& subset, std::size_t action,
                        const CacheMatrix& cache);

// The nondominated (value, action index) options for one leaf, ties broken
// toward the smallest action index. subset and subset_bits must describe
// the same instances. Parallel across actions via the pool; per-chunk
// minima are folded in chunk order, which reproduces the serial result for
// any thread count.
std::vector<ArchiveEntry<std::uint32_t>> best_leaf_solutions(
    const std::vector<std::uint32_t>& subset, const Bitset& subset_bits, const CacheMatrix& cache,
    ThreadPool& pool);

// Binary cache persistence. The file records the schema and action-set
// fingerprints; load refuses a file whose fingerprints disagree with the
// caller's.
void save_cache(const std::string& path, const CacheMatrix& cache, std::uint64_t schema_fp,
                std::uint64_t actions_fp);
CacheMatrix load_cache(const std::string& path, std::uint64_t schema_fp,
                       std::uint64_t actions_fp);

}  // namespace recourse
