#include "recourse/cache.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "recourse/errors.hpp"

namespace recourse {

CacheMatrix::CacheMatrix(std::size_t n_instances, std::size_t n_actions)
    : n_instances_(n_instances),
      n_actions_(n_actions),
      cost_(n_instances * n_actions, 0.0),
      loss_(n_actions, Bitset(n_instances)) {}

std::size_t CacheMatrix::byte_size() const {
  return cost_.size() * sizeof(double) + loss_.size() * ((n_instances_ + 63) / 64) * 8;
}

double mps_cost(const Action& a, const Instance& x, const FeatureSchema& schema,
                const EmpiricalCdf& cdf, const Binning& binning) {
  (void)schema;
  double worst = 0.0;
  for (const Edit& e : a.edits) {
    auto j = static_cast<std::size_t>(e.feature);
    double shift = 0.0;
    switch (e.op) {
      case EditOp::flip_binary:
        shift = 1.0;  // a flip always changes the value
        break;
      case EditOp::set_category:
        shift = static_cast<int>(x[j]) == e.param ? 0.0 : 1.0;
        break;
      case EditOp::shift_bins: {
        const FeatureBinning& fb = binning.per_feature[j];
        if (fb.degenerate()) break;
        int dest = fb.bin_of(x[j]) + e.param;
        if (dest < 0) dest = 0;
        if (dest > fb.bins - 1) dest = fb.bins - 1;
        shift = std::fabs(cdf.at(e.feature, fb.midpoint(dest)) - cdf.at(e.feature, x[j]));
        break;
      }
    }
    if (shift > worst) worst = shift;
  }
  return worst;
}

int recourse_loss(const Action& a, const Instance& x, const FeatureSchema& schema,
                  const Binning& binning, const Predictor& f) {
  std::vector<Instance> batch{apply_action(a, x, schema, binning)};
  return f.predict(batch)[0] == 0 ? 1 : 0;
}

CacheMatrix build_cache(const Dataset& ds, const std::vector<std::uint32_t>& affected,
                        const std::vector<Action>& actions, const Predictor& f,
                        const EmpiricalCdf& cdf, const Binning& binning, ThreadPool& pool,
                        std::size_t memory_cap_bytes) {
  std::size_t n = affected.size();
  std::size_t m = actions.size();
  std::size_t estimate = n * m * sizeof(double) + m * ((n + 63) / 64) * 8;
  if (estimate > memory_cap_bytes) {
    std::ostringstream oss;
    oss << "cache: estimated size " << estimate << " bytes (" << n << " instances x " << m
        << " actions) exceeds the memory cap of " << memory_cap_bytes
        << " bytes; use coarser bins, fewer edits, or raise the cap";
    throw RuntimeError(oss.str());
  }

  CacheMatrix cache(n, m);
  pool.run(m, [&](std::size_t a_begin, std::size_t a_end, unsigned) {
    std::vector<Instance> transformed;
    transformed.reserve(n);
    for (std::size_t a = a_begin; a < a_end; ++a) {
      transformed.clear();
      for (std::size_t i = 0; i < n; ++i)
        transformed.push_back(apply_action(actions[a], ds.rows[affected[i]], ds.schema, binning));
      std::vector<int> pred = f.predict(transformed);
      for (std::size_t i = 0; i < n; ++i) {
        cache.set_cost(i, a, mps_cost(actions[a], ds.rows[affected[i]], ds.schema, cdf, binning));
        if (pred[i] == 0) cache.set_loss(i, a);
      }
    }
  });
  return cache;
}

CostLossPair leaf_value(const std::vector<std::uint32_t>& subset, std::size_t action,
                        const CacheMatrix& cache) {
  const double* col = cache.cost_column(action);
  double cost = 0.0;
  std::int64_t loss = 0;
  const Bitset& lossbits = cache.loss_column(action);
  for (std::uint32_t i : subset) {
    cost += col[i];
    loss += lossbits.test(i) ? 1 : 0;
  }
  return {cost, loss};
}

std::vector<ArchiveEntry<std::uint32_t>> best_leaf_solutions(
    const std::vector<std::uint32_t>& subset, const Bitset& subset_bits, const CacheMatrix& cache,
    ThreadPool& pool) {
  std::size_t n_actions = cache.n_actions();
  std::int64_t max_loss = static_cast<std::int64_t>(subset.size());

  struct Slot {
    double cost = 0;
    std::uint32_t action = 0;
    bool occupied = false;
  };
  // One min-cost-per-loss table per lane; lanes scan disjoint ascending
  // action ranges, so folding lane tables in lane order reproduces the
  // serial "first smallest" outcome exactly.
  std::vector<std::vector<Slot>> lane_slots(pool.width(),
                                            std::vector<Slot>(static_cast<std::size_t>(max_loss) + 1));
  pool.run(n_actions, [&](std::size_t a_begin, std::size_t a_end, unsigned lane) {
    auto& slots = lane_slots[lane];
    for (std::size_t a = a_begin; a < a_end; ++a) {
      const double* col = cache.cost_column(a);
      double cost = 0.0;
      for (std::uint32_t i : subset) cost += col[i];
      auto loss = static_cast<std::size_t>(cache.loss_column(a).count_and(subset_bits));
      Slot& s = slots[loss];
      if (!s.occupied || cost < s.cost) {
        s = {cost, static_cast<std::uint32_t>(a), true};
      }
    }
  });

  std::vector<Slot>& merged = lane_slots[0];
  for (unsigned lane = 1; lane < pool.width(); ++lane) {
    for (std::size_t l = 0; l < merged.size(); ++l) {
      const Slot& s = lane_slots[lane][l];
      if (!s.occupied) continue;
      // Later lanes hold larger action indices, so equal cost never replaces.
      if (!merged[l].occupied || s.cost < merged[l].cost) merged[l] = s;
    }
  }

  // Staircase sweep over losses ascending: keep strictly improving costs.
  std::vector<ArchiveEntry<std::uint32_t>> out;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < merged.size(); ++l) {
    if (!merged[l].occupied) continue;
    if (merged[l].cost < best_cost) {
      best_cost = merged[l].cost;
      out.push_back({{merged[l].cost, static_cast<std::int64_t>(l)}, merged[l].action});
    }
  }
  std::reverse(out.begin(), out.end());  // cost ascending, loss descending
  return out;
}

namespace {
constexpr std::uint64_t kCacheMagic = 0x52435348454d4154ULL;  // "RCSHEMAT"
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

void save_cache(const std::string& path, const CacheMatrix& cache, std::uint64_t schema_fp,
                std::uint64_t actions_fp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cache: cannot write " + path);
  auto put64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  put64(kCacheMagic);
  put32(kCacheVersion);
  put64(schema_fp);
  put64(actions_fp);
  put64(cache.n_instances());
  put64(cache.n_actions());
  for (std::size_t a = 0; a < cache.n_actions(); ++a)
    out.write(reinterpret_cast<const char*>(cache.cost_column(a)),
              static_cast<std::streamsize>(cache.n_instances() * sizeof(double)));
  for (std::size_t a = 0; a < cache.n_actions(); ++a) {
    const auto& words = cache.loss_column(a).words();
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * 8));
  }
  if (!out) throw RuntimeError("cache: short write to " + path);
}

CacheMatrix load_cache(const std::string& path, std::uint64_t schema_fp,
                       std::uint64_t actions_fp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cache: cannot open " + path);
  auto get64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get32 = [&]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  if (get64() != kCacheMagic) throw RuntimeError("cache: " + path + " is not a cache file");
  if (get32() != kCacheVersion) throw RuntimeError("cache: " + path + ": unsupported version");
  std::uint64_t sfp = get64();
  std::uint64_t afp = get64();
  if (sfp != schema_fp || afp != actions_fp)
    throw RuntimeError("cache: " + path +
                       " was built for a different schema or action set; rebuild it");
  std::size_t n = get64();
  std::size_t m = get64();
  CacheMatrix cache(n, m);
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<double> col(n);
    in.read(reinterpret_cast<char*>(col.data()), static_cast<std::streamsize>(n * sizeof(double)));
    for (std::size_t i = 0; i < n; ++i) cache.set_cost(i, a, col[i]);
  }
  std::size_t words_per_col = (n + 63) / 64;
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<std::uint64_t> words(words_per_col);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(words_per_col * 8));
    for (std::size_t w = 0; w < words_per_col; ++w) {
      std::uint64_t bits = words[w];
      while (bits) {
        auto b = static_cast<unsigned>(std::countr_zero(bits));
        cache.set_loss(w * 64 + b, a);
        bits &= bits - 1;
      }
    }
  }
  if (!in) throw RuntimeError("cache: " + path + " is truncated");
  return cache;
}

}  // namespace recourse
