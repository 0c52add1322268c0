#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bclq/graph.hpp"

namespace bclq {

/// Result of the exact almost-completeness scan. s_star is the maximum, over
/// ordered block pairs (i,j) and tuples (x_i, y_i, x_j), of the number of y_j
/// completing (x_j, y_j) to a non-neighbor of (x_i, y_i). Both orders of
/// (i,j) are checked.
struct AlmostCompleteReport {
  uint32_t s_star = 0;
  struct Witness {
    int i = 0, j = 0;
    uint32_t xi = 0, yi = 0, xj = 0;
    uint32_t bad_count = 0;
  } witness;
};

AlmostCompleteReport min_almost_complete(const BlockGraph& g);

/// Number of bad y_j for one tuple, via direct edge queries.
uint32_t bad_count_for_tuple(const BlockGraph& g, int i, int j,
                             uint32_t xi, uint32_t yi, uint32_t xj);

struct BoundedCnParams {
  double alpha = 1.0;
  double beta = 0.0;
  uint32_t R = 1;
};

struct BoundedCnCounterexample {
  std::vector<VertexId> S;
  int block = 0;
  uint32_t size = 0;        // |N^cap(S, block)|
  double lo = 0, hi = 0;    // violated interval
};

struct BoundedCnReport {
  BoundedCnParams params;
  bool pass = true;
  std::optional<BoundedCnCounterexample> counterexample;
  bool exhaustive = false;
  uint64_t checks = 0;          // (S, i) pairs tested
  double max_deviation = 0.0;   // max | |N|/(alpha^|S| n) - 1 | over tested pairs
};

/// Exhaustive check over every S <= R (any blocks, no repeated vertex) and
/// every block outside B(S). Throws if the estimated work exceeds `budget`
/// elementary checks.
BoundedCnReport check_bounded_cn_exhaustive(const BlockGraph& g, const BoundedCnParams& p,
                                            uint64_t budget = 100000000ull);

/// Sampled check: |S| uniform in [1, min(R, k-1)], then a uniform block
/// subset of that size with one uniform vertex per block, then a uniform
/// target block outside.
BoundedCnReport check_bounded_cn_sampled(const BlockGraph& g, const BoundedCnParams& p,
                                         uint64_t trials, uint64_t seed);

/// Auto mode: exhaustive when the work estimate fits the budget.
BoundedCnReport check_bounded_cn(const BlockGraph& g, const BoundedCnParams& p,
                                 uint64_t sampled_trials, uint64_t seed,
                                 uint64_t budget = 100000000ull);

/// One row per sampled tuple plus a summary of the tail frequency.
struct ConcentrationResult {
  uint32_t n = 0, k = 0;
  double p = 0.0;
  uint64_t seed = 0;
  uint64_t tuples = 0;
  double threshold = 0.0;        // 2 sqrt(n) (1-p)
  uint64_t tail_hits = 0;        // tuples with bad count >= threshold (and > 0)
  double empirical() const { return tuples ? double(tail_hits) / double(tuples) : 0.0; }
  double reference = 1.0;        // exp(-sqrt(n)(1-p)/3)
  double log_threshold = 0.0;    // 9 e^2 ln(kn), natural log
  std::vector<uint32_t> samples; // per-tuple bad counts, trial order
};

/// Samples `tuples_per_graph` tuples on each of `graphs` graphs drawn with
/// seeds derived from `seed`, using the pair oracle directly (no adjacency
/// materialization), and reports the frequency of the tail event.
ConcentrationResult concentration_experiment_ac(uint32_t n, double p, uint32_t k,
                                                uint32_t graphs, uint64_t tuples_per_graph,
                                                uint64_t seed, int threads = 1);

}  // namespace bclq
