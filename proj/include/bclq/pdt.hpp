#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bclq/f2.hpp"
#include "bclq/graph.hpp"

namespace bclq {

struct PdtNode {
  bool leaf = false;
  LinearForm query;          // internal nodes
  int child0 = -1, child1 = -1;
  std::optional<std::pair<VertexId, VertexId>> output;  // leaves; nullopt = undetermined
};

struct ParityDecisionTree {
  VarSpace vs;
  std::vector<PdtNode> nodes;
  int root = -1;

  uint32_t depth() const;
  void validate() const;
};

/// Evaluate the tree on a total assignment; optionally records the node path.
int run_pdt(const ParityDecisionTree& t, const BitVec& x, std::vector<int>* visited = nullptr);

/// Full binary tree of the given depth with random nonzero queries over the
/// allowed blocks (all blocks when the list is empty); leaves undetermined.
ParityDecisionTree random_pdt(const VarSpace& vs, uint32_t depth, uint64_t seed,
                              const std::vector<int>& allowed_blocks = {});

/// Search instance: find a non-adjacent pair among vertices selected in the
/// common neighborhood of M. M holds one vertex per touched block and its
/// members are pairwise adjacent.
class NonEdgeInstance {
 public:
  NonEdgeInstance(const BlockGraph& g, std::vector<VertexId> m);

  const BlockGraph& graph() const { return *g_; }
  const std::vector<VertexId>& m() const { return m_; }
  const std::vector<int>& free_blocks() const { return free_blocks_; }
  bool is_free(int block) const;
  const BlockSubset& neighborhood(int block) const;  // N^cap(M, block)
  VarSpace var_space() const { return {g_->k(), g_->bits()}; }

 private:
  const BlockGraph* g_;
  std::vector<VertexId> m_;
  std::vector<int> free_blocks_;
  std::vector<BlockSubset> neighborhoods_;  // per block; empty entry for B(M)
};

struct WalkStep {
  int node = -1;
  bool query_constant = false;
  int block = -1, bit = -1;
  uint32_t sampled = 0;   // the vertex y drawn from N^cap(M, block)
  bool pair = false;      // both y and its bit-flip neighbor stayed inside
  int branch = -1;        // followed edge, -1 if none this iteration
};

struct WalkTranscript {
  bool fail = false;
  int leaf = -1;
  std::vector<std::vector<std::pair<int, uint32_t>>> candidates;  // C
  LinearSystem equations;          // L, in insertion order
  AffineRestriction substitution;  // L in solved form
  std::vector<int> free_blocks;    // F on exit
  std::vector<int> visited;        // node path, root first
  std::vector<WalkStep> trace;
  uint32_t iterations = 0;
};

/// Random walk down the tree that mimics a uniform product draw over the
/// common neighborhoods while pinning at most one block per iteration.
WalkTranscript simulate_walk(const NonEdgeInstance& inst, const ParityDecisionTree& t,
                             uint64_t seed);

/// The three transcript invariants: the substitution determines every pinned
/// block affinely, all completions select candidate vertices inside the
/// neighborhoods, and the equations imply every parity constraint on the
/// walked path. Throws on violation.
void check_simulation_properties(const NonEdgeInstance& inst, const ParityDecisionTree& t,
                                 const WalkTranscript& w);

struct WalkDistributionReport {
  std::vector<double> walk_freq, direct_freq;  // per node
  double max_abs_diff = 0.0;
  double leaf_tv = 0.0;  // total variation over leaf distributions
};

/// Node-visit frequencies of the walk against direct evaluation on product
/// samples x_i ~ N^cap(M, i).
WalkDistributionReport walk_distribution_test(const NonEdgeInstance& inst,
                                              const ParityDecisionTree& t, uint64_t trials,
                                              uint64_t seed);

struct SuccessRateReport {
  uint64_t trials = 0, successes = 0, overruns = 0;
  double empirical() const { return trials ? double(successes) / double(trials) : 0.0; }
  double overrun_freq() const { return trials ? double(overruns) / double(trials) : 0.0; }
  double reference = 0.0;       // exp(-32 d beta - 64 d^2 (1-alpha))
  double overrun_bound = 0.0;   // exp(-d/4)
  bool violated = false;        // empirical + 3 sigma below the reference
  bool overrun_violated = false;
};

/// Requires |M| + 8*depth <= R for parameters the graph's neighborhood check
/// passed with.
SuccessRateReport success_rate(const NonEdgeInstance& inst, const ParityDecisionTree& t,
                               uint64_t trials, uint64_t seed, double alpha, double beta,
                               uint32_t R);

// --- restriction extraction -----------------------------------------------------

struct Extraction {
  AffineRestriction rho;
  std::vector<int> fixed_blocks;  // blocks pinned by rho
  std::vector<int> free_blocks;   // F'
  std::vector<VertexId> m_prime;  // new clique vertices, at most 2 per fixed block
  uint32_t rank = 0;              // rank of the satisfied system
};

struct ExtractResult {
  std::optional<Extraction> extraction;
  std::string infeasible_reason;
  bool ok() const { return extraction.has_value(); }
};

/// Builds an affine restriction satisfying `psi` from a successful walk:
/// closure blocks are pinned to concrete clique-compatible vertices, a safe
/// transversal pins all but one bit per remaining system dimension, and the
/// selected bits are solved affinely. Requires |M| + 2*rank(psi) <= R.
ExtractResult extract_restriction(const NonEdgeInstance& inst, const WalkTranscript& w,
                                  const LinearSystem& psi, uint32_t R);

/// Condition check: rho implies psi exactly, and over completions of the free
/// blocks every pinned-block vertex lands in m_prime forming a clique with
/// edges to M. Exhaustive when free bits <= budget_bits, sampled otherwise.
void check_extraction(const NonEdgeInstance& inst, const Extraction& ex, const LinearSystem& psi,
                      uint32_t budget_bits = 16, uint64_t samples = 200, uint64_t seed = 1);

/// Least (block-pair lexicographic) non-adjacent pair among the chosen
/// vertices, or nullopt. Choices are per free block and must lie inside the
/// corresponding common neighborhood.
std::optional<std::pair<VertexId, VertexId>> nonedge_oracle(
    const NonEdgeInstance& inst, const std::vector<std::pair<int, uint32_t>>& choices);

// --- serialization ----------------------------------------------------------------

void save_pdt(const ParityDecisionTree& t, std::ostream& out);
ParityDecisionTree load_pdt(std::istream& in);
void save_transcript_json(const WalkTranscript& w, std::ostream& out);

}  // namespace bclq
