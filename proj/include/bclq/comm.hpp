#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bclq/graph.hpp"
#include "bclq/triangle.hpp"

namespace bclq {

/// Two-party protocol over the split domain: Alice holds x, Bob holds y.
/// Node bit functions are explicit tables over the speaker's side.
struct ProtocolNode {
  bool leaf = false;
  int speaker = 0;               // 0 = Alice (x side), 1 = Bob (y side)
  std::vector<uint8_t> table;    // size = xsize or ysize; spoken bit per input
  int child0 = -1, child1 = -1;
  std::pair<VertexId, VertexId> output;  // leaves
  // cached rectangle; child rectangles partition the parent's along the
  // speaker's side
  BitVec xset, yset;
};

struct Protocol {
  SplitDomain dom;
  std::vector<ProtocolNode> nodes;
  int root = -1;

  void compute_rectangles();
  void validate() const;  // rectangle cache consistent with the tables
  uint32_t cost() const;  // max bits spoken on a root-to-leaf path
};

int run_protocol(const Protocol& p, uint64_t x, uint64_t y, std::vector<int>* visited = nullptr);

// --- min-entropy and spread ---------------------------------------------------

/// Min-entropy of the uniform distribution over `values` projected to the
/// coordinate subset I (bit positions, MSB-first strings of width m).
double min_entropy(const std::vector<uint64_t>& values, uint32_t m, const std::vector<uint32_t>& I);

struct SpreadReport {
  std::vector<uint32_t> fixed;        // coordinates constant on the set
  bool spread_ok = true;              // every free subset has H_inf >= gamma |I|
  double min_margin = 0.0;            // min over subsets of H_inf - gamma |I|
  std::vector<uint32_t> worst_subset; // first violating (or tightest) subset
};

/// Checks gamma-spread of the distribution on the free coordinates: every
/// nonempty subset I of them must satisfy H_inf(projection) >= gamma |I|.
SpreadReport spread_check(const std::vector<uint64_t>& values, uint32_t m, double gamma,
                          uint32_t budget_bits = 20);

struct SubcubeReport {
  SpreadReport x_side, y_side;
  bool subcube_like() const { return x_side.spread_ok && y_side.spread_ok; }
};

SubcubeReport subcube_like_check(const Protocol& p, int node, double gamma,
                                 uint32_t budget_bits = 20);

/// Verdict over every node of the protocol.
bool protocol_subcube_like(const Protocol& p, double gamma, int* first_bad_node = nullptr);

// --- error and census -----------------------------------------------------------

struct ErrorReport {
  uint64_t trials = 0, errors = 0;
  bool exhaustive = false;
  double error() const { return trials ? double(errors) / double(trials) : 0.0; }
};

/// Probability over uniform inputs that the leaf's output pair is not a valid
/// non-edge among the selected vertices.
ErrorReport distributional_error_exhaustive(const Protocol& p, const BlockGraph& g);
ErrorReport distributional_error_sampled(const Protocol& p, const BlockGraph& g, uint64_t trials,
                                         uint64_t seed);

struct LeafRecord {
  int node = -1;
  std::vector<int> fixed_blocks;  // D_l
  bool safe = false;              // both output blocks fixed somewhere
  double p_nonedge = 0.0;         // exact non-edge probability of the output
                                  // blocks' selected pair over the rectangle
  uint64_t rect_size = 0;
  double reach = 0.0;             // probability of reaching the leaf
};

/// Per-leaf bookkeeping: fixed blocks, safe/dangerous classification and the
/// exact conditional non-edge probability of the output block pair.
std::vector<LeafRecord> leaf_census(const Protocol& p, const BlockGraph& g);

/// Alice sends her halves for the first two blocks, Bob answers with his; the
/// leaf outputs the selected pair of blocks (0, 1).
Protocol baseline_protocol(const SplitDomain& dom);
/// Zero-communication protocol answering a fixed pair.
Protocol fixed_pair_protocol(const SplitDomain& dom, VertexId u, VertexId v);

// --- serialization ------------------------------------------------------------------

void save_protocol_json(const Protocol& p, std::ostream& out);
Protocol load_protocol_json(std::istream& in);

}  // namespace bclq
