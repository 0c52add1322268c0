#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "bclq/bitvec.hpp"
#include "bclq/graph.hpp"
#include "bclq/rational.hpp"

namespace bclq {

/// Bipartite input domain X x Y with X = Y = Sigma^k, Sigma = {0,1}^(log(n)/2).
/// Composite indices are block-major: block 0 is the most significant digit.
struct SplitDomain {
  uint32_t n = 0, k = 0;
  uint32_t half_bits = 0;  // log2(n)/2
  uint32_t sigma = 0;      // 2^half_bits
  uint64_t size = 0;       // sigma^k

  static SplitDomain make(uint32_t n, uint32_t k);
  uint32_t digit(uint64_t idx, uint32_t block) const {
    return uint32_t(idx >> (half_bits * (k - 1 - block))) & (sigma - 1);
  }
};

/// Solution rectangle R_{u,v}: inputs selecting the non-adjacent pair (u,v).
struct SolutionRect {
  VertexId u, v;  // u.block < v.block
  uint32_t ux = 0, uy = 0, vx = 0, vy = 0;
};

/// All solution rectangles of a graph (one per cross-block non-edge), with
/// precomputed X- and Y-side membership masks.
struct RectSet {
  SplitDomain dom;
  std::vector<SolutionRect> rects;
  std::vector<BitVec> xmask, ymask;              // per rect, over X / Y
  std::vector<std::vector<uint32_t>> by_x, by_y; // rect ids consistent per x / y

  static RectSet from_graph(const BlockGraph& g);
  uint32_t block_pair_mask(size_t r) const {
    return (1u << rects[r].u.block) | (1u << rects[r].v.block);
  }
};

constexpr int kBwInfinite = std::numeric_limits<int>::max();

/// Triangle over X x Y: membership (x,y) in T iff a[x] <= b[y].
struct Triangle {
  std::vector<Rational> a, b;
  bool member(uint64_t x, uint64_t y) const { return a[x] <= b[y]; }

  static Triangle full(uint64_t xsize, uint64_t ysize);
  static Triangle empty(uint64_t xsize, uint64_t ysize);
  /// The rectangle-shaped triangle equal to one solution rectangle.
  static Triangle of_rect(const RectSet& rs, size_t rect_id);
};

struct TriangleDagNode {
  Triangle tri;
  int child0 = -1, child1 = -1;
  int output = -1;  // rect id (or clause id for translated proofs)
};

struct TriangleDag {
  uint64_t xsize = 0, ysize = 0;
  std::vector<TriangleDagNode> nodes;
  int root = -1;
};

struct DagCheckResult {
  bool valid = true;
  std::string reason;
};

/// Exhaustive shape-DAG validity: root covers the domain, every node is
/// covered by its children, every leaf sits inside the preimage of its output.
DagCheckResult check_triangle_dag(const TriangleDag& dag,
                                  const std::function<bool(uint64_t, uint64_t, int)>& in_preimage);

// --- block width ---------------------------------------------------------------

enum class BwMode { Exact, Greedy };

/// Minimum number of distinct blocks mentioned by a rectangle cover of the
/// x-slice {y in ymask : (x,y) in T}; kBwInfinite when no cover exists.
int block_width_x(const RectSet& rs, const Triangle& t, uint64_t x, const BitVec& ymask,
                  BwMode mode = BwMode::Exact, uint32_t k_budget = 20);
int block_width_y(const RectSet& rs, const Triangle& t, uint64_t y, const BitVec& xmask,
                  BwMode mode = BwMode::Exact, uint32_t k_budget = 20);

/// Cover of an explicit slice mask (the generic core of the two above).
/// side_masks = xmask or ymask of each rect; consistent = rect ids matching
/// the fixed coordinate.
int block_width_of_slice(const RectSet& rs, const BitVec& slice,
                         const std::vector<uint32_t>& consistent,
                         const std::vector<BitVec>& side_masks, BwMode mode,
                         uint32_t k_budget, std::vector<uint32_t>* best_blocks = nullptr);

// --- progress map (bottleneck counting) ------------------------------------------

struct MuSnapshot {
  int node = -1;
  BitVec x_before, y_before;  // survivors on entry
  std::vector<uint32_t> assigned_x, assigned_y;
};

struct MuResult {
  std::vector<int> mu_x, mu_y;  // assigned node per input, -1 when unassigned
  std::vector<MuSnapshot> snaps;  // in processing order (sinks first)
  uint64_t assigned_total() const;
};

/// Processes nodes sinks-first; assigns and deletes every surviving input
/// whose current-slice block width exceeds q. Widths are measured against the
/// survivor-restricted triangle, recomputed after each deletion.
MuResult build_mu(const TriangleDag& dag, const RectSet& rs, int q);

/// The survivor-width claim: at every node entry, each surviving input has
/// slice block width at most 2q. Returns violating (node, input) pairs.
std::vector<std::pair<int, uint64_t>> check_two_q_claim(const TriangleDag& dag, const RectSet& rs,
                                                        int q, const MuResult& mu);

// --- covering tree ----------------------------------------------------------------

/// Point set over X x Y stored as one y-mask per x.
struct PointSet {
  uint64_t xsize = 0, ysize = 0;
  std::vector<BitVec> rows;  // rows[x] over Y

  static PointSet from_triangle(const Triangle& t, const BitVec& xmask, const BitVec& ymask);
  bool member(uint64_t x, uint64_t y) const { return rows[x].get(uint32_t(y)); }
  bool any() const;
  uint64_t count() const;
  BitVec column(uint64_t y) const;  // over X
};

struct CoverTreeNode {
  PointSet points;
  int parent = -1;
  int edge_rect = -1;  // rect id labeling the edge from the parent
  int block_depth = 0; // unique blocks on the root path
  std::vector<int> children;
};

struct CoverTree {
  std::vector<CoverTreeNode> nodes;  // node 0 is the root
};

/// Tree of potential coverings for a triangle restricted to survivors.
/// Precondition: every y-slice of the input has block width at most 2q.
CoverTree covering_tree(const RectSet& rs, const Triangle& t, const BitVec& xmask,
                        const BitVec& ymask, int q);

struct CoverTreeProperties {
  bool covers = true;        // every input point lies in some edge-label rect
  bool nested = true;        // per-point node chains are root-down contiguous
  bool unique_paths = true;  // one covering root-to-leaf path per x
  bool out_degree_ok = true; // fan-out > 1 implies strictly deeper children
  std::string detail;
  bool all() const { return covers && nested && unique_paths && out_degree_ok; }
};

CoverTreeProperties check_cover_tree(const CoverTree& tree, const RectSet& rs,
                                     const Triangle& t, const BitVec& xmask, const BitVec& ymask);

// --- block-depth census --------------------------------------------------------------

struct CensusRow {
  int depth = 0;
  uint64_t count = 0;
  double bound = 0.0;  // (sqrt(n)/2)^depth
  bool exceeded = false;
};

struct CensusResult {
  std::vector<CensusRow> rows;
  bool hypothesis_holds = false;  // 2 q^2 s <= sqrt(n)/4
  bool any_exceeded = false;
};

/// Per-depth node counts of the chain-contracted tree, compared against
/// (sqrt(n)/2)^d. The bound is only flagged when the hypothesis holds.
CensusResult block_depth_census(const CoverTree& tree, uint32_t n, int q, uint32_t s);

// --- serialization ---------------------------------------------------------------------

void save_triangle_dag_json(const TriangleDag& dag, std::ostream& out);
TriangleDag load_triangle_dag_json(std::istream& in);

}  // namespace bclq
