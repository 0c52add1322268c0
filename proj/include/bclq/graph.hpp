#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bclq/util.hpp"

namespace bclq {

/// One vertex of a block graph: block index in [0,k) and position in [0,n).
struct VertexId {
  int block = 0;
  uint32_t index = 0;

  friend bool operator==(const VertexId&, const VertexId&) = default;
  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

struct GraphParams {
  uint32_t n = 0;  // vertices per block, power of two
  uint32_t k = 0;  // number of blocks
  double p = 0.0;  // cross-block edge probability
  uint64_t seed = 0;
};

/// Pure function deciding whether the cross-block pair (gu, gv) of global ids
/// is an edge under the given parameters. Membership is hash-derived per
/// unordered pair, so graphs rebuild identically under any construction order.
bool pair_present(const GraphParams& pr, uint64_t gu, uint64_t gv);

/// Set of vertices within one block, as an n-bit mask.
class BlockSubset {
 public:
  BlockSubset() = default;
  BlockSubset(int block, uint32_t n, bool full);

  int block() const { return block_; }
  uint32_t n() const { return n_; }
  bool contains(uint32_t idx) const { return (w_[idx >> 6] >> (idx & 63)) & 1; }
  void remove(uint32_t idx) { w_[idx >> 6] &= ~(1ull << (idx & 63)); }
  void add(uint32_t idx) { w_[idx >> 6] |= 1ull << (idx & 63); }
  uint32_t count() const;
  /// t-th member in increasing index order, t in [0, count())
  uint32_t nth(uint32_t t) const;
  std::vector<uint32_t> indices() const;
  void intersect_words(const uint64_t* words);  // AND with a raw n-bit mask

  const std::vector<uint64_t>& words() const { return w_; }

 private:
  int block_ = 0;
  uint32_t n_ = 0;
  std::vector<uint64_t> w_;
};

/// k-partite graph with n vertices per block and bitset adjacency rows.
/// Immutable once built; all queries are safe to run concurrently.
class BlockGraph {
 public:
  /// Sample from the cross-block p-biased distribution. Deterministic in
  /// (n, p, k, seed) regardless of thread count.
  static BlockGraph sample(const GraphParams& pr, int threads = 1);
  static BlockGraph complete(uint32_t n, uint32_t k);
  static BlockGraph edgeless(uint32_t n, uint32_t k);
  /// Build from an explicit cross-block edge list of global-id pairs.
  static BlockGraph from_edges(uint32_t n, uint32_t k,
                               const std::vector<std::pair<uint64_t, uint64_t>>& edges,
                               std::optional<GraphParams> meta = std::nullopt);

  uint32_t n() const { return n_; }
  uint32_t k() const { return k_; }
  uint32_t bits() const { return bits_; }  // log2(n)
  uint64_t num_vertices() const { return uint64_t(n_) * k_; }
  const std::optional<GraphParams>& meta() const { return meta_; }

  uint64_t gid(VertexId v) const { return uint64_t(v.block) * n_ + v.index; }
  VertexId vertex(uint64_t g) const { return {int(g / n_), uint32_t(g % n_)}; }

  bool adjacent(VertexId u, VertexId v) const {
    return adjacent_gid(gid(u), gid(v));
  }
  bool adjacent_gid(uint64_t gu, uint64_t gv) const {
    return (rows_[gu * stride_ + (gv >> 6)] >> (gv & 63)) & 1;
  }

  uint64_t edge_count() const;
  std::vector<std::pair<uint64_t, uint64_t>> edges() const;  // sorted, u < v

  /// Adjacency row of u restricted to block i, as an n-bit subset of block i.
  BlockSubset neighbors_in_block(VertexId u, int i) const;

  /// N^cap(U, i): vertices of block i adjacent to every member of U.
  /// U may be empty (returns the whole block). Throws if i is a block of U.
  BlockSubset common_neighborhood(const std::vector<VertexId>& U, int i) const;

  /// Structural invariants: symmetry and no same-block edges.
  void validate() const;

 private:
  BlockGraph() = default;
  void init(uint32_t n, uint32_t k);
  void set_edge(uint64_t gu, uint64_t gv);

  uint32_t n_ = 0, k_ = 0, bits_ = 0;
  size_t stride_ = 0;                // words per adjacency row
  std::vector<uint64_t> rows_;       // k*n rows, stride_ words each
  std::optional<GraphParams> meta_;
};

/// MSB-first binary encoding of a vertex index: bit 0 of the result is the
/// most significant bit of idx. Round trip with bits_to_index is identity.
std::vector<uint8_t> vertex_bits(uint32_t idx, uint32_t n);
uint32_t bits_to_index(const std::vector<uint8_t>& bits);

/// First half of the MSB-first encoding (requires log2(n) even).
uint32_t x_half(uint32_t idx, uint32_t n);
uint32_t y_half(uint32_t idx, uint32_t n);
uint32_t index_from_halves(uint32_t xh, uint32_t yh, uint32_t n);

// --- graph file format (BCLQ-1) -------------------------------------------

void save_graph_json(const BlockGraph& g, std::ostream& out);
BlockGraph load_graph_json(std::istream& in);

}  // namespace bclq
