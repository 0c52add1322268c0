#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bclq/graph.hpp"

namespace bclq {

/// Plain (non-partite) graph used as input for the flat binary encoding.
class SimpleGraph {
 public:
  explicit SimpleGraph(uint32_t num_vertices);
  static SimpleGraph complete(uint32_t nv);
  static SimpleGraph edgeless(uint32_t nv);
  static SimpleGraph sample(uint32_t nv, double p, uint64_t seed);
  /// Flatten a block graph onto its global vertex set (cross edges only).
  static SimpleGraph from_block_graph(const BlockGraph& g);

  uint32_t num_vertices() const { return nv_; }
  bool adjacent(uint32_t u, uint32_t v) const { return adj_[size_t(u) * nv_ + v]; }
  void add_edge(uint32_t u, uint32_t v);
  uint64_t edge_count() const;

  bool has_clique(uint32_t k) const;  // brute force, desk scale only

 private:
  uint32_t nv_;
  std::vector<uint8_t> adj_;
};

struct ClauseTag {
  enum Kind { EdgeAxiom, FunctionalityAxiom } kind = EdgeAxiom;
  // EdgeAxiom: anti-selected vertices u at column i, v at column j.
  // FunctionalityAxiom: vertex u at columns i and j (v unused).
  uint32_t u = 0, v = 0;
  int i = 0, j = 0;

  friend bool operator==(const ClauseTag&, const ClauseTag&) = default;
};

/// CNF over column-structured variables. Column i (0-based) holds
/// `bits_per_column` variables, var(i,a) = i*bits_per_column + a with a=0 the
/// most significant bit of the encoded vertex. DIMACS numbering is var+1.
struct CnfFormula {
  uint32_t num_vars = 0;
  uint32_t columns = 0;
  uint32_t bits_per_column = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS-style literals, 1-based
  std::vector<ClauseTag> tags;            // parallel to clauses (may be empty)
  std::string encoding;                   // "bin-clique" | "block-clique" | ...

  uint32_t var(int column, uint32_t bit) const { return column * bits_per_column + bit; }

  bool clause_satisfied(size_t idx, const std::vector<uint8_t>& assignment) const;
};

/// Total assignment, one bit per variable.
struct Assignment {
  std::vector<uint8_t> bits;

  static Assignment from_columns(const CnfFormula& f, const std::vector<uint32_t>& vertex_per_column);
  uint32_t column_vertex(const CnfFormula& f, int column) const;
};

/// Flat binary clique encoding: edge axioms for non-adjacent vertex pairs in
/// all ordered column pairs, functionality axioms for every vertex and
/// unordered column pair. |V| must be a power of two.
CnfFormula encode_bin_clique(const SimpleGraph& g, uint32_t k);

/// Block encoding: one edge axiom per cross-block non-edge; no functionality
/// axioms. k*log2(n) variables.
CnfFormula encode_block_clique(const BlockGraph& g);

/// Least-index clause falsified by a total assignment, or nullopt.
std::optional<size_t> search_falsified(const CnfFormula& f, const Assignment& a);

/// Fix the top log2(k) bits of every column to that column's block id,
/// simplify, and renumber the surviving variables. The input must be a flat
/// encoding over N = n*k vertices with blocks of n consecutive indices.
CnfFormula block_restriction(const CnfFormula& f_bin, uint32_t k);

// --- DIMACS -----------------------------------------------------------------

void to_dimacs(const CnfFormula& f, std::ostream& out,
               const std::vector<std::string>& comments = {});
CnfFormula from_dimacs(std::istream& in);

void save_clause_tags_json(const CnfFormula& f, std::ostream& out);

// --- brute-force oracles (desk scale) ----------------------------------------

bool satisfiable_bruteforce(const CnfFormula& f);
/// Does g have a transversal clique (one vertex per block)?
bool has_transversal_clique(const BlockGraph& g);

}  // namespace bclq
