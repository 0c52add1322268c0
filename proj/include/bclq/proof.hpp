#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bclq/cnf.hpp"
#include "bclq/f2.hpp"
#include "bclq/rational.hpp"
#include "bclq/triangle.hpp"

namespace bclq {

// --- semantic cutting planes -------------------------------------------------

struct CpLine {
  std::vector<Rational> coeffs;  // one per variable
  Rational constant;             // coeffs . x >= constant
  enum Kind { Axiom, Infer } kind = Axiom;
  int from_j = -1, from_k = -1;  // 0-based premise indices for Infer
  int axiom_clause = -1;         // matched clause index (bounds: -1), set by the verifier
};

struct CpProof {
  uint32_t num_vars = 0;
  std::vector<CpLine> lines;
};

struct VerifyError {
  size_t step = 0;  // 0-based line index
  std::string reason;
};

struct CpOk {
  size_t length = 0;
};

using CpVerifyResult = std::variant<CpOk, VerifyError>;

/// Checks every line: axioms must match a clause translation
/// (sum of literals >= 1) or a variable bound (x >= 0, -x >= -1); inferred
/// lines must be semantically implied by their two premises over {0,1}^n,
/// checked by exhaustive enumeration. The final line must be 0 >= 1.
CpVerifyResult verify_cp(const CnfFormula& axioms, CpProof& proof, uint32_t var_budget = 24);

// --- resolution over parities ---------------------------------------------------

/// Disjunction of linear equations; empty disjunction is the empty clause.
struct LinearClause {
  std::vector<LinearEq> eqs;

  void canonicalize();
  bool satisfied_by(const BitVec& x) const;
  friend bool operator==(const LinearClause&, const LinearClause&) = default;
};

struct ResPlusLine {
  LinearClause clause;
  enum Kind { Axiom, Resolution, Weakening } kind = Axiom;
  int from_j = -1, from_k = -1;  // premises (Weakening uses from_j only)
  LinearForm pivot;              // Resolution only
  int axiom_clause = -1;
};

struct ResPlusProof {
  VarSpace vs;
  std::vector<ResPlusLine> lines;
};

struct ResPlusOk {
  size_t length = 0;
  uint32_t depth = 0;  // resolution steps on the deepest axiom-to-sink path
};

using ResPlusVerifyResult = std::variant<ResPlusOk, VerifyError>;

/// Rules: resolution requires (pivot=1) in line j and (pivot=0) in line k and
/// the conclusion to be the union of the remaining equations; weakening is
/// checked semantically by exhaustive enumeration. The final line must be the
/// empty clause. Weakening steps do not count toward depth.
ResPlusVerifyResult verify_resplus(const CnfFormula& f, ResPlusProof& proof,
                                   uint32_t var_budget = 24);

// --- translations to shape DAGs ---------------------------------------------------

/// X-side variables of a split; the complement is the Y side. The standard
/// clique split takes the first half of every column's bits.
struct VarSplit {
  std::vector<uint32_t> x_vars, y_vars;  // ascending

  static VarSplit standard_halves(uint32_t columns, uint32_t bits_per_column);
};

/// Node-per-line triangle DAG for the falsified-clause search problem over
/// the split domain. Requires a verified proof (axiom_clause fields set).
TriangleDag cp_to_triangle_dag(const CnfFormula& axioms, const CpProof& proof,
                               const VarSplit& split);

/// Exhaustive validity check of a translated DAG against Search_F.
DagCheckResult check_search_dag(const TriangleDag& dag, const CnfFormula& f, const VarSplit& split);

// --- affine DAGs --------------------------------------------------------------------

struct AffineDagNode {
  LinearSystem space;            // assignments reaching this node
  bool branch = false;           // true: two children labeled query=0 / query=1
  LinearForm query;              // branch nodes only
  int child0 = -1, child1 = -1;  // branch: query=0 / query=1; forward: child0
  int output = -1;               // leaf: clause index
};

struct AffineDag {
  VarSpace vs;
  std::vector<AffineDagNode> nodes;
  int root = -1;

  uint32_t depth() const;  // max branch nodes on any root-to-leaf path
};

/// Top-down dualization of a verified refutation: node v carries the affine
/// subspace falsifying its clause, resolution steps become branch nodes
/// querying the pivot, weakenings become forward edges.
AffineDag resplus_to_affine_dag(const CnfFormula& f, const ResPlusProof& proof);

/// Exhaustive validity: root is the full space, branch children are implied
/// by parent plus the query value, forward children contain the parent,
/// leaves sit inside the preimage of their output clause.
DagCheckResult check_affine_dag(const AffineDag& dag, const CnfFormula& f);

// --- proof text files ----------------------------------------------------------------

/// Line-oriented format:
///   p cp <num_vars>
///   cp <constant> <c1> ... <cn> axiom [<clause>]
///   cp <constant> <c1> ... <cn> from <j> [<k>]     (1-based premises)
/// Rationals are written as "a" or "a/b".
CpProof parse_cp_proof(std::istream& in);
void write_cp_proof(const CpProof& proof, std::ostream& out);

/// Line-oriented format:
///   p rlin <k> <bits>
///   rlin <clause> axiom [<clause-index>]
///   rlin <clause> res <j> <k> <pivot>
///   rlin <clause> weaken <j>
/// Clause: "empty" or equations "1+3=0|2=1" over 1-based variables; pivot is
/// a form like "2" or "1+4".
ResPlusProof parse_resplus_proof(std::istream& in);
void write_resplus_proof(const ResPlusProof& proof, std::ostream& out);

}  // namespace bclq
