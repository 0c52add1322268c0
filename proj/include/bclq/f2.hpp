#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bclq/bitvec.hpp"
#include "bclq/graph.hpp"
#include "bclq/util.hpp"

namespace bclq {

/// Variables are x_{i,j} for block i in [0,k) and bit j in [0,bits);
/// var id = i*bits + j.
struct VarSpace {
  uint32_t k = 0;
  uint32_t bits = 0;
  uint32_t num_vars() const { return k * bits; }
  uint32_t var(uint32_t block, uint32_t bit) const { return block * bits + bit; }
  uint32_t block_of(uint32_t v) const { return v / bits; }
  uint32_t bit_of(uint32_t v) const { return v % bits; }

  friend bool operator==(const VarSpace&, const VarSpace&) = default;
};

using LinearForm = BitVec;  // coefficient vector over a VarSpace

struct LinearEq {
  LinearForm form;
  uint8_t rhs = 0;

  friend bool operator==(const LinearEq&, const LinearEq&) = default;
};

/// System of F2 equations with a cached reduced echelon form.
class LinearSystem {
 public:
  LinearSystem() = default;
  explicit LinearSystem(VarSpace vs) : vs_(vs) {}

  const VarSpace& space() const { return vs_; }
  const std::vector<LinearEq>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  size_t size() const { return rows_.size(); }

  void add_row(LinearForm f, uint8_t rhs);
  void add_row(const LinearEq& e) { add_row(e.form, e.rhs); }

  uint32_t rank() const;        // rank of the coefficient matrix
  bool consistent() const;
  /// Is `eq` implied by this system over F2?
  bool implies(const LinearEq& eq) const;
  bool implies(const LinearSystem& other) const;
  /// Any solution, or nullopt when inconsistent. Free variables are 0.
  std::optional<BitVec> solve() const;
  bool satisfied_by(const BitVec& assignment) const;

  /// Independent rows spanning the same solution constraints (in reduced
  /// echelon form). Drops redundant rows; keeps one 0=1 row if inconsistent.
  LinearSystem reduced() const;

  friend bool operator==(const LinearSystem& a, const LinearSystem& b) {
    return a.vs_ == b.vs_ && a.rows_ == b.rows_;
  }

 private:
  struct Ech {
    std::vector<LinearEq> rows;  // reduced, pivot columns strictly increasing
    std::vector<int> pivot;      // pivot column per row
    bool inconsistent = false;
  };
  const Ech& ech() const;

  VarSpace vs_;
  std::vector<LinearEq> rows_;
  mutable std::optional<Ech> cache_;
};

/// Block-respecting affine restriction: blocks outside `free_blocks` have all
/// their variables expressed as affine functions of free-block variables.
class AffineRestriction {
 public:
  AffineRestriction() = default;
  explicit AffineRestriction(VarSpace vs);

  const VarSpace& space() const { return vs_; }
  bool is_free_var(uint32_t v) const { return !expr_[v].has_value(); }
  bool is_free_block(uint32_t b) const;
  std::vector<int> free_blocks() const;
  std::vector<int> fixed_blocks() const;

  /// Pin variable v to the affine expression (coeffs over free vars, cst).
  /// Existing expressions referencing v are updated, keeping substitution
  /// idempotent.
  void pin(uint32_t v, LinearForm coeffs, uint8_t cst);
  void pin_constant(uint32_t v, uint8_t cst);

  struct Expr {
    LinearForm coeffs;
    uint8_t cst = 0;
  };
  const std::optional<Expr>& expr(uint32_t v) const { return expr_[v]; }

  /// Substitute into a linear form: result form over free vars plus constant.
  std::pair<LinearForm, uint8_t> apply(const LinearForm& f) const;
  LinearSystem apply(const LinearSystem& s) const;

  /// The linear system { v + expr_v = cst_v } over all pinned variables.
  LinearSystem induced_system() const;

  /// Extend an assignment of the free variables to all variables.
  BitVec complete(const BitVec& free_assignment) const;

  void validate() const;  // expressions reference only free vars

 private:
  VarSpace vs_;
  std::vector<std::optional<Expr>> expr_;
};

// --- safety and closure -------------------------------------------------------

/// A set of forms is dangerous when it mentions fewer blocks than its size;
/// safe when no subset is dangerous. For an independent set this is decided
/// by matroid intersection: safe iff one variable per distinct block can be
/// chosen with linearly independent coefficient columns.
struct SafetyResult {
  bool safe = false;
  /// On success: chosen variable per form (the independent transversal).
  std::vector<uint32_t> transversal;
  /// On failure: a block set T certifying a dangerous subset (the forms
  /// supported inside T outnumber |T|).
  std::vector<uint32_t> deficient_blocks;
};

SafetyResult analyze_safety(const std::vector<LinearForm>& independent_forms, const VarSpace& vs);
bool is_safe(const std::vector<LinearForm>& independent_forms, const VarSpace& vs);

/// Zero out all variables of the given blocks.
LinearForm zero_blocks(const LinearForm& f, const std::vector<uint32_t>& blocks, const VarSpace& vs);

/// Cl(F): unique minimal block set whose zeroing makes (a basis of) F safe.
std::vector<uint32_t> closure(const std::vector<LinearForm>& forms, const VarSpace& vs);

/// Basis of { f[\blocks] : f in forms } with zero rows dropped.
std::vector<LinearForm> restricted_basis(const std::vector<LinearForm>& forms,
                                         const std::vector<uint32_t>& blocks, const VarSpace& vs);

uint32_t dim_of(const std::vector<LinearForm>& forms);

// --- rank-probability experiment ------------------------------------------------

struct RankProbabilityResult {
  uint32_t rank = 0;
  uint64_t trials = 0;
  uint64_t hits = 0;
  double empirical() const { return trials ? double(hits) / double(trials) : 0.0; }
  double reference = 1.0;  // (3/4)^rank
  bool violated = false;   // empirical > reference + 3 standard errors
};

/// Samples one vertex per block from the allowed sets A_i (each |A_i| >= 2n/3)
/// and measures how often the assembled assignment satisfies the system.
RankProbabilityResult rank_probability_experiment(const LinearSystem& psi,
                                                  const std::vector<std::vector<uint32_t>>& allowed,
                                                  uint32_t n, uint64_t trials, uint64_t seed);

// --- serialization ---------------------------------------------------------------

/// Lines of 0/1 coefficient strings followed by the constant bit.
void save_linear_system(const LinearSystem& s, std::ostream& out);
LinearSystem load_linear_system(std::istream& in, const VarSpace& vs);

}  // namespace bclq
