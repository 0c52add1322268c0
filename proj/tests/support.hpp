#pragma once

// Shared helpers for the test suites: refutation generation for small
// unsatisfiable formulas, hand-built proofs, random decision trees.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "bclq/cnf.hpp"
#include "bclq/pdt.hpp"
#include "bclq/proof.hpp"
#include "bclq/triangle.hpp"

namespace bclq::testsupport {

/// Tree-like resolution refutation of an unsatisfiable formula by branching
/// on variables in index order, expressed as a semantic cutting-planes proof
/// (each resolvent clause is implied by its two premises). Desk scale only.
inline CpProof dpll_cp_refutation(const CnfFormula& f) {
  struct Clause {
    std::vector<int> lits;
  };
  // refute(assignment) returns a clause over assigned variables that is
  // falsified under the current partial assignment
  std::vector<int8_t> value(f.num_vars, -1);

  CpProof proof;
  proof.num_vars = f.num_vars;
  std::map<std::vector<int>, int> line_of_clause;  // canonical lits -> line

  auto clause_line = [&](const std::vector<int>& lits, CpLine::Kind kind, int j, int k) -> int {
    std::vector<int> canon = lits;
    std::sort(canon.begin(), canon.end());
    auto it = line_of_clause.find(canon);
    if (it != line_of_clause.end()) return it->second;
    CpLine line;
    line.coeffs.assign(f.num_vars, Rational(0));
    long long negs = 0;
    for (int lit : lits) {
      uint32_t v = uint32_t(std::abs(lit)) - 1;
      line.coeffs[v] = line.coeffs[v] + (lit > 0 ? Rational(1) : Rational(-1));
      if (lit < 0) ++negs;
    }
    line.constant = Rational(1 - negs);
    line.kind = kind;
    line.from_j = j;
    line.from_k = k;
    proof.lines.push_back(std::move(line));
    int idx = int(proof.lines.size()) - 1;
    line_of_clause.emplace(std::move(canon), idx);
    return idx;
  };

  std::function<std::pair<std::vector<int>, int>()> refute = [&]() -> std::pair<std::vector<int>, int> {
    // falsified clause under the current assignment?
    for (size_t c = 0; c < f.clauses.size(); ++c) {
      bool falsified = true;
      for (int lit : f.clauses[c]) {
        int8_t v = value[std::abs(lit) - 1];
        if (v < 0 || (lit > 0) == (v == 1)) { falsified = false; break; }
      }
      if (falsified) {
        int idx = clause_line(f.clauses[c], CpLine::Axiom, -1, -1);
        return {f.clauses[c], idx};
      }
    }
    // branch on the first unassigned variable
    uint32_t x = 0;
    while (x < f.num_vars && value[x] >= 0) ++x;
    if (x == f.num_vars) throw std::invalid_argument("dpll_cp_refutation: formula is satisfiable");
    value[x] = 0;
    auto [c0, l0] = refute();
    value[x] = 1;
    auto [c1, l1] = refute();
    value[x] = -1;
    int lit = int(x) + 1;
    bool in0 = std::find(c0.begin(), c0.end(), lit) != c0.end();
    if (!in0) return {c0, l0};  // branch variable unused, clause already false
    bool in1 = std::find(c1.begin(), c1.end(), -lit) != c1.end();
    if (!in1) return {c1, l1};
    std::vector<int> res;
    for (int l : c0)
      if (l != lit) res.push_back(l);
    for (int l : c1)
      if (l != -lit && std::find(res.begin(), res.end(), l) == res.end()) res.push_back(l);
    int idx = clause_line(res, CpLine::Infer, l0, l1);
    return {res, idx};
  };

  auto [empty_clause, last] = refute();
  if (!empty_clause.empty()) throw std::logic_error("dpll_cp_refutation: nonempty final clause");
  (void)last;
  return proof;
}

/// The same branching refutation as plain resolution over linear clauses.
inline ResPlusProof dpll_resplus_refutation(const CnfFormula& f, const VarSpace& vs) {
  ResPlusProof proof;
  proof.vs = vs;
  std::vector<int8_t> value(f.num_vars, -1);
  std::map<std::string, int> line_of;

  auto to_clause = [&](const std::vector<int>& lits) {
    LinearClause cl;
    for (int lit : lits)
      cl.eqs.push_back({BitVec::unit(vs.num_vars(), uint32_t(std::abs(lit)) - 1),
                        uint8_t(lit > 0 ? 1 : 0)});
    cl.canonicalize();
    return cl;
  };
  auto key_of = [&](const std::vector<int>& lits) {
    auto s = lits;
    std::sort(s.begin(), s.end());
    std::string key;
    for (int l : s) key += std::to_string(l) + ",";
    return key;
  };
  auto add_line = [&](const std::vector<int>& lits, ResPlusLine::Kind kind, int j, int k,
                      uint32_t pivot_var) -> int {
    auto key = key_of(lits);
    auto it = line_of.find(key);
    if (it != line_of.end()) return it->second;
    ResPlusLine line;
    line.clause = to_clause(lits);
    line.kind = kind;
    line.from_j = j;
    line.from_k = k;
    if (kind == ResPlusLine::Resolution)
      line.pivot = BitVec::unit(vs.num_vars(), pivot_var);
    proof.lines.push_back(std::move(line));
    line_of.emplace(key, int(proof.lines.size()) - 1);
    return int(proof.lines.size()) - 1;
  };

  std::function<std::pair<std::vector<int>, int>()> refute = [&]() -> std::pair<std::vector<int>, int> {
    for (size_t c = 0; c < f.clauses.size(); ++c) {
      bool falsified = true;
      for (int lit : f.clauses[c]) {
        int8_t v = value[std::abs(lit) - 1];
        if (v < 0 || (lit > 0) == (v == 1)) { falsified = false; break; }
      }
      if (falsified) return {f.clauses[c], add_line(f.clauses[c], ResPlusLine::Axiom, -1, -1, 0)};
    }
    uint32_t x = 0;
    while (x < f.num_vars && value[x] >= 0) ++x;
    if (x == f.num_vars) throw std::invalid_argument("dpll_resplus_refutation: satisfiable");
    value[x] = 0;
    auto [c0, l0] = refute();
    value[x] = 1;
    auto [c1, l1] = refute();
    value[x] = -1;
    int lit = int(x) + 1;
    if (std::find(c0.begin(), c0.end(), lit) == c0.end()) return {c0, l0};
    if (std::find(c1.begin(), c1.end(), -lit) == c1.end()) return {c1, l1};
    std::vector<int> res;
    for (int l : c0)
      if (l != lit) res.push_back(l);
    for (int l : c1)
      if (l != -lit && std::find(res.begin(), res.end(), l) == res.end()) res.push_back(l);
    // premise with (x=1) first: that is c0, falsified when x=0
    return {res, add_line(res, ResPlusLine::Resolution, l0, l1, x)};
  };

  auto [empty_clause, last] = refute();
  if (!empty_clause.empty()) throw std::logic_error("dpll_resplus_refutation: nonempty final clause");
  (void)last;
  return proof;
}

/// First seed whose sampled graph has no transversal clique.
inline uint64_t find_unsat_seed(uint32_t n, uint32_t k, double p, uint64_t start = 0) {
  for (uint64_t seed = start;; ++seed) {
    auto g = BlockGraph::sample({n, k, p, seed});
    if (!has_transversal_clique(g)) return seed;
  }
}

using bclq::random_pdt;

// --- exhaustive oracles -------------------------------------------------------

inline uint32_t rank_oracle(const std::vector<LinearEq>& rows, uint32_t nvars) {
  std::vector<std::vector<uint8_t>> m;
  for (const auto& r : rows) {
    std::vector<uint8_t> row(nvars);
    for (uint32_t v = 0; v < nvars; ++v) row[v] = r.form.get(v);
    m.push_back(row);
  }
  uint32_t rank = 0;
  for (uint32_t c = 0; c < nvars; ++c) {
    size_t piv = SIZE_MAX;
    for (size_t r = rank; r < m.size(); ++r)
      if (m[r][c]) { piv = r; break; }
    if (piv == SIZE_MAX) continue;
    std::swap(m[rank], m[piv]);
    for (size_t r = 0; r < m.size(); ++r)
      if (r != rank && m[r][c])
        for (uint32_t cc = 0; cc < nvars; ++cc) m[r][cc] ^= m[rank][cc];
    ++rank;
  }
  return rank;
}

/// Safety by enumerating every block-distinct column selection.
inline bool safe_oracle(const std::vector<LinearForm>& forms, const VarSpace& vs) {
  uint32_t m = uint32_t(forms.size());
  if (m == 0) return true;
  if (m > vs.k) return false;
  std::vector<uint32_t> chosen;
  std::function<bool(uint32_t)> pick_blocks = [&](uint32_t start) -> bool {
    if (chosen.size() == m) {
      std::vector<uint32_t> sel(m, 0);
      std::function<bool(uint32_t)> pick_vars = [&](uint32_t d) -> bool {
        if (d == m) {
          std::vector<LinearEq> cols;
          for (uint32_t r = 0; r < m; ++r) {
            LinearForm col(m);
            for (uint32_t q = 0; q < m; ++q)
              if (forms[q].get(vs.var(chosen[r], sel[r]))) col.flip(q);
            cols.push_back({col, 0});
          }
          return rank_oracle(cols, m) == m;
        }
        for (uint32_t j = 0; j < vs.bits; ++j) {
          sel[d] = j;
          if (pick_vars(d + 1)) return true;
        }
        return false;
      };
      return pick_vars(0);
    }
    for (uint32_t b = start; b < vs.k; ++b) {
      chosen.push_back(b);
      if (pick_blocks(b + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return pick_blocks(0);
}

/// Closure by scanning all block subsets for the inclusion-minimal safe one.
/// Returns nullopt when the minimal set is not unique.
inline std::optional<std::vector<uint32_t>> closure_oracle(const std::vector<LinearForm>& forms,
                                                           const VarSpace& vs) {
  std::vector<std::vector<uint32_t>> safe_sets;
  for (uint32_t mask = 0; mask < (1u << vs.k); ++mask) {
    std::vector<uint32_t> S;
    for (uint32_t b = 0; b < vs.k; ++b)
      if ((mask >> b) & 1) S.push_back(b);
    if (safe_oracle(restricted_basis(forms, S, vs), vs)) safe_sets.push_back(S);
  }
  std::vector<std::vector<uint32_t>> minimal;
  for (const auto& s : safe_sets) {
    bool is_min = true;
    for (const auto& t : safe_sets) {
      if (t.size() >= s.size() || t == s) continue;
      if (std::includes(s.begin(), s.end(), t.begin(), t.end())) { is_min = false; break; }
    }
    if (is_min) minimal.push_back(s);
  }
  if (minimal.size() != 1) return std::nullopt;
  return minimal[0];
}

/// Block width by scanning block subsets with per-point rectangle membership.
inline int bw_oracle_x(const RectSet& rs, const Triangle& t, uint64_t x, const BitVec& ymask) {
  std::vector<uint32_t> slice;
  for (uint32_t y = 0; y < ymask.size(); ++y)
    if (ymask.get(y) && t.member(x, y)) slice.push_back(y);
  if (slice.empty()) return 0;
  int best = kBwInfinite;
  for (uint32_t m = 1; m < (1u << rs.dom.k); ++m) {
    bool all = true;
    for (uint32_t y : slice) {
      bool hit = false;
      for (size_t id = 0; id < rs.rects.size() && !hit; ++id) {
        if (rs.block_pair_mask(id) & ~m) continue;
        hit = rs.xmask[id].get(uint32_t(x)) && rs.ymask[id].get(y);
      }
      if (!hit) { all = false; break; }
    }
    if (all) best = std::min(best, int(std::popcount(m)));
  }
  return best;
}

// --- hand-built refutations of the edgeless n=2, k=2 block formula -------------

inline CpLine make_cp_line(std::vector<long long> coeffs, long long c, CpLine::Kind kind,
                           int j = -1, int k = -1) {
  CpLine l;
  for (long long x : coeffs) l.coeffs.push_back(Rational(x));
  l.constant = Rational(c);
  l.kind = kind;
  l.from_j = j;
  l.from_k = k;
  return l;
}

inline CpProof edgeless22_cp() {
  CpProof p;
  p.num_vars = 2;
  p.lines.push_back(make_cp_line({1, 1}, 1, CpLine::Axiom));
  p.lines.push_back(make_cp_line({1, -1}, 0, CpLine::Axiom));
  p.lines.push_back(make_cp_line({-1, 1}, 0, CpLine::Axiom));
  p.lines.push_back(make_cp_line({-1, -1}, -1, CpLine::Axiom));
  p.lines.push_back(make_cp_line({1, 0}, 1, CpLine::Infer, 0, 1));
  p.lines.push_back(make_cp_line({-1, 0}, 0, CpLine::Infer, 2, 3));
  p.lines.push_back(make_cp_line({0, 0}, 1, CpLine::Infer, 4, 5));
  return p;
}

inline ResPlusProof edgeless22_resplus() {
  VarSpace vs{2, 1};
  auto eq = [&](std::initializer_list<int> vars, uint8_t rhs) {
    LinearForm f(vs.num_vars());
    for (int v : vars) f.flip(uint32_t(v));
    return LinearEq{f, rhs};
  };
  auto rline = [&](LinearClause cl, ResPlusLine::Kind kind, int j = -1, int k = -1,
                   LinearForm pivot = {}) {
    ResPlusLine l;
    l.clause = std::move(cl);
    l.kind = kind;
    l.from_j = j;
    l.from_k = k;
    l.pivot = std::move(pivot);
    return l;
  };
  ResPlusProof p;
  p.vs = vs;
  auto parity = eq({0, 1}, 0).form;
  LinearClause c1{{eq({0}, 1), eq({1}, 1)}};
  LinearClause c2{{eq({0}, 1), eq({1}, 0)}};
  LinearClause c3{{eq({0}, 0), eq({1}, 1)}};
  LinearClause c4{{eq({0}, 0), eq({1}, 0)}};
  p.lines.push_back(rline(c1, ResPlusLine::Axiom));
  p.lines.push_back(rline(c2, ResPlusLine::Axiom));
  p.lines.push_back(rline(c3, ResPlusLine::Axiom));
  p.lines.push_back(rline(c4, ResPlusLine::Axiom));
  p.lines.push_back(rline(LinearClause{{{parity, 1}, eq({1}, 1)}}, ResPlusLine::Weakening, 0));
  p.lines.push_back(rline(LinearClause{{{parity, 1}, eq({1}, 0)}}, ResPlusLine::Weakening, 3));
  p.lines.push_back(rline(LinearClause{{{parity, 0}, eq({1}, 0)}}, ResPlusLine::Weakening, 1));
  p.lines.push_back(rline(LinearClause{{{parity, 0}, eq({1}, 1)}}, ResPlusLine::Weakening, 2));
  p.lines.push_back(rline(LinearClause{{{parity, 1}}}, ResPlusLine::Resolution, 4, 5,
                          eq({1}, 0).form));
  p.lines.push_back(rline(LinearClause{{{parity, 0}}}, ResPlusLine::Resolution, 7, 6,
                          eq({1}, 0).form));
  p.lines.push_back(rline(LinearClause{}, ResPlusLine::Resolution, 8, 9, parity));
  return p;
}

}  // namespace bclq::testsupport
