#include "bclq/cnf.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bclq/util.hpp"

namespace bclq {

// --- SimpleGraph -------------------------------------------------------------

SimpleGraph::SimpleGraph(uint32_t nv) : nv_(nv), adj_(size_t(nv) * nv, 0) {}

SimpleGraph SimpleGraph::complete(uint32_t nv) {
  SimpleGraph g(nv);
  for (uint32_t u = 0; u < nv; ++u)
    for (uint32_t v = u + 1; v < nv; ++v) g.add_edge(u, v);
  return g;
}

SimpleGraph SimpleGraph::edgeless(uint32_t nv) { return SimpleGraph(nv); }

SimpleGraph SimpleGraph::sample(uint32_t nv, double p, uint64_t seed) {
  SimpleGraph g(nv);
  Rng rng(seed);
  for (uint32_t u = 0; u < nv; ++u)
    for (uint32_t v = u + 1; v < nv; ++v)
      if (rng.uniform01() < p) g.add_edge(u, v);
  return g;
}

SimpleGraph SimpleGraph::from_block_graph(const BlockGraph& g) {
  SimpleGraph s(uint32_t(g.num_vertices()));
  for (auto [u, v] : g.edges()) s.add_edge(uint32_t(u), uint32_t(v));
  return s;
}

void SimpleGraph::add_edge(uint32_t u, uint32_t v) {
  if (u == v || u >= nv_ || v >= nv_) throw std::invalid_argument("SimpleGraph: bad edge");
  adj_[size_t(u) * nv_ + v] = adj_[size_t(v) * nv_ + u] = 1;
}

uint64_t SimpleGraph::edge_count() const {
  uint64_t c = 0;
  for (uint8_t b : adj_) c += b;
  return c / 2;
}

bool SimpleGraph::has_clique(uint32_t k) const {
  if (k == 0) return true;
  std::vector<uint32_t> cur;
  // backtracking over vertices in increasing order
  std::function<bool(uint32_t)> go = [&](uint32_t start) -> bool {
    if (cur.size() == k) return true;
    for (uint32_t v = start; v < nv_; ++v) {
      bool ok = true;
      for (uint32_t u : cur)
        if (!adjacent(u, v)) { ok = false; break; }
      if (!ok) continue;
      cur.push_back(v);
      if (go(v + 1)) return true;
      cur.pop_back();
    }
    return false;
  };
  return go(0);
}

// --- encoders ----------------------------------------------------------------

bool CnfFormula::clause_satisfied(size_t idx, const std::vector<uint8_t>& assignment) const {
  for (int lit : clauses[idx]) {
    uint32_t v = uint32_t(std::abs(lit)) - 1;
    bool val = assignment[v];
    if ((lit > 0) == val) return true;
  }
  return false;
}

Assignment Assignment::from_columns(const CnfFormula& f, const std::vector<uint32_t>& vertex_per_column) {
  Assignment a;
  a.bits.assign(f.num_vars, 0);
  for (uint32_t i = 0; i < f.columns; ++i) {
    uint32_t idx = vertex_per_column[i];
    for (uint32_t b = 0; b < f.bits_per_column; ++b)
      a.bits[f.var(i, b)] = (idx >> (f.bits_per_column - 1 - b)) & 1;
  }
  return a;
}

uint32_t Assignment::column_vertex(const CnfFormula& f, int column) const {
  uint32_t idx = 0;
  for (uint32_t b = 0; b < f.bits_per_column; ++b)
    idx = (idx << 1) | bits[f.var(column, b)];
  return idx;
}

namespace {

// Literal for "(x_{i,a} != bit)": positive when bit = 0, negated when bit = 1.
int neq_literal(const CnfFormula& f, int column, uint32_t a, uint8_t bit) {
  int v = int(f.var(column, a)) + 1;
  return bit ? -v : v;
}

std::vector<int> vertex_pattern_clause(const CnfFormula& f, int ci, uint32_t vi,
                                       int cj, uint32_t vj) {
  std::vector<int> cl;
  cl.reserve(2 * f.bits_per_column);
  for (uint32_t a = 0; a < f.bits_per_column; ++a)
    cl.push_back(neq_literal(f, ci, a, (vi >> (f.bits_per_column - 1 - a)) & 1));
  for (uint32_t a = 0; a < f.bits_per_column; ++a)
    cl.push_back(neq_literal(f, cj, a, (vj >> (f.bits_per_column - 1 - a)) & 1));
  return cl;
}

}  // namespace

CnfFormula encode_bin_clique(const SimpleGraph& g, uint32_t k) {
  uint32_t nv = g.num_vertices();
  if (!is_pow2(nv)) throw std::invalid_argument("encode_bin_clique: |V| must be a power of two");
  CnfFormula f;
  f.columns = k;
  f.bits_per_column = ilog2(nv);
  f.num_vars = k * f.bits_per_column;
  f.encoding = "bin-clique";
  // Edge axioms: unordered non-adjacent vertex pair, ordered column pair.
  for (uint32_t u = 0; u < nv; ++u)
    for (uint32_t v = u + 1; v < nv; ++v) {
      if (g.adjacent(u, v)) continue;
      for (uint32_t i = 0; i < k; ++i)
        for (uint32_t j = 0; j < k; ++j) {
          if (i == j) continue;
          f.clauses.push_back(vertex_pattern_clause(f, i, u, j, v));
          f.tags.push_back({ClauseTag::EdgeAxiom, u, v, int(i), int(j)});
        }
    }
  // Functionality axioms: every vertex, unordered column pair.
  for (uint32_t u = 0; u < nv; ++u)
    for (uint32_t i = 0; i < k; ++i)
      for (uint32_t j = i + 1; j < k; ++j) {
        f.clauses.push_back(vertex_pattern_clause(f, i, u, j, u));
        f.tags.push_back({ClauseTag::FunctionalityAxiom, u, u, int(i), int(j)});
      }
  // Canonical clause order, duplicates removed.
  std::vector<size_t> order(f.clauses.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    auto ka = std::tuple(f.tags[a].i, f.tags[a].j, f.tags[a].u, f.tags[a].v, f.tags[a].kind);
    auto kb = std::tuple(f.tags[b].i, f.tags[b].j, f.tags[b].u, f.tags[b].v, f.tags[b].kind);
    return ka < kb;
  });
  CnfFormula out = f;
  out.clauses.clear();
  out.tags.clear();
  std::set<std::vector<int>> seen;
  for (size_t idx : order) {
    auto cl = f.clauses[idx];
    auto canon = cl;
    std::sort(canon.begin(), canon.end());
    if (!seen.insert(canon).second) continue;
    out.clauses.push_back(std::move(cl));
    out.tags.push_back(f.tags[idx]);
  }
  return out;
}

CnfFormula encode_block_clique(const BlockGraph& g) {
  CnfFormula f;
  f.columns = g.k();
  f.bits_per_column = g.bits();
  f.num_vars = g.k() * g.bits();
  f.encoding = "block-clique";
  for (uint32_t i = 0; i < g.k(); ++i)
    for (uint32_t j = i + 1; j < g.k(); ++j)
      for (uint32_t u = 0; u < g.n(); ++u)
        for (uint32_t v = 0; v < g.n(); ++v) {
          if (g.adjacent({int(i), u}, {int(j), v})) continue;
          f.clauses.push_back(vertex_pattern_clause(f, i, u, j, v));
          f.tags.push_back({ClauseTag::EdgeAxiom, u, v, int(i), int(j)});
        }
  return f;
}

std::optional<size_t> search_falsified(const CnfFormula& f, const Assignment& a) {
  if (a.bits.size() != f.num_vars) throw std::invalid_argument("search_falsified: partial assignment");
  for (size_t c = 0; c < f.clauses.size(); ++c)
    if (!f.clause_satisfied(c, a.bits)) return c;
  return std::nullopt;
}

CnfFormula block_restriction(const CnfFormula& f_bin, uint32_t k) {
  if (!is_pow2(k)) throw std::invalid_argument("block_restriction: k must be a power of two");
  uint32_t big_bits = f_bin.bits_per_column;
  uint32_t kbits = ilog2(k);
  if (kbits >= big_bits) throw std::invalid_argument("block_restriction: k too large for the encoding");
  if (f_bin.columns != k)
    throw std::invalid_argument("block_restriction: column count must equal k");
  uint32_t small_bits = big_bits - kbits;

  CnfFormula out;
  out.columns = k;
  out.bits_per_column = small_bits;
  out.num_vars = k * small_bits;
  out.encoding = "block-clique-restricted";

  // fixed value of variable var(i,a) for a < kbits: bit a of block index i
  auto fixed_bit = [&](uint32_t col, uint32_t a) -> uint8_t {
    return (col >> (kbits - 1 - a)) & 1;
  };

  for (size_t ci = 0; ci < f_bin.clauses.size(); ++ci) {
    std::vector<int> survived;
    bool satisfied = false;
    for (int lit : f_bin.clauses[ci]) {
      uint32_t v = uint32_t(std::abs(lit)) - 1;
      uint32_t col = v / big_bits, a = v % big_bits;
      if (a < kbits) {
        // literal (x != b) with x fixed to c: true iff c != b.
        uint8_t fixed = fixed_bit(col, a);
        uint8_t neq_value = lit > 0 ? 0 : 1;  // literal asserts x != neq_value
        if (fixed != neq_value) { satisfied = true; break; }
        continue;  // falsified literal drops out
      }
      uint32_t nv = col * small_bits + (a - kbits);
      survived.push_back(lit > 0 ? int(nv) + 1 : -(int(nv) + 1));
    }
    if (satisfied) continue;
    out.clauses.push_back(std::move(survived));
    if (ci < f_bin.tags.size()) out.tags.push_back(f_bin.tags[ci]);
  }
  return out;
}

// --- DIMACS -------------------------------------------------------------------

void to_dimacs(const CnfFormula& f, std::ostream& out,
               const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "c " << c << "\n";
  out << "c encoding " << f.encoding << "\n";
  out << "c columns " << f.columns << " bits-per-column " << f.bits_per_column
      << " var(i,a) = i*bits+a+1, bit 0 most significant\n";
  out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
  for (const auto& cl : f.clauses) {
    for (int lit : cl) out << lit << " ";
    out << "0\n";
  }
}

CnfFormula from_dimacs(std::istream& in) {
  CnfFormula f;
  std::string line;
  bool header = false;
  size_t expected_clauses = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') {
      // recover structural metadata when present
      std::istringstream ls(line);
      std::string c, word;
      ls >> c >> word;
      if (c == "c" && word == "encoding") ls >> f.encoding;
      if (c == "c" && word == "columns") {
        std::string bpc;
        ls >> f.columns >> bpc >> f.bits_per_column;
      }
      continue;
    }
    std::istringstream ls(line);
    if (!header) {
      std::string p, cnf;
      ls >> p >> cnf >> f.num_vars >> expected_clauses;
      if (p != "p" || cnf != "cnf") throw std::invalid_argument("DIMACS: bad header");
      header = true;
      continue;
    }
    std::vector<int> clause;
    int lit;
    while (ls >> lit) {
      if (lit == 0) break;
      if (uint32_t(std::abs(lit)) > f.num_vars) throw std::invalid_argument("DIMACS: literal out of range");
      clause.push_back(lit);
    }
    f.clauses.push_back(std::move(clause));
  }
  if (!header) throw std::invalid_argument("DIMACS: missing header");
  if (f.clauses.size() != expected_clauses)
    throw std::invalid_argument("DIMACS: clause count mismatch");
  if (f.columns == 0) { f.columns = 1; f.bits_per_column = f.num_vars; }
  return f;
}

void save_clause_tags_json(const CnfFormula& f, std::ostream& out) {
  nlohmann::json j = nlohmann::json::array();
  for (size_t c = 0; c < f.tags.size(); ++c) {
    const auto& t = f.tags[c];
    j.push_back({{"clause", c},
                 {"kind", t.kind == ClauseTag::EdgeAxiom ? "edge" : "functionality"},
                 {"u", t.u},
                 {"v", t.v},
                 {"i", t.i},
                 {"j", t.j}});
  }
  out << j.dump(1) << "\n";
}

// --- oracles ------------------------------------------------------------------

bool satisfiable_bruteforce(const CnfFormula& f) {
  if (f.num_vars > 24) throw std::invalid_argument("satisfiable_bruteforce: too many variables");
  std::vector<uint8_t> a(f.num_vars, 0);
  for (uint64_t m = 0; m < (1ull << f.num_vars); ++m) {
    for (uint32_t v = 0; v < f.num_vars; ++v) a[v] = (m >> v) & 1;
    bool ok = true;
    for (size_t c = 0; c < f.clauses.size() && ok; ++c)
      ok = f.clause_satisfied(c, a);
    if (ok) return true;
  }
  return false;
}

bool has_transversal_clique(const BlockGraph& g) {
  std::vector<uint32_t> pick(g.k(), 0);
  std::function<bool(uint32_t)> go = [&](uint32_t b) -> bool {
    if (b == g.k()) return true;
    for (uint32_t v = 0; v < g.n(); ++v) {
      bool ok = true;
      for (uint32_t b2 = 0; b2 < b && ok; ++b2)
        ok = g.adjacent({int(b2), pick[b2]}, {int(b), v});
      if (!ok) continue;
      pick[b] = v;
      if (go(b + 1)) return true;
    }
    return false;
  };
  return go(0);
}

}  // namespace bclq
