#include "bclq/proof.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bclq {

namespace {

// satisfying-assignment bitmask over {0,1}^nv, assignment m gives variable v
// the value (m >> v) & 1
using Mask = std::vector<uint64_t>;

Mask make_mask(uint32_t nv) { return Mask(((1ull << nv) + 63) / 64, 0); }

void mask_set(Mask& m, uint64_t i) { m[i >> 6] |= 1ull << (i & 63); }

bool mask_subset(const Mask& a, const Mask& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

Mask mask_and(const Mask& a, const Mask& b) {
  Mask r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] &= b[i];
  return r;
}

long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

// integer scaling of a cp line: returns per-variable coefficients and the
// scaled constant (both multiplied by the common denominator)
std::pair<std::vector<long long>, long long> scale_line(const CpLine& line) {
  long long d = line.constant.den();
  for (const auto& c : line.coeffs) d = lcm_ll(d, c.den());
  std::vector<long long> coeffs(line.coeffs.size());
  for (size_t v = 0; v < line.coeffs.size(); ++v)
    coeffs[v] = line.coeffs[v].num() * (d / line.coeffs[v].den());
  long long c = line.constant.num() * (d / line.constant.den());
  return {std::move(coeffs), c};
}

Mask cp_line_mask(const CpLine& line, uint32_t nv) {
  auto [coeffs, c] = scale_line(line);
  Mask m = make_mask(nv);
  for (uint64_t a = 0; a < (1ull << nv); ++a) {
    long long s = 0;
    uint64_t bits = a;
    while (bits) {
      uint32_t v = uint32_t(std::countr_zero(bits));
      s += coeffs[v];
      bits &= bits - 1;
    }
    if (s >= c) mask_set(m, a);
  }
  return m;
}

Mask clause_mask(const LinearClause& cl, uint32_t nv) {
  Mask m = make_mask(nv);
  std::vector<uint64_t> forms;
  std::vector<uint8_t> rhs;
  for (const auto& e : cl.eqs) {
    uint64_t w = 0;
    e.form.for_each_set([&](uint32_t v) { w |= 1ull << v; });
    forms.push_back(w);
    rhs.push_back(e.rhs);
  }
  for (uint64_t a = 0; a < (1ull << nv); ++a) {
    for (size_t i = 0; i < forms.size(); ++i) {
      if ((std::popcount(a & forms[i]) & 1) == rhs[i]) {
        mask_set(m, a);
        break;
      }
    }
  }
  return m;
}

}  // namespace

// --- verify_cp -----------------------------------------------------------------

CpVerifyResult verify_cp(const CnfFormula& axioms, CpProof& proof, uint32_t var_budget) {
  uint32_t nv = axioms.num_vars;
  if (proof.num_vars != nv)
    throw std::invalid_argument("verify_cp: variable count mismatch");
  if (nv > var_budget) throw std::invalid_argument("verify_cp: variable budget exceeded");
  if (proof.lines.empty()) return VerifyError{0, "empty proof"};

  // canonical clause translations: coeff vector and constant
  std::map<std::pair<std::vector<Rational>, Rational>, int> clause_by_line;
  for (size_t c = 0; c < axioms.clauses.size(); ++c) {
    std::vector<Rational> coeffs(nv, Rational(0));
    long long negs = 0;
    for (int lit : axioms.clauses[c]) {
      uint32_t v = uint32_t(std::abs(lit)) - 1;
      coeffs[v] = coeffs[v] + (lit > 0 ? Rational(1) : Rational(-1));
      if (lit < 0) ++negs;
    }
    clause_by_line.try_emplace({std::move(coeffs), Rational(1 - negs)}, int(c));
  }

  std::vector<Mask> masks(proof.lines.size());
  for (size_t i = 0; i < proof.lines.size(); ++i) {
    CpLine& line = proof.lines[i];
    if (line.coeffs.size() != nv) return VerifyError{i, "coefficient width mismatch"};
    if (line.kind == CpLine::Axiom) {
      auto it = clause_by_line.find({line.coeffs, line.constant});
      if (it != clause_by_line.end()) {
        line.axiom_clause = it->second;
      } else {
        // variable bounds x >= 0 and -x >= -1
        int nz = -1;
        bool bound = true;
        for (uint32_t v = 0; v < nv && bound; ++v) {
          if (line.coeffs[v] == Rational(0)) continue;
          if (nz >= 0) bound = false;
          nz = int(v);
        }
        if (bound && nz >= 0) {
          bool lower = line.coeffs[nz] == Rational(1) && line.constant == Rational(0);
          bool upper = line.coeffs[nz] == Rational(-1) && line.constant == Rational(-1);
          bound = lower || upper;
        } else {
          bound = false;
        }
        if (!bound) return VerifyError{i, "not an axiom of the system"};
        line.axiom_clause = -1;
      }
    } else {
      if (line.from_j < 0 || line.from_k < 0 || size_t(line.from_j) >= i || size_t(line.from_k) >= i)
        return VerifyError{i, "premise index out of range"};
      Mask premise = mask_and(masks[line.from_j], masks[line.from_k]);
      masks[i] = cp_line_mask(line, nv);
      if (!mask_subset(premise, masks[i]))
        return VerifyError{i, "not semantically implied by premises"};
      continue;
    }
    masks[i] = cp_line_mask(line, nv);
  }

  const CpLine& last = proof.lines.back();
  for (const auto& c : last.coeffs)
    if (!(c == Rational(0))) return VerifyError{proof.lines.size() - 1, "final line has nonzero coefficients"};
  if (!(last.constant == Rational(1)))
    return VerifyError{proof.lines.size() - 1, "final line is not 0 >= 1"};
  return CpOk{proof.lines.size()};
}

// --- linear clauses ---------------------------------------------------------------

void LinearClause::canonicalize() {
  std::vector<LinearEq> out;
  for (auto& e : eqs) {
    if (e.form.none() && e.rhs == 1) continue;  // unsatisfiable disjunct
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const LinearEq& a, const LinearEq& b) {
    if (a.form != b.form) return a.form < b.form;
    return a.rhs < b.rhs;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  eqs = std::move(out);
}

bool LinearClause::satisfied_by(const BitVec& x) const {
  for (const auto& e : eqs)
    if (e.form.dot(x) == (e.rhs & 1)) return true;
  return false;
}

namespace {

LinearClause cnf_clause_as_linear(const CnfFormula& f, size_t c, const VarSpace& vs) {
  LinearClause cl;
  for (int lit : f.clauses[c]) {
    uint32_t v = uint32_t(std::abs(lit)) - 1;
    cl.eqs.push_back({BitVec::unit(vs.num_vars(), v), uint8_t(lit > 0 ? 1 : 0)});
  }
  cl.canonicalize();
  return cl;
}

bool clause_contains(const LinearClause& cl, const LinearEq& e) {
  return std::find(cl.eqs.begin(), cl.eqs.end(), e) != cl.eqs.end();
}

LinearClause resolve_clauses(const LinearClause& a, const LinearClause& b, const LinearForm& pivot) {
  LinearClause out;
  for (const auto& e : a.eqs)
    if (!(e.form == pivot && e.rhs == 1)) out.eqs.push_back(e);
  for (const auto& e : b.eqs)
    if (!(e.form == pivot && e.rhs == 0)) out.eqs.push_back(e);
  out.canonicalize();
  return out;
}

}  // namespace

ResPlusVerifyResult verify_resplus(const CnfFormula& f, ResPlusProof& proof, uint32_t var_budget) {
  uint32_t nv = f.num_vars;
  if (proof.vs.num_vars() != nv)
    throw std::invalid_argument("verify_resplus: variable count mismatch");
  if (nv > var_budget) throw std::invalid_argument("verify_resplus: variable budget exceeded");
  if (proof.lines.empty()) return VerifyError{0, "empty proof"};

  std::vector<LinearClause> axioms;
  for (size_t c = 0; c < f.clauses.size(); ++c)
    axioms.push_back(cnf_clause_as_linear(f, c, proof.vs));

  std::vector<uint32_t> depth(proof.lines.size(), 0);
  for (size_t i = 0; i < proof.lines.size(); ++i) {
    ResPlusLine& line = proof.lines[i];
    line.clause.canonicalize();
    switch (line.kind) {
      case ResPlusLine::Axiom: {
        int found = -1;
        if (line.axiom_clause >= 0) {
          if (size_t(line.axiom_clause) < axioms.size() && axioms[line.axiom_clause] == line.clause)
            found = line.axiom_clause;
        } else {
          for (size_t c = 0; c < axioms.size(); ++c)
            if (axioms[c] == line.clause) { found = int(c); break; }
        }
        if (found < 0) return VerifyError{i, "clause is not an axiom"};
        line.axiom_clause = found;
        depth[i] = 0;
        break;
      }
      case ResPlusLine::Resolution: {
        if (line.from_j < 0 || line.from_k < 0 || size_t(line.from_j) >= i || size_t(line.from_k) >= i)
          return VerifyError{i, "premise index out of range"};
        if (line.pivot.size() != nv || line.pivot.none())
          return VerifyError{i, "bad pivot"};
        const LinearClause& a = proof.lines[line.from_j].clause;
        const LinearClause& b = proof.lines[line.from_k].clause;
        if (!clause_contains(a, {line.pivot, 1}))
          return VerifyError{i, "first premise lacks (pivot = 1)"};
        if (!clause_contains(b, {line.pivot, 0}))
          return VerifyError{i, "second premise lacks (pivot = 0)"};
        if (!(resolve_clauses(a, b, line.pivot) == line.clause))
          return VerifyError{i, "conclusion is not the resolvent"};
        depth[i] = std::max(depth[line.from_j], depth[line.from_k]) + 1;
        break;
      }
      case ResPlusLine::Weakening: {
        if (line.from_j < 0 || size_t(line.from_j) >= i)
          return VerifyError{i, "premise index out of range"};
        Mask pm = clause_mask(proof.lines[line.from_j].clause, nv);
        Mask cm = clause_mask(line.clause, nv);
        if (!mask_subset(pm, cm))
          return VerifyError{i, "weakening is not semantically implied"};
        depth[i] = depth[line.from_j];
        break;
      }
    }
  }
  if (!proof.lines.back().clause.eqs.empty())
    return VerifyError{proof.lines.size() - 1, "final line is not the empty clause"};
  return ResPlusOk{proof.lines.size(), depth.back()};
}

// --- splits and translations ----------------------------------------------------------

VarSplit VarSplit::standard_halves(uint32_t columns, uint32_t bits_per_column) {
  if (bits_per_column % 2) throw std::invalid_argument("standard_halves: odd bits per column");
  VarSplit s;
  for (uint32_t i = 0; i < columns; ++i)
    for (uint32_t a = 0; a < bits_per_column; ++a) {
      uint32_t v = i * bits_per_column + a;
      if (a < bits_per_column / 2) s.x_vars.push_back(v);
      else s.y_vars.push_back(v);
    }
  return s;
}

namespace {

// assignment bits from split indices: x index reads x_vars MSB-first
std::vector<uint8_t> assignment_of_split(const VarSplit& split, uint32_t nv, uint64_t x, uint64_t y) {
  std::vector<uint8_t> a(nv, 0);
  size_t hx = split.x_vars.size(), hy = split.y_vars.size();
  for (size_t t = 0; t < hx; ++t) a[split.x_vars[t]] = (x >> (hx - 1 - t)) & 1;
  for (size_t t = 0; t < hy; ++t) a[split.y_vars[t]] = (y >> (hy - 1 - t)) & 1;
  return a;
}

}  // namespace

TriangleDag cp_to_triangle_dag(const CnfFormula& axioms, const CpProof& proof, const VarSplit& split) {
  (void)axioms;
  TriangleDag dag;
  dag.xsize = 1ull << split.x_vars.size();
  dag.ysize = 1ull << split.y_vars.size();
  for (const auto& line : proof.lines) {
    auto [coeffs, c] = scale_line(line);
    TriangleDagNode nd;
    nd.tri.a.assign(dag.xsize, Rational(0));
    nd.tri.b.assign(dag.ysize, Rational(0));
    // falsifying inputs: sum coeffs . z < c, over integers this is
    // a(x) = coeffs_X . x <= c - coeffs_Y . y - 1/2 = b(y)
    for (uint64_t x = 0; x < dag.xsize; ++x) {
      long long s = 0;
      for (size_t t = 0; t < split.x_vars.size(); ++t)
        if ((x >> (split.x_vars.size() - 1 - t)) & 1) s += coeffs[split.x_vars[t]];
      nd.tri.a[x] = Rational(s);
    }
    for (uint64_t y = 0; y < dag.ysize; ++y) {
      long long s = 0;
      for (size_t t = 0; t < split.y_vars.size(); ++t)
        if ((y >> (split.y_vars.size() - 1 - t)) & 1) s += coeffs[split.y_vars[t]];
      nd.tri.b[y] = Rational(2 * (c - s) - 1, 2);
    }
    if (line.kind == CpLine::Infer) {
      nd.child0 = line.from_j;
      nd.child1 = line.from_k;
    } else {
      nd.output = line.axiom_clause;
    }
    dag.nodes.push_back(std::move(nd));
  }
  dag.root = int(proof.lines.size()) - 1;
  return dag;
}

DagCheckResult check_search_dag(const TriangleDag& dag, const CnfFormula& f, const VarSplit& split) {
  return check_triangle_dag(dag, [&](uint64_t x, uint64_t y, int o) {
    if (o < 0 || size_t(o) >= f.clauses.size()) return false;
    auto a = assignment_of_split(split, f.num_vars, x, y);
    return !f.clause_satisfied(size_t(o), a);
  });
}

// --- affine DAGs ---------------------------------------------------------------------------

uint32_t AffineDag::depth() const {
  std::vector<int> memo(nodes.size(), -1);
  std::function<int(int)> go = [&](int v) -> int {
    if (memo[v] >= 0) return memo[v];
    const auto& nd = nodes[v];
    int d = 0;
    if (nd.child0 >= 0) d = std::max(d, go(nd.child0));
    if (nd.child1 >= 0) d = std::max(d, go(nd.child1));
    if (nd.branch) d += 1;
    return memo[v] = d;
  };
  return root >= 0 ? uint32_t(go(root)) : 0;
}

AffineDag resplus_to_affine_dag(const CnfFormula& f, const ResPlusProof& proof) {
  (void)f;
  AffineDag dag;
  dag.vs = proof.vs;
  for (const auto& line : proof.lines) {
    AffineDagNode nd;
    nd.space = LinearSystem(proof.vs);
    for (const auto& e : line.clause.eqs) nd.space.add_row(e.form, uint8_t(e.rhs ^ 1));
    switch (line.kind) {
      case ResPlusLine::Axiom:
        nd.output = line.axiom_clause;
        break;
      case ResPlusLine::Resolution:
        nd.branch = true;
        nd.query = line.pivot;
        nd.child0 = line.from_j;  // premise containing (pivot = 1) fails when pivot = 0
        nd.child1 = line.from_k;
        break;
      case ResPlusLine::Weakening:
        nd.child0 = line.from_j;
        break;
    }
    dag.nodes.push_back(std::move(nd));
  }
  dag.root = int(proof.lines.size()) - 1;
  return dag;
}

DagCheckResult check_affine_dag(const AffineDag& dag, const CnfFormula& f) {
  DagCheckResult res;
  auto fail = [&](std::string why) {
    res.valid = false;
    res.reason = std::move(why);
    return res;
  };
  uint32_t nv = dag.vs.num_vars();
  if (nv != f.num_vars) return fail("variable count mismatch");
  if (nv > 24) return fail("domain too large for exhaustive check");
  if (dag.root < 0) return fail("missing root");
  for (uint64_t m = 0; m < (1ull << nv); ++m) {
    BitVec z(nv);
    for (uint32_t v = 0; v < nv; ++v)
      if ((m >> v) & 1) z.set(v, true);
    if (!dag.nodes[dag.root].space.satisfied_by(z)) return fail("root is not the full space");
    for (size_t v = 0; v < dag.nodes.size(); ++v) {
      const auto& nd = dag.nodes[v];
      if (!nd.space.satisfied_by(z)) continue;
      if (nd.branch) {
        if (nd.child0 < 0 || nd.child1 < 0) return fail("branch node without two children");
        int c = nd.query.dot(z) ? nd.child1 : nd.child0;
        if (!dag.nodes[c].space.satisfied_by(z))
          return fail("branch child not implied at node " + std::to_string(v));
      } else if (nd.child0 >= 0) {
        if (!dag.nodes[nd.child0].space.satisfied_by(z))
          return fail("forward child not implied at node " + std::to_string(v));
      } else {
        if (nd.output < 0 || size_t(nd.output) >= f.clauses.size())
          return fail("leaf without a valid output");
        std::vector<uint8_t> a(nv);
        for (uint32_t w = 0; w < nv; ++w) a[w] = z.get(w);
        if (f.clause_satisfied(size_t(nd.output), a))
          return fail("leaf escapes its output preimage at node " + std::to_string(v));
      }
    }
  }
  return res;
}

// --- proof text files -------------------------------------------------------------------------

CpProof parse_cp_proof(std::istream& in) {
  CpProof proof;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || (line[0] == 'c' && (line.size() == 1 || line[1] == ' '))) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "p") {
      std::string kind;
      ls >> kind >> proof.num_vars;
      if (kind != "cp") throw std::invalid_argument("cp proof: bad header");
      header = true;
      continue;
    }
    if (tok != "cp") throw std::invalid_argument("cp proof: unexpected line: " + line);
    if (!header) throw std::invalid_argument("cp proof: missing header");
    CpLine l;
    std::string c;
    ls >> c;
    l.constant = Rational::parse(c);
    for (uint32_t v = 0; v < proof.num_vars; ++v) {
      std::string w;
      if (!(ls >> w)) throw std::invalid_argument("cp proof: truncated coefficients");
      l.coeffs.push_back(Rational::parse(w));
    }
    std::string just;
    ls >> just;
    if (just == "axiom") {
      l.kind = CpLine::Axiom;
      int idx;
      if (ls >> idx) l.axiom_clause = idx;
    } else if (just == "from") {
      l.kind = CpLine::Infer;
      int j, k;
      if (!(ls >> j)) throw std::invalid_argument("cp proof: missing premise");
      if (!(ls >> k)) k = j;
      l.from_j = j - 1;
      l.from_k = k - 1;
    } else {
      throw std::invalid_argument("cp proof: bad justification: " + just);
    }
    proof.lines.push_back(std::move(l));
  }
  return proof;
}

void write_cp_proof(const CpProof& proof, std::ostream& out) {
  out << "p cp " << proof.num_vars << "\n";
  for (const auto& l : proof.lines) {
    out << "cp " << l.constant.str();
    for (const auto& c : l.coeffs) out << " " << c.str();
    if (l.kind == CpLine::Axiom) out << " axiom";
    else out << " from " << l.from_j + 1 << " " << l.from_k + 1;
    out << "\n";
  }
}

namespace {

LinearForm parse_form(const std::string& text, const VarSpace& vs) {
  LinearForm f(vs.num_vars());
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '+')) {
    int v = std::stoi(part);
    if (v < 1 || uint32_t(v) > vs.num_vars()) throw std::invalid_argument("bad variable index");
    f.flip(uint32_t(v - 1));
  }
  return f;
}

LinearClause parse_clause(const std::string& text, const VarSpace& vs) {
  LinearClause cl;
  if (text == "empty") return cl;
  std::istringstream ss(text);
  std::string eq;
  while (std::getline(ss, eq, '|')) {
    auto pos = eq.find('=');
    if (pos == std::string::npos) throw std::invalid_argument("clause equation lacks '='");
    LinearEq e;
    e.form = parse_form(eq.substr(0, pos), vs);
    e.rhs = uint8_t(std::stoi(eq.substr(pos + 1)) & 1);
    cl.eqs.push_back(std::move(e));
  }
  return cl;
}

std::string form_str(const LinearForm& f) {
  std::string out;
  f.for_each_set([&](uint32_t v) {
    if (!out.empty()) out += "+";
    out += std::to_string(v + 1);
  });
  return out;
}

std::string clause_str(const LinearClause& cl) {
  if (cl.eqs.empty()) return "empty";
  std::string out;
  for (const auto& e : cl.eqs) {
    if (!out.empty()) out += "|";
    out += form_str(e.form) + "=" + std::to_string(int(e.rhs));
  }
  return out;
}

}  // namespace

ResPlusProof parse_resplus_proof(std::istream& in) {
  ResPlusProof proof;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || (line[0] == 'c' && (line.size() == 1 || line[1] == ' '))) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "p") {
      std::string kind;
      ls >> kind >> proof.vs.k >> proof.vs.bits;
      if (kind != "rlin") throw std::invalid_argument("rlin proof: bad header");
      header = true;
      continue;
    }
    if (tok != "rlin") throw std::invalid_argument("rlin proof: unexpected line: " + line);
    if (!header) throw std::invalid_argument("rlin proof: missing header");
    ResPlusLine l;
    std::string cl, just;
    ls >> cl >> just;
    l.clause = parse_clause(cl, proof.vs);
    if (just == "axiom") {
      l.kind = ResPlusLine::Axiom;
      int idx;
      if (ls >> idx) l.axiom_clause = idx;
    } else if (just == "res") {
      l.kind = ResPlusLine::Resolution;
      int j, k;
      std::string piv;
      if (!(ls >> j >> k >> piv)) throw std::invalid_argument("rlin proof: bad resolution line");
      l.from_j = j - 1;
      l.from_k = k - 1;
      l.pivot = parse_form(piv, proof.vs);
    } else if (just == "weaken") {
      l.kind = ResPlusLine::Weakening;
      int j;
      if (!(ls >> j)) throw std::invalid_argument("rlin proof: bad weakening line");
      l.from_j = j - 1;
    } else {
      throw std::invalid_argument("rlin proof: bad justification: " + just);
    }
    proof.lines.push_back(std::move(l));
  }
  return proof;
}

void write_resplus_proof(const ResPlusProof& proof, std::ostream& out) {
  out << "p rlin " << proof.vs.k << " " << proof.vs.bits << "\n";
  for (const auto& l : proof.lines) {
    out << "rlin " << clause_str(l.clause);
    switch (l.kind) {
      case ResPlusLine::Axiom:
        out << " axiom";
        break;
      case ResPlusLine::Resolution:
        out << " res " << l.from_j + 1 << " " << l.from_k + 1 << " " << form_str(l.pivot);
        break;
      case ResPlusLine::Weakening:
        out << " weaken " << l.from_j + 1;
        break;
    }
    out << "\n";
  }
}

}  // namespace bclq
