#include "bclq/f2.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace bclq {

// --- LinearSystem ---------------------------------------------------------------

void LinearSystem::add_row(LinearForm f, uint8_t rhs) {
  if (f.size() != vs_.num_vars()) throw std::invalid_argument("LinearSystem: form width mismatch");
  rows_.push_back({std::move(f), uint8_t(rhs & 1)});
  cache_.reset();
}

const LinearSystem::Ech& LinearSystem::ech() const {
  if (cache_) return *cache_;
  Ech e;
  for (const auto& r : rows_) {
    LinearForm f = r.form;
    uint8_t b = r.rhs;
    for (size_t i = 0; i < e.rows.size(); ++i)
      if (f.get(e.pivot[i])) { f ^= e.rows[i].form; b ^= e.rows[i].rhs; }
    int p = f.lowest_set();
    if (p < 0) {
      if (b) e.inconsistent = true;
      continue;
    }
    // back-substitute to keep reduced form
    for (size_t i = 0; i < e.rows.size(); ++i)
      if (e.rows[i].form.get(p)) { e.rows[i].form ^= f; e.rows[i].rhs ^= b; }
    e.rows.push_back({std::move(f), b});
    e.pivot.push_back(p);
    // keep rows ordered by pivot
    for (size_t i = e.rows.size(); i-- > 1;)
      if (e.pivot[i] < e.pivot[i - 1]) {
        std::swap(e.rows[i], e.rows[i - 1]);
        std::swap(e.pivot[i], e.pivot[i - 1]);
      }
  }
  cache_ = std::move(e);
  return *cache_;
}

uint32_t LinearSystem::rank() const { return uint32_t(ech().rows.size()); }

bool LinearSystem::consistent() const { return !ech().inconsistent; }

bool LinearSystem::implies(const LinearEq& eq) const {
  const Ech& e = ech();
  if (e.inconsistent) return true;  // vacuous
  LinearForm f = eq.form;
  uint8_t b = eq.rhs;
  for (size_t i = 0; i < e.rows.size(); ++i)
    if (f.get(e.pivot[i])) { f ^= e.rows[i].form; b ^= e.rows[i].rhs; }
  return f.none() && b == 0;
}

bool LinearSystem::implies(const LinearSystem& other) const {
  for (const auto& r : other.rows())
    if (!implies(r)) return false;
  return true;
}

std::optional<BitVec> LinearSystem::solve() const {
  const Ech& e = ech();
  if (e.inconsistent) return std::nullopt;
  BitVec x(vs_.num_vars());
  // reduced form: pivot var value = rhs when free vars are zero
  for (size_t i = 0; i < e.rows.size(); ++i)
    if (e.rows[i].rhs) x.set(e.pivot[i], true);
  return x;
}

bool LinearSystem::satisfied_by(const BitVec& a) const {
  for (const auto& r : rows_)
    if (r.form.dot(a) != (r.rhs & 1)) return false;
  return true;
}

LinearSystem LinearSystem::reduced() const {
  const Ech& e = ech();
  LinearSystem out(vs_);
  for (const auto& r : e.rows) out.add_row(r);
  if (e.inconsistent) out.add_row(LinearForm(vs_.num_vars()), 1);
  return out;
}

// --- AffineRestriction ------------------------------------------------------------

AffineRestriction::AffineRestriction(VarSpace vs) : vs_(vs), expr_(vs.num_vars()) {}

bool AffineRestriction::is_free_block(uint32_t b) const {
  for (uint32_t j = 0; j < vs_.bits; ++j)
    if (!is_free_var(vs_.var(b, j))) return false;
  return true;
}

std::vector<int> AffineRestriction::free_blocks() const {
  std::vector<int> out;
  for (uint32_t b = 0; b < vs_.k; ++b)
    if (is_free_block(b)) out.push_back(int(b));
  return out;
}

std::vector<int> AffineRestriction::fixed_blocks() const {
  std::vector<int> out;
  for (uint32_t b = 0; b < vs_.k; ++b)
    if (!is_free_block(b)) out.push_back(int(b));
  return out;
}

void AffineRestriction::pin(uint32_t v, LinearForm coeffs, uint8_t cst) {
  if (expr_[v]) throw std::invalid_argument("AffineRestriction: variable already pinned");
  if (coeffs.get(v)) throw std::invalid_argument("AffineRestriction: self-referential expression");
  // reduce the new expression by existing pins first
  LinearForm c(vs_.num_vars());
  uint8_t k = cst & 1;
  coeffs.for_each_set([&](uint32_t w) {
    if (expr_[w]) { c ^= expr_[w]->coeffs; k ^= expr_[w]->cst; }
    else c.flip(w);
  });
  expr_[v] = Expr{c, k};
  // substitute v away from all earlier expressions
  for (uint32_t w = 0; w < vs_.num_vars(); ++w) {
    if (w == v || !expr_[w]) continue;
    if (expr_[w]->coeffs.get(v)) {
      expr_[w]->coeffs.flip(v);
      expr_[w]->coeffs ^= c;
      expr_[w]->cst ^= k;
    }
  }
}

void AffineRestriction::pin_constant(uint32_t v, uint8_t cst) {
  pin(v, LinearForm(vs_.num_vars()), cst);
}

std::pair<LinearForm, uint8_t> AffineRestriction::apply(const LinearForm& f) const {
  LinearForm g(vs_.num_vars());
  uint8_t c = 0;
  f.for_each_set([&](uint32_t v) {
    if (expr_[v]) { g ^= expr_[v]->coeffs; c ^= expr_[v]->cst; }
    else g.flip(v);
  });
  return {g, c};
}

LinearSystem AffineRestriction::apply(const LinearSystem& s) const {
  LinearSystem out(vs_);
  for (const auto& r : s.rows()) {
    auto [g, c] = apply(r.form);
    out.add_row(g, uint8_t(r.rhs ^ c));
  }
  return out;
}

LinearSystem AffineRestriction::induced_system() const {
  LinearSystem out(vs_);
  for (uint32_t v = 0; v < vs_.num_vars(); ++v) {
    if (!expr_[v]) continue;
    LinearForm f = expr_[v]->coeffs;
    f.flip(v);
    out.add_row(f, expr_[v]->cst);
  }
  return out;
}

BitVec AffineRestriction::complete(const BitVec& free_assignment) const {
  BitVec x = free_assignment;
  for (uint32_t v = 0; v < vs_.num_vars(); ++v) {
    if (!expr_[v]) continue;
    bool val = (expr_[v]->cst & 1) ^ expr_[v]->coeffs.dot(free_assignment);
    x.set(v, val);
  }
  return x;
}

void AffineRestriction::validate() const {
  for (uint32_t v = 0; v < vs_.num_vars(); ++v) {
    if (!expr_[v]) continue;
    expr_[v]->coeffs.for_each_set([&](uint32_t w) {
      if (expr_[w]) throw std::runtime_error("AffineRestriction: expression references pinned var");
    });
  }
}

// --- safety (matroid intersection) --------------------------------------------------

namespace {

// Column vectors of the coefficient matrix, one per variable, as bit vectors
// over row indices.
struct Columns {
  std::vector<BitVec> col;     // per variable
  std::vector<uint32_t> vars;  // variables with nonzero columns
};

Columns build_columns(const std::vector<LinearForm>& forms, const VarSpace& vs) {
  Columns c;
  uint32_t m = uint32_t(forms.size());
  c.col.assign(vs.num_vars(), BitVec(m));
  for (uint32_t r = 0; r < m; ++r)
    forms[r].for_each_set([&](uint32_t v) { c.col[v].set(r, true); });
  for (uint32_t v = 0; v < vs.num_vars(); ++v)
    if (c.col[v].any()) c.vars.push_back(v);
  return c;
}

bool independent_with(const std::vector<BitVec>& base, const BitVec& extra) {
  // Gaussian elimination over the stacked vectors
  std::vector<BitVec> rows = base;
  rows.push_back(extra);
  uint32_t rank = 0;
  std::vector<BitVec> ech;
  for (auto f : rows) {
    for (auto& e : ech) {
      int p = e.lowest_set();
      if (p >= 0 && f.get(uint32_t(p))) f ^= e;
    }
    if (f.any()) { ech.push_back(f); ++rank; }
  }
  return rank == rows.size();
}

}  // namespace

SafetyResult analyze_safety(const std::vector<LinearForm>& forms, const VarSpace& vs) {
  SafetyResult res;
  uint32_t m = uint32_t(forms.size());
  if (m == 0) { res.safe = true; return res; }
  {
    LinearSystem chk(vs);
    for (const auto& f : forms) chk.add_row(f, 0);
    if (chk.rank() != m)
      throw std::invalid_argument("analyze_safety: forms must be linearly independent");
  }
  Columns cols = build_columns(forms, vs);

  std::vector<uint32_t> I;  // current common independent set (variable ids)
  auto in_I = [&](uint32_t v) { return std::find(I.begin(), I.end(), v) != I.end(); };
  auto block_used_by = [&](uint32_t v, const std::vector<uint32_t>& skip) -> bool {
    uint32_t b = vs.block_of(v);
    for (uint32_t w : I) {
      if (std::find(skip.begin(), skip.end(), w) != skip.end()) continue;
      if (vs.block_of(w) == b) return true;
    }
    return false;
  };
  auto colvecs = [&](const std::vector<uint32_t>& skip) {
    std::vector<BitVec> out;
    for (uint32_t w : I)
      if (std::find(skip.begin(), skip.end(), w) == skip.end()) out.push_back(cols.col[w]);
    return out;
  };

  std::vector<uint32_t> reachable_snapshot;
  for (;;) {
    // exchange graph BFS from the linear-side sources
    std::vector<int> prev(vs.num_vars(), -2);  // -2 unvisited, -1 source
    std::deque<uint32_t> queue;
    for (uint32_t v : cols.vars) {
      if (in_I(v)) continue;
      if (independent_with(colvecs({}), cols.col[v])) {
        prev[v] = -1;
        queue.push_back(v);
      }
    }
    std::optional<uint32_t> sink;
    std::vector<uint32_t> order;
    while (!queue.empty() && !sink) {
      uint32_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      if (!in_I(v)) {
        // is v a partition-side sink? (block unused by I)
        if (!block_used_by(v, {})) { sink = v; break; }
        // edges v -> x for x in I with I - x + v independent in the partition matroid
        for (uint32_t x : I) {
          if (prev[x] != -2) continue;
          if (!block_used_by(v, {x})) { prev[x] = int(v); queue.push_back(x); }
        }
      } else {
        // edges x -> y for y not in I with I - x + y independent in the linear matroid
        for (uint32_t y : cols.vars) {
          if (in_I(y) || prev[y] != -2) continue;
          if (independent_with(colvecs({v}), cols.col[y])) { prev[y] = int(v); queue.push_back(y); }
        }
      }
    }
    if (!sink) {
      // record reachable variables for the deficiency certificate
      reachable_snapshot.clear();
      for (uint32_t v = 0; v < vs.num_vars(); ++v)
        if (prev[v] != -2) reachable_snapshot.push_back(v);
      break;
    }
    // augment along the alternating path
    std::vector<uint32_t> path;
    int cur = int(*sink);
    while (cur != -1) {
      path.push_back(uint32_t(cur));
      cur = prev[cur];
    }
    for (uint32_t v : path) {
      auto it = std::find(I.begin(), I.end(), v);
      if (it != I.end()) I.erase(it);
      else I.push_back(v);
    }
  }

  if (I.size() == m) {
    res.safe = true;
    // order the transversal to match forms: any bijection works; report sorted
    res.transversal = I;
    std::sort(res.transversal.begin(), res.transversal.end());
    return res;
  }
  res.safe = false;
  std::set<uint32_t> t;
  for (uint32_t v : reachable_snapshot) t.insert(vs.block_of(v));
  res.deficient_blocks.assign(t.begin(), t.end());
  return res;
}

bool is_safe(const std::vector<LinearForm>& forms, const VarSpace& vs) {
  return analyze_safety(forms, vs).safe;
}

LinearForm zero_blocks(const LinearForm& f, const std::vector<uint32_t>& blocks, const VarSpace& vs) {
  LinearForm g = f;
  for (uint32_t b : blocks)
    for (uint32_t j = 0; j < vs.bits; ++j)
      g.set(vs.var(b, j), false);
  return g;
}

std::vector<LinearForm> restricted_basis(const std::vector<LinearForm>& forms,
                                         const std::vector<uint32_t>& blocks, const VarSpace& vs) {
  LinearSystem sys(vs);
  for (const auto& f : forms) sys.add_row(zero_blocks(f, blocks, vs), 0);
  LinearSystem red = sys.reduced();
  std::vector<LinearForm> basis;
  for (const auto& r : red.rows())
    if (r.form.any()) basis.push_back(r.form);
  return basis;
}

std::vector<uint32_t> closure(const std::vector<LinearForm>& forms, const VarSpace& vs) {
  std::vector<uint32_t> S;
  for (;;) {
    auto basis = restricted_basis(forms, S, vs);
    if (basis.empty()) return S;
    auto res = analyze_safety(basis, vs);
    if (res.safe) return S;
    if (res.deficient_blocks.empty())
      throw std::runtime_error("closure: empty deficiency certificate");
    std::set<uint32_t> s(S.begin(), S.end());
    for (uint32_t b : res.deficient_blocks) s.insert(b);
    if (s.size() == S.size())
      throw std::runtime_error("closure: certificate made no progress");
    S.assign(s.begin(), s.end());
  }
}

uint32_t dim_of(const std::vector<LinearForm>& forms) {
  if (forms.empty()) return 0;
  std::vector<BitVec> ech;
  for (auto f : forms) {
    for (auto& e : ech) {
      int p = e.lowest_set();
      if (p >= 0 && f.get(uint32_t(p))) f ^= e;
    }
    if (f.any()) ech.push_back(f);
  }
  return uint32_t(ech.size());
}

// --- rank-probability experiment -----------------------------------------------------

RankProbabilityResult rank_probability_experiment(const LinearSystem& psi,
                                                  const std::vector<std::vector<uint32_t>>& allowed,
                                                  uint32_t n, uint64_t trials, uint64_t seed) {
  const VarSpace& vs = psi.space();
  if (allowed.size() != vs.k) throw std::invalid_argument("rank_probability: one allowed set per block");
  for (const auto& a : allowed)
    if (3 * a.size() < 2 * n) throw std::invalid_argument("rank_probability: |A_i| < 2n/3");
  RankProbabilityResult res;
  res.rank = psi.rank();
  res.trials = trials;
  res.reference = std::pow(0.75, double(res.rank));
  for (uint64_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    BitVec x(vs.num_vars());
    for (uint32_t b = 0; b < vs.k; ++b) {
      uint32_t idx = allowed[b][rng.below(allowed[b].size())];
      for (uint32_t j = 0; j < vs.bits; ++j)
        if ((idx >> (vs.bits - 1 - j)) & 1) x.set(vs.var(b, j), true);
    }
    if (psi.satisfied_by(x)) res.hits++;
  }
  double emp = res.empirical();
  double se = std::sqrt(std::max(emp * (1 - emp), 1e-12) / double(trials));
  res.violated = emp > res.reference + 3 * se;
  return res;
}

// --- serialization -------------------------------------------------------------------

void save_linear_system(const LinearSystem& s, std::ostream& out) {
  for (const auto& r : s.rows())
    out << r.form.to_string01() << " " << int(r.rhs) << "\n";
}

LinearSystem load_linear_system(std::istream& in, const VarSpace& vs) {
  LinearSystem s(vs);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string coeffs;
    int rhs;
    if (!(ls >> coeffs >> rhs)) throw std::invalid_argument("linear system: bad line");
    if (coeffs.size() != vs.num_vars()) throw std::invalid_argument("linear system: width mismatch");
    s.add_row(BitVec::from_string01(coeffs), uint8_t(rhs));
  }
  return s;
}

}  // namespace bclq
