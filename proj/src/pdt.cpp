#include "bclq/pdt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bclq {

uint32_t ParityDecisionTree::depth() const {
  std::function<uint32_t(int)> go = [&](int v) -> uint32_t {
    const auto& nd = nodes[v];
    if (nd.leaf) return 0;
    return 1 + std::max(go(nd.child0), go(nd.child1));
  };
  return root >= 0 ? go(root) : 0;
}

void ParityDecisionTree::validate() const {
  for (const auto& nd : nodes) {
    if (nd.leaf) continue;
    if (nd.child0 < 0 || nd.child1 < 0 || size_t(nd.child0) >= nodes.size() ||
        size_t(nd.child1) >= nodes.size())
      throw std::invalid_argument("pdt: missing child");
    if (nd.query.size() != vs.num_vars() || nd.query.none())
      throw std::invalid_argument("pdt: bad query");
  }
}

int run_pdt(const ParityDecisionTree& t, const BitVec& x, std::vector<int>* visited) {
  int v = t.root;
  if (visited) visited->push_back(v);
  while (!t.nodes[v].leaf) {
    bool b = t.nodes[v].query.dot(x);
    v = b ? t.nodes[v].child1 : t.nodes[v].child0;
    if (visited) visited->push_back(v);
  }
  return v;
}

ParityDecisionTree random_pdt(const VarSpace& vs, uint32_t depth, uint64_t seed,
                              const std::vector<int>& allowed_blocks) {
  ParityDecisionTree t;
  t.vs = vs;
  Rng rng(seed);
  std::vector<uint32_t> vars;
  for (uint32_t v = 0; v < vs.num_vars(); ++v) {
    if (allowed_blocks.empty() ||
        std::find(allowed_blocks.begin(), allowed_blocks.end(), int(vs.block_of(v))) !=
            allowed_blocks.end())
      vars.push_back(v);
  }
  std::function<int(uint32_t)> build = [&](uint32_t d) -> int {
    PdtNode node;
    if (d == depth) {
      node.leaf = true;
      t.nodes.push_back(std::move(node));
      return int(t.nodes.size()) - 1;
    }
    node.query = LinearForm(vs.num_vars());
    while (node.query.none())
      for (uint32_t v : vars)
        if (rng.below(3) == 0) node.query.flip(v);
    int self = int(t.nodes.size());
    t.nodes.push_back(std::move(node));
    int c0 = build(d + 1);
    int c1 = build(d + 1);
    t.nodes[self].child0 = c0;
    t.nodes[self].child1 = c1;
    return self;
  };
  t.root = build(0);
  return t;
}

// --- NonEdgeInstance ----------------------------------------------------------

NonEdgeInstance::NonEdgeInstance(const BlockGraph& g, std::vector<VertexId> m)
    : g_(&g), m_(std::move(m)) {
  std::set<int> used;
  for (const auto& u : m_) {
    if (u.block < 0 || uint32_t(u.block) >= g.k() || u.index >= g.n())
      throw std::invalid_argument("NonEdgeInstance: vertex out of range");
    if (!used.insert(u.block).second)
      throw std::invalid_argument("NonEdgeInstance: two members share a block");
  }
  for (size_t a = 0; a < m_.size(); ++a)
    for (size_t b = a + 1; b < m_.size(); ++b)
      if (!g.adjacent(m_[a], m_[b]))
        throw std::invalid_argument("NonEdgeInstance: members must be pairwise adjacent");
  neighborhoods_.resize(g.k());
  for (int i = 0; i < int(g.k()); ++i) {
    if (used.count(i)) continue;
    free_blocks_.push_back(i);
    neighborhoods_[i] = g.common_neighborhood(m_, i);
  }
}

bool NonEdgeInstance::is_free(int block) const {
  return std::find(free_blocks_.begin(), free_blocks_.end(), block) != free_blocks_.end();
}

const BlockSubset& NonEdgeInstance::neighborhood(int block) const {
  if (!is_free(block)) throw std::invalid_argument("neighborhood: block belongs to M");
  return neighborhoods_[block];
}

// --- walk simulator -------------------------------------------------------------

WalkTranscript simulate_walk(const NonEdgeInstance& inst, const ParityDecisionTree& t,
                             uint64_t seed) {
  const VarSpace vs = inst.var_space();
  Rng rng(seed);
  WalkTranscript w;
  w.equations = LinearSystem(vs);
  w.substitution = AffineRestriction(vs);
  std::set<int> free_set(inst.free_blocks().begin(), inst.free_blocks().end());

  int v = t.root;
  w.visited.push_back(v);
  uint32_t bits = vs.bits;
  while (!t.nodes[v].leaf) {
    w.iterations++;
    const LinearForm& raw = t.nodes[v].query;
    auto [g, c] = w.substitution.apply(raw);
    WalkStep step;
    step.node = v;
    if (g.none()) {
      step.query_constant = true;
      step.branch = c;
      v = c ? t.nodes[v].child1 : t.nodes[v].child0;
      w.visited.push_back(v);
      w.trace.push_back(step);
      continue;
    }
    // least (block, bit) in F x [bits] appearing in the reduced query;
    // variable ids are block-major so the first free-block bit is the min
    int var = -1;
    g.for_each_set([&](uint32_t v) {
      if (var < 0 && inst.is_free(int(vs.block_of(v)))) var = int(v);
    });
    if (var < 0)
      throw std::invalid_argument("simulate_walk: query reduces to variables of M's blocks");
    int i = int(vs.block_of(uint32_t(var)));
    uint32_t j = vs.bit_of(uint32_t(var));
    step.block = i;
    step.bit = int(j);
    const BlockSubset& nb = inst.neighborhood(i);
    uint32_t cnt = nb.count();
    if (cnt == 0) throw std::runtime_error("simulate_walk: empty common neighborhood");
    uint32_t y = nb.nth(uint32_t(rng.below(cnt)));
    step.sampled = y;
    // pin every bit of block i except j to the bits of y
    for (uint32_t h = 0; h < bits; ++h) {
      if (h == j) continue;
      uint8_t bit = (y >> (bits - 1 - h)) & 1;
      w.equations.add_row(BitVec::unit(vs.num_vars(), vs.var(i, h)), bit);
      w.substitution.pin_constant(vs.var(i, h), bit);
    }
    uint32_t yflip = y ^ (1u << (bits - 1 - j));
    if (!nb.contains(yflip)) {
      uint8_t bit = (y >> (bits - 1 - j)) & 1;
      w.equations.add_row(BitVec::unit(vs.num_vars(), vs.var(i, j)), bit);
      w.substitution.pin_constant(vs.var(i, j), bit);
      w.candidates.push_back({{i, y}});
      step.pair = false;
    } else {
      uint8_t b = rng.coin();
      w.equations.add_row(raw, b);
      // solve the reduced query for x_{i,j}
      auto [g2, c2] = w.substitution.apply(raw);
      if (!g2.get(vs.var(i, j)))
        throw std::logic_error("simulate_walk: pivot vanished from the query");
      g2.flip(vs.var(i, j));
      w.substitution.pin(vs.var(i, j), g2, uint8_t(b ^ c2));
      w.candidates.push_back({{i, y}, {i, yflip}});
      step.pair = true;
      step.branch = b;
      v = b ? t.nodes[v].child1 : t.nodes[v].child0;
      w.visited.push_back(v);
    }
    free_set.erase(i);
    w.trace.push_back(step);
  }
  w.leaf = v;
  w.free_blocks.assign(free_set.begin(), free_set.end());
  // FAIL iff two candidates from distinct entries are non-adjacent
  for (size_t e1 = 0; e1 < w.candidates.size() && !w.fail; ++e1)
    for (size_t e2 = e1 + 1; e2 < w.candidates.size() && !w.fail; ++e2)
      for (auto [i1, y1] : w.candidates[e1])
        for (auto [i2, y2] : w.candidates[e2])
          if (!inst.graph().adjacent({i1, y1}, {i2, y2})) {
            w.fail = true;
            break;
          }
  return w;
}

void check_simulation_properties(const NonEdgeInstance& inst, const ParityDecisionTree& t,
                                 const WalkTranscript& w) {
  const VarSpace vs = inst.var_space();
  w.substitution.validate();
  // pinned blocks are exactly the blocks outside F that the walk consumed
  std::set<int> free_now(w.free_blocks.begin(), w.free_blocks.end());
  for (uint32_t b = 0; b < vs.k; ++b) {
    bool pinned = !w.substitution.is_free_block(b);
    bool outside_f = !free_now.count(int(b));
    bool in_m = !inst.is_free(int(b));
    if (pinned != (outside_f && !in_m))
      throw std::runtime_error("transcript: pinned blocks disagree with F");
  }
  // every completion keeps the determined columns inside the candidate sets
  std::vector<uint32_t> free_vars;
  for (uint32_t v = 0; v < vs.num_vars(); ++v)
    if (w.substitution.is_free_var(v)) free_vars.push_back(v);
  uint64_t cases = free_vars.size() <= 12 ? (1ull << free_vars.size()) : 256;
  Rng rng(7);
  for (uint64_t it = 0; it < cases; ++it) {
    BitVec fa(vs.num_vars());
    for (size_t idx = 0; idx < free_vars.size(); ++idx) {
      bool bit = free_vars.size() <= 12 ? ((it >> idx) & 1) : rng.coin();
      if (bit) fa.set(free_vars[idx], true);
    }
    BitVec full = w.substitution.complete(fa);
    for (const auto& entry : w.candidates) {
      int block = entry[0].first;
      uint32_t idx = 0;
      for (uint32_t h = 0; h < vs.bits; ++h)
        idx = (idx << 1) | full.get(vs.var(block, h));
      bool found = false;
      for (auto [bb, yy] : entry)
        if (bb == block && yy == idx) found = true;
      if (!found) throw std::runtime_error("transcript: completion leaves the candidate set");
      if (!inst.neighborhood(block).contains(idx))
        throw std::runtime_error("transcript: completion leaves the neighborhood");
    }
  }
  // the equations imply every parity constraint on the walked path
  for (size_t s = 0; s + 1 < w.visited.size(); ++s) {
    int v = w.visited[s];
    int next = w.visited[s + 1];
    uint8_t b = t.nodes[v].child1 == next ? 1 : 0;
    if (!w.equations.implies({t.nodes[v].query, b}))
      throw std::runtime_error("transcript: path constraint not implied");
  }
}

WalkDistributionReport walk_distribution_test(const NonEdgeInstance& inst,
                                              const ParityDecisionTree& t, uint64_t trials,
                                              uint64_t seed) {
  const VarSpace vs = inst.var_space();
  WalkDistributionReport rep;
  std::vector<uint64_t> wcount(t.nodes.size(), 0), vcount(t.nodes.size(), 0);
  for (uint64_t trial = 0; trial < trials; ++trial) {
    auto w = simulate_walk(inst, t, mix64(seed, trial));
    for (int v : w.visited) wcount[v]++;
  }
  for (uint64_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed, 0x8000000000000000ull ^ trial);
    BitVec x(vs.num_vars());
    for (int i : inst.free_blocks()) {
      const BlockSubset& nb = inst.neighborhood(i);
      uint32_t y = nb.nth(uint32_t(rng.below(nb.count())));
      for (uint32_t h = 0; h < vs.bits; ++h)
        if ((y >> (vs.bits - 1 - h)) & 1) x.set(vs.var(i, h), true);
    }
    for (const auto& u : inst.m())
      for (uint32_t h = 0; h < vs.bits; ++h)
        if ((u.index >> (vs.bits - 1 - h)) & 1) x.set(vs.var(u.block, h), true);
    std::vector<int> visited;
    run_pdt(t, x, &visited);
    for (int v : visited) vcount[v]++;
  }
  rep.walk_freq.resize(t.nodes.size());
  rep.direct_freq.resize(t.nodes.size());
  double tv = 0;
  for (size_t v = 0; v < t.nodes.size(); ++v) {
    rep.walk_freq[v] = double(wcount[v]) / double(trials);
    rep.direct_freq[v] = double(vcount[v]) / double(trials);
    double d = std::fabs(rep.walk_freq[v] - rep.direct_freq[v]);
    rep.max_abs_diff = std::max(rep.max_abs_diff, d);
    if (t.nodes[v].leaf) tv += d;
  }
  rep.leaf_tv = tv / 2.0;
  return rep;
}

SuccessRateReport success_rate(const NonEdgeInstance& inst, const ParityDecisionTree& t,
                               uint64_t trials, uint64_t seed, double alpha, double beta,
                               uint32_t R) {
  uint32_t d = t.depth();
  if (inst.m().size() + 8ull * d > R)
    throw std::invalid_argument("success_rate: |M| + 8d exceeds R");
  SuccessRateReport rep;
  rep.trials = trials;
  rep.reference = std::exp(-32.0 * d * beta - 64.0 * double(d) * double(d) * (1.0 - alpha));
  rep.overrun_bound = std::exp(-double(d) / 4.0);
  for (uint64_t trial = 0; trial < trials; ++trial) {
    auto w = simulate_walk(inst, t, mix64(seed, trial));
    if (!w.fail) rep.successes++;
    if (w.iterations > 4ull * d) rep.overruns++;
  }
  double emp = rep.empirical();
  double se = std::sqrt(std::max(emp * (1 - emp), 0.0) / double(std::max<uint64_t>(trials, 1)));
  rep.violated = emp + 3 * se < rep.reference;
  double of = rep.overrun_freq();
  double ose = std::sqrt(std::max(of * (1 - of), 0.0) / double(std::max<uint64_t>(trials, 1)));
  rep.overrun_violated = of > rep.overrun_bound + 3 * ose;
  return rep;
}

// --- restriction extraction ---------------------------------------------------------

ExtractResult extract_restriction(const NonEdgeInstance& inst, const WalkTranscript& w,
                                  const LinearSystem& psi, uint32_t R) {
  const VarSpace vs = inst.var_space();
  const BlockGraph& g = inst.graph();
  ExtractResult result;
  auto infeasible = [&](std::string why) {
    result.infeasible_reason = std::move(why);
    return result;
  };
  if (w.fail) throw std::invalid_argument("extract_restriction: transcript is a failure");

  LinearSystem reduced = psi.reduced();
  if (!reduced.consistent()) return infeasible("system is inconsistent");
  for (const auto& row : reduced.rows())
    row.form.for_each_set([&](uint32_t var) {
      if (!inst.is_free(int(vs.block_of(var))))
        throw std::invalid_argument("extract_restriction: system touches the blocks of M");
    });
  uint32_t r = reduced.rank();
  if (inst.m().size() + 2ull * r > R)
    throw std::invalid_argument("extract_restriction: |M| + 2 rank exceeds R");

  std::vector<LinearForm> forms;
  for (const auto& row : reduced.rows())
    if (row.form.any()) forms.push_back(row.form);
  std::vector<uint32_t> cl = closure(forms, vs);
  std::set<uint32_t> cl_set(cl.begin(), cl.end());
  std::set<int> walk_free(w.free_blocks.begin(), w.free_blocks.end());

  // candidate vertices placed by the walk into closure blocks outside F
  std::vector<VertexId> m_hat;
  for (const auto& entry : w.candidates) {
    int block = entry[0].first;
    if (!cl_set.count(uint32_t(block)) || walk_free.count(block)) continue;
    for (auto [bb, yy] : entry) m_hat.push_back({bb, yy});
  }

  // stage 1: choose vertices for closure blocks still free, inside the
  // common neighborhood of M, m_hat and earlier picks, and compatible with
  // the system rows already fully determined by the picks
  std::vector<VertexId> anchor = inst.m();
  anchor.insert(anchor.end(), m_hat.begin(), m_hat.end());
  std::vector<std::pair<int, uint32_t>> closure_picks;
  AffineRestriction stage1_pins(vs);
  for (uint32_t b : cl) {
    if (!walk_free.count(int(b))) continue;
    BlockSubset nb(int(b), g.n(), true);
    for (const auto& u : anchor) {
      if (u.block == int(b)) return infeasible("closure stage: anchor inside target block");
      auto row = g.neighbors_in_block(u, int(b));
      nb.intersect_words(row.words().data());
    }
    uint32_t cnt = nb.count();
    if (cnt == 0) return infeasible("closure stage: empty common neighborhood");
    std::optional<uint32_t> pick;
    for (uint32_t t = 0; t < cnt && !pick; ++t) {
      uint32_t cand = nb.nth(t);
      AffineRestriction trial = stage1_pins;
      for (uint32_t h = 0; h < vs.bits; ++h)
        trial.pin_constant(vs.var(b, h), (cand >> (vs.bits - 1 - h)) & 1);
      LinearSystem sys = trial.apply(reduced);
      bool contradiction = false;
      for (const auto& row : sys.rows())
        if (row.form.none() && row.rhs) { contradiction = true; break; }
      if (!contradiction) pick = cand;
    }
    if (!pick) return infeasible("closure stage: no pick satisfies the internal equations");
    for (uint32_t h = 0; h < vs.bits; ++h)
      stage1_pins.pin_constant(vs.var(b, h), (*pick >> (vs.bits - 1 - h)) & 1);
    closure_picks.push_back({int(b), *pick});
    anchor.push_back({int(b), *pick});
  }

  // full assignment: closure picks on their blocks, zero elsewhere free,
  // walk substitution everywhere else
  BitVec free_assign(vs.num_vars());
  for (auto [b, y] : closure_picks)
    for (uint32_t h = 0; h < vs.bits; ++h)
      if ((y >> (vs.bits - 1 - h)) & 1) free_assign.set(vs.var(b, h), true);
  BitVec full = w.substitution.complete(free_assign);

  // rho1: pin all closure blocks to their values under the full assignment
  AffineRestriction rho(vs);
  std::vector<VertexId> pinned_vertices;
  for (uint32_t b : cl) {
    uint32_t idx = 0;
    for (uint32_t h = 0; h < vs.bits; ++h) idx = (idx << 1) | full.get(vs.var(b, h));
    pinned_vertices.push_back({int(b), idx});
    for (uint32_t h = 0; h < vs.bits; ++h)
      rho.pin_constant(vs.var(b, h), full.get(vs.var(b, h)));
  }

  LinearSystem after1 = rho.apply(reduced);
  for (const auto& row : after1.rows())
    if (row.form.none() && row.rhs)
      return infeasible("closure stage: system row violated by the pinned blocks");
  LinearSystem after1_red = after1.reduced();
  if (!after1_red.consistent())
    return infeasible("closure stage: system inconsistent after pinning");
  std::vector<LinearForm> safe_forms;
  for (const auto& row : after1_red.rows())
    if (row.form.any()) safe_forms.push_back(row.form);

  std::vector<uint32_t> chosen_vars;
  if (!safe_forms.empty()) {
    auto safety = analyze_safety(safe_forms, vs);
    if (!safety.safe) return infeasible("internal: restricted system is not safe");
    chosen_vars = safety.transversal;
  }

  // stage 2: pin all but the chosen bit of each transversal block to a pair
  // of neighbors differing only in that bit
  std::vector<VertexId> pair_candidates;
  std::sort(chosen_vars.begin(), chosen_vars.end());
  std::vector<int> b_blocks;
  for (uint32_t var : chosen_vars) {
    int b = int(vs.block_of(var));
    uint32_t j = vs.bit_of(var);
    b_blocks.push_back(b);
    std::vector<VertexId> targets = inst.m();
    targets.insert(targets.end(), pinned_vertices.begin(), pinned_vertices.end());
    targets.insert(targets.end(), pair_candidates.begin(), pair_candidates.end());
    BlockSubset nb(b, g.n(), true);
    for (const auto& u : targets) {
      if (u.block == b) return infeasible("pair stage: anchor inside target block");
      auto row = g.neighbors_in_block(u, b);
      nb.intersect_words(row.words().data());
    }
    uint32_t mask = 1u << (vs.bits - 1 - j);
    std::optional<uint32_t> found;
    for (uint32_t y = 0; y < g.n() && !found; ++y)
      if ((y & mask) == 0 && nb.contains(y) && nb.contains(y | mask)) found = y;
    if (!found) return infeasible("pair stage: no neighbor pair differing in the chosen bit");
    for (uint32_t h = 0; h < vs.bits; ++h) {
      if (h == j) continue;
      rho.pin_constant(vs.var(b, h), (*found >> (vs.bits - 1 - h)) & 1);
    }
    pair_candidates.push_back({b, *found});
    pair_candidates.push_back({b, *found | mask});
  }

  // stage 3: solve the remaining system for the chosen bits
  {
    LinearSystem cur = rho.apply(reduced);
    std::set<uint32_t> chosen_set(chosen_vars.begin(), chosen_vars.end());
    std::vector<LinearEq> ech;
    std::vector<uint32_t> pivots;
    for (const auto& row : cur.rows()) {
      LinearForm f = row.form;
      uint8_t rh = row.rhs;
      for (size_t i = 0; i < ech.size(); ++i)
        if (f.get(pivots[i])) { f ^= ech[i].form; rh ^= ech[i].rhs; }
      if (f.none()) {
        if (rh) return infeasible("solve stage: inconsistent row");
        continue;
      }
      std::optional<uint32_t> pivot;
      f.for_each_set([&](uint32_t v) {
        if (!pivot && chosen_set.count(v)) pivot = v;
      });
      if (!pivot) return infeasible("solve stage: row without a transversal variable");
      for (size_t i = 0; i < ech.size(); ++i)
        if (ech[i].form.get(*pivot)) { ech[i].form ^= f; ech[i].rhs ^= rh; }
      ech.push_back({f, rh});
      pivots.push_back(*pivot);
    }
    for (size_t i = 0; i < ech.size(); ++i) {
      LinearForm coeffs = ech[i].form;
      coeffs.flip(pivots[i]);
      rho.pin(pivots[i], coeffs, ech[i].rhs);
    }
  }

  Extraction ex;
  ex.rank = r;
  ex.rho = rho;
  ex.fixed_blocks = rho.fixed_blocks();
  ex.free_blocks = rho.free_blocks();
  std::set<std::pair<int, uint32_t>> mp;
  for (const auto& u : pinned_vertices) mp.insert({u.block, u.index});
  for (const auto& u : pair_candidates) mp.insert({u.block, u.index});
  for (const auto& u : inst.m()) mp.erase({u.block, u.index});
  for (auto [b, y] : mp) ex.m_prime.push_back({b, y});

  if (ex.fixed_blocks.size() > r)
    return infeasible("internal: more blocks fixed than the system rank");
  LinearSystem induced = rho.induced_system();
  if (!induced.implies(reduced))
    return infeasible("restriction does not imply the system");
  result.extraction = std::move(ex);
  return result;
}

void check_extraction(const NonEdgeInstance& inst, const Extraction& ex, const LinearSystem& psi,
                      uint32_t budget_bits, uint64_t samples, uint64_t seed) {
  const VarSpace vs = inst.var_space();
  const BlockGraph& g = inst.graph();
  // condition 1: blocks fixed bounded by the rank
  if (ex.fixed_blocks.size() > ex.rank)
    throw std::runtime_error("extraction: fixed blocks exceed rank");
  // condition 2: exact implication
  if (!ex.rho.induced_system().implies(psi.reduced()))
    throw std::runtime_error("extraction: rho does not imply the system");
  // condition 3: completions select m_prime vertices forming a clique with M
  std::set<std::pair<int, uint32_t>> mp;
  for (const auto& u : ex.m_prime) mp.insert({u.block, u.index});
  std::vector<uint32_t> free_vars;
  for (uint32_t v = 0; v < vs.num_vars(); ++v)
    if (ex.rho.is_free_var(v)) free_vars.push_back(v);
  bool exhaustive = free_vars.size() <= budget_bits;
  uint64_t cases = exhaustive ? (1ull << free_vars.size()) : samples;
  Rng rng(seed);
  for (uint64_t it = 0; it < cases; ++it) {
    BitVec fa(vs.num_vars());
    for (size_t idx = 0; idx < free_vars.size(); ++idx) {
      bool bit = exhaustive ? ((it >> idx) & 1) : rng.coin();
      if (bit) fa.set(free_vars[idx], true);
    }
    BitVec full = ex.rho.complete(fa);
    std::vector<VertexId> fixed_vertices;
    for (int b : ex.fixed_blocks) {
      uint32_t idx = 0;
      for (uint32_t h = 0; h < vs.bits; ++h) idx = (idx << 1) | full.get(vs.var(b, h));
      if (!mp.count({b, idx}))
        throw std::runtime_error("extraction: completion leaves m_prime");
      fixed_vertices.push_back({b, idx});
    }
    for (size_t a = 0; a < fixed_vertices.size(); ++a) {
      for (size_t b = a + 1; b < fixed_vertices.size(); ++b)
        if (!g.adjacent(fixed_vertices[a], fixed_vertices[b]))
          throw std::runtime_error("extraction: fixed vertices are not a clique");
      for (const auto& u : inst.m())
        if (!g.adjacent(fixed_vertices[a], u))
          throw std::runtime_error("extraction: fixed vertex misses an edge to M");
    }
  }
}

std::optional<std::pair<VertexId, VertexId>> nonedge_oracle(
    const NonEdgeInstance& inst, const std::vector<std::pair<int, uint32_t>>& choices) {
  std::vector<std::pair<int, uint32_t>> sorted = choices;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() != inst.free_blocks().size())
    throw std::invalid_argument("nonedge_oracle: one choice per free block required");
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].first != inst.free_blocks()[i])
      throw std::invalid_argument("nonedge_oracle: choices must cover the free blocks");
    if (!inst.neighborhood(sorted[i].first).contains(sorted[i].second))
      throw std::invalid_argument("nonedge_oracle: choice outside the common neighborhood");
  }
  for (size_t a = 0; a < sorted.size(); ++a)
    for (size_t b = a + 1; b < sorted.size(); ++b) {
      VertexId u{sorted[a].first, sorted[a].second};
      VertexId v{sorted[b].first, sorted[b].second};
      if (!inst.graph().adjacent(u, v)) return std::make_pair(u, v);
    }
  return std::nullopt;
}

// --- serialization --------------------------------------------------------------------

namespace {

void write_node(const ParityDecisionTree& t, int v, std::ostream& out) {
  const auto& nd = t.nodes[v];
  if (nd.leaf) {
    if (nd.output)
      out << "(out " << nd.output->first.block << " " << nd.output->first.index << " "
          << nd.output->second.block << " " << nd.output->second.index << ")";
    else
      out << "(undet)";
    return;
  }
  out << "(q " << nd.query.to_string01() << " ";
  write_node(t, nd.child0, out);
  out << " ";
  write_node(t, nd.child1, out);
  out << ")";
}

struct PdtParser {
  std::istream& in;
  ParityDecisionTree& t;

  void skip_ws() {
    while (in.peek() == ' ' || in.peek() == '\n' || in.peek() == '\t') in.get();
  }
  void expect(char c) {
    skip_ws();
    if (in.get() != c) throw std::invalid_argument("pdt parse: expected a different token");
  }
  std::string word() {
    skip_ws();
    std::string w;
    while (std::isalnum(in.peek()) || in.peek() == '_') w += char(in.get());
    return w;
  }
  int node() {
    expect('(');
    std::string tag = word();
    PdtNode nd;
    if (tag == "undet") {
      nd.leaf = true;
      expect(')');
      t.nodes.push_back(std::move(nd));
      return int(t.nodes.size()) - 1;
    }
    if (tag == "out") {
      nd.leaf = true;
      skip_ws();
      int b1, i1, b2, i2;
      in >> b1 >> i1 >> b2 >> i2;
      nd.output = std::make_pair(VertexId{b1, uint32_t(i1)}, VertexId{b2, uint32_t(i2)});
      expect(')');
      t.nodes.push_back(std::move(nd));
      return int(t.nodes.size()) - 1;
    }
    if (tag != "q") throw std::invalid_argument("pdt parse: unknown tag " + tag);
    skip_ws();
    std::string bits;
    while (in.peek() == '0' || in.peek() == '1') bits += char(in.get());
    nd.query = BitVec::from_string01(bits);
    int self = int(t.nodes.size());
    t.nodes.push_back(std::move(nd));
    int c0 = node();
    int c1 = node();
    expect(')');
    t.nodes[self].child0 = c0;
    t.nodes[self].child1 = c1;
    return self;
  }
};

}  // namespace

void save_pdt(const ParityDecisionTree& t, std::ostream& out) {
  out << "pdt " << t.vs.k << " " << t.vs.bits << "\n";
  write_node(t, t.root, out);
  out << "\n";
}

ParityDecisionTree load_pdt(std::istream& in) {
  ParityDecisionTree t;
  std::string tag;
  in >> tag;
  if (tag != "pdt") throw std::invalid_argument("pdt parse: missing header");
  in >> t.vs.k >> t.vs.bits;
  PdtParser parser{in, t};
  t.root = parser.node();
  t.validate();
  return t;
}

void save_transcript_json(const WalkTranscript& w, std::ostream& out) {
  nlohmann::json j;
  j["fail"] = w.fail;
  j["leaf"] = w.leaf;
  j["iterations"] = w.iterations;
  j["free_blocks"] = w.free_blocks;
  j["visited"] = w.visited;
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& entry : w.candidates) {
    nlohmann::json e = nlohmann::json::array();
    for (auto [b, y] : entry) e.push_back({{"block", b}, {"index", y}});
    cands.push_back(std::move(e));
  }
  j["candidates"] = std::move(cands);
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : w.trace)
    steps.push_back({{"node", s.node},
                     {"constant", s.query_constant},
                     {"block", s.block},
                     {"bit", s.bit},
                     {"sampled", s.sampled},
                     {"pair", s.pair},
                     {"branch", s.branch}});
  j["trace"] = std::move(steps);
  std::ostringstream eq;
  save_linear_system(w.equations, eq);
  j["equations"] = eq.str();
  out << j.dump(1) << "\n";
}

}  // namespace bclq
