#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "bclq/pdt.hpp"
#include "support.hpp"

using namespace bclq;
using testsupport::random_pdt;

namespace {

ParityDecisionTree leaf_only(const VarSpace& vs) {
  ParityDecisionTree t;
  t.vs = vs;
  PdtNode leaf;
  leaf.leaf = true;
  t.nodes.push_back(leaf);
  t.root = 0;
  return t;
}

ParityDecisionTree single_query(const VarSpace& vs, uint32_t var) {
  ParityDecisionTree t;
  t.vs = vs;
  PdtNode q;
  q.query = BitVec::unit(vs.num_vars(), var);
  t.nodes.push_back(q);
  for (int i = 0; i < 2; ++i) {
    PdtNode leaf;
    leaf.leaf = true;
    t.nodes.push_back(leaf);
  }
  t.nodes[0].child0 = 1;
  t.nodes[0].child1 = 2;
  t.root = 0;
  return t;
}

}  // namespace

TEST_CASE("depth-0 tree evaluates to its unique leaf") {
  VarSpace vs{3, 2};
  auto t = leaf_only(vs);
  BitVec x(vs.num_vars());
  CHECK(run_pdt(t, x) == 0);
  CHECK(t.depth() == 0);
}

TEST_CASE("single-query tree follows the queried bit") {
  VarSpace vs{2, 2};
  auto t = single_query(vs, vs.var(0, 0));
  BitVec x(vs.num_vars());
  CHECK(run_pdt(t, x) == t.nodes[0].child0);
  x.set(vs.var(0, 0), true);
  CHECK(run_pdt(t, x) == t.nodes[0].child1);
}

TEST_CASE("random trees agree with a naive path evaluator") {
  VarSpace vs{3, 2};
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = random_pdt(vs, 5, rng.next());
    t.validate();
    BitVec x(vs.num_vars());
    for (uint32_t v = 0; v < vs.num_vars(); ++v)
      if (rng.coin()) x.set(v, true);
    // naive: follow queries by explicit dot products
    int v = t.root;
    while (!t.nodes[v].leaf) {
      uint32_t parity = 0;
      for (uint32_t w = 0; w < vs.num_vars(); ++w)
        parity ^= (t.nodes[v].query.get(w) && x.get(w)) ? 1 : 0;
      v = parity ? t.nodes[v].child1 : t.nodes[v].child0;
    }
    CHECK(run_pdt(t, x) == v);
  }
}

TEST_CASE("instance validation rejects bad member sets") {
  auto g = BlockGraph::complete(4, 3);
  CHECK_THROWS(NonEdgeInstance(g, {{0, 1}, {0, 2}}));  // two members in one block
  auto h = BlockGraph::edgeless(4, 3);
  CHECK_THROWS(NonEdgeInstance(h, {{0, 1}, {1, 2}}));  // members not adjacent
  NonEdgeInstance ok(g, {{0, 1}});
  CHECK(ok.free_blocks() == std::vector<int>{1, 2});
}

TEST_CASE("walk on the complete graph never fails") {
  auto g = BlockGraph::complete(16, 4);
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  for (uint64_t s = 0; s < 50; ++s) {
    auto t = random_pdt(vs, 4, 1000 + s);
    auto w = simulate_walk(inst, t, s);
    CHECK_FALSE(w.fail);
    check_simulation_properties(inst, t, w);
  }
}

TEST_CASE("depth-0 walk succeeds with empty candidates and full free set") {
  auto g = BlockGraph::sample({4, 3, 0.6, 3});
  NonEdgeInstance inst(g, {});
  auto t = leaf_only(inst.var_space());
  auto w = simulate_walk(inst, t, 9);
  CHECK_FALSE(w.fail);
  CHECK(w.candidates.empty());
  CHECK(w.equations.rows().empty());
  CHECK(w.free_blocks == std::vector<int>{0, 1, 2});
  CHECK(w.leaf == 0);
}

TEST_CASE("one-query walk on the edgeless 2-block graph matches a manual trace") {
  auto g = BlockGraph::edgeless(2, 2);
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  auto t = single_query(vs, vs.var(0, 0));
  uint64_t seed = 42;
  auto w = simulate_walk(inst, t, seed);
  // hand simulation with the same primitive stream: the query is x_{0,0},
  // non-constant, so (i,j) = (0,0); y is drawn uniformly from block 0; its
  // bit-flip neighbor is the other vertex of block 0, inside the edgeless
  // block's full neighborhood, so the pair branch is taken with a fair coin
  Rng expected(seed);
  uint32_t y = uint32_t(expected.below(2));
  uint8_t b = expected.coin();
  REQUIRE(w.trace.size() == 1);
  CHECK(w.trace[0].block == 0);
  CHECK(w.trace[0].bit == 0);
  CHECK(w.trace[0].sampled == y);
  CHECK(w.trace[0].pair);
  CHECK(w.trace[0].branch == int(b));
  CHECK(w.leaf == (b ? t.nodes[0].child1 : t.nodes[0].child0));
  CHECK(w.candidates == std::vector<std::vector<std::pair<int, uint32_t>>>{{{0, y}, {0, y ^ 1u}}});
  CHECK(w.free_blocks == std::vector<int>{1});
  CHECK_FALSE(w.fail);  // a single entry cannot produce a cross-entry pair
  check_simulation_properties(inst, t, w);
}

TEST_CASE("per-iteration structure: one block consumed, candidate entries of size 1 or 2") {
  auto g = BlockGraph::sample({16, 5, 0.7, 21});
  NonEdgeInstance inst(g, {{4, 2}});
  VarSpace vs = inst.var_space();
  for (uint64_t s = 0; s < 40; ++s) {
    auto t = random_pdt(vs, 4, 999 + s, inst.free_blocks());
    auto w = simulate_walk(inst, t, s);
    std::set<int> consumed;
    for (const auto& step : w.trace) {
      if (step.block < 0) continue;
      CHECK(consumed.insert(step.block).second);  // each block leaves F once
    }
    for (const auto& entry : w.candidates) {
      CHECK(entry.size() >= 1);
      CHECK(entry.size() <= 2);
    }
    CHECK(w.candidates.size() == consumed.size());
    if (!w.fail) check_simulation_properties(inst, t, w);
  }
}

TEST_CASE("distribution: depth-0 tree gives a point mass on both sides") {
  auto g = BlockGraph::sample({4, 2, 0.8, 17});
  NonEdgeInstance inst(g, {});
  auto t = leaf_only(inst.var_space());
  auto rep = walk_distribution_test(inst, t, 500, 5);
  CHECK(rep.leaf_tv == 0.0);
  CHECK(rep.max_abs_diff == 0.0);
}

TEST_CASE("distribution: single query on the complete graph is a fair coin") {
  auto g = BlockGraph::complete(4, 2);
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  auto t = single_query(vs, vs.var(0, 0));
  auto rep = walk_distribution_test(inst, t, 40000, 11);
  CHECK(rep.walk_freq[1] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(rep.direct_freq[1] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(rep.leaf_tv < 0.02);
}

TEST_CASE("distribution: random depth-5 trees have small total variation") {
  auto g = BlockGraph::sample({16, 6, 0.8, 8});
  NonEdgeInstance inst(g, {{5, 3}});
  VarSpace vs = inst.var_space();
  for (uint64_t s = 0; s < 3; ++s) {
    auto t = random_pdt(vs, 5, 500 + s, inst.free_blocks());
    auto rep = walk_distribution_test(inst, t, 30000, s);
    CHECK(rep.leaf_tv <= 0.05);
  }
}

TEST_CASE("success rate: complete graph succeeds always, reference is 1 at d=0") {
  auto g = BlockGraph::complete(16, 4);
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  auto t0 = leaf_only(vs);
  auto rep0 = success_rate(inst, t0, 200, 3, 1.0, 0.0, 8);
  CHECK(rep0.empirical() == 1.0);
  CHECK(rep0.reference == 1.0);
  CHECK_FALSE(rep0.violated);
  auto t = random_pdt(vs, 1, 12);
  auto rep = success_rate(inst, t, 500, 4, 1.0, 0.0, 8);
  CHECK(rep.empirical() == 1.0);
  CHECK_FALSE(rep.violated);
  CHECK_FALSE(rep.overrun_violated);
}

TEST_CASE("success rate enforces |M| + 8d <= R") {
  auto g = BlockGraph::complete(16, 4);
  NonEdgeInstance inst(g, {});
  auto t = random_pdt(inst.var_space(), 2, 5);
  CHECK_THROWS(success_rate(inst, t, 10, 1, 1.0, 0.0, 8));  // 16 > 8
}

TEST_CASE("success rate and overruns stay above the references on dense graphs") {
  auto g = BlockGraph::sample({64, 8, 0.97, 19});
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  double beta_hat = 0.2;  // generous for this density
  auto t = random_pdt(vs, 2, 90);
  auto rep = success_rate(inst, t, 3000, 6, 0.97, beta_hat, 17);
  CHECK_FALSE(rep.violated);
  CHECK_FALSE(rep.overrun_violated);
}

TEST_CASE("extraction of the empty system fixes nothing") {
  auto g = BlockGraph::complete(4, 3);
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  auto t = leaf_only(vs);
  auto w = simulate_walk(inst, t, 1);
  LinearSystem psi(vs);
  auto res = extract_restriction(inst, w, psi, 4);
  REQUIRE(res.ok());
  CHECK(res.extraction->fixed_blocks.empty());
  CHECK(res.extraction->m_prime.empty());
  check_extraction(inst, *res.extraction, psi);
}

TEST_CASE("extraction of a single-bit system on the complete graph, checked exhaustively") {
  auto g = BlockGraph::complete(4, 3);
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  auto t = leaf_only(vs);
  auto w = simulate_walk(inst, t, 2);
  LinearSystem psi(vs);
  psi.add_row(BitVec::unit(vs.num_vars(), vs.var(0, 0)), 0);
  auto res = extract_restriction(inst, w, psi, 4);
  REQUIRE(res.ok());
  CHECK(res.extraction->fixed_blocks.size() <= 1);
  CHECK(res.extraction->m_prime.size() <= 2);
  check_extraction(inst, *res.extraction, psi, /*budget_bits=*/12);
  // the induced restriction implies the system exactly
  CHECK(res.extraction->rho.induced_system().implies(psi));
}

TEST_CASE("extraction of random rank-2 systems on near-complete graphs, 100 runs") {
  auto g = BlockGraph::sample({64, 8, 0.98, 123});
  NonEdgeInstance inst(g, {});
  VarSpace vs = inst.var_space();
  int ok_runs = 0, successful = 0;
  for (uint64_t s = 0; successful < 100; ++s) {
    Rng rng(s);
    auto t = random_pdt(vs, 2, 3000 + s);
    auto w = simulate_walk(inst, t, 77 + s);
    if (w.fail) continue;
    successful++;
    LinearSystem psi(vs);
    while (psi.rank() < 2) {
      LinearForm f(vs.num_vars());
      for (uint32_t v = 0; v < vs.num_vars(); ++v)
        if (rng.below(6) == 0) f.flip(v);
      psi.add_row(f, uint8_t(rng.coin()));
    }
    auto res = extract_restriction(inst, w, psi, 16);
    REQUIRE(res.ok());
    check_extraction(inst, *res.extraction, psi, 16, 100, s);
    ok_runs++;
  }
  CHECK(ok_runs == 100);
}

TEST_CASE("extraction with a nonempty M and closure on a free block") {
  auto g = BlockGraph::sample({16, 6, 0.95, 5});
  NonEdgeInstance inst(g, {{5, 1}});
  VarSpace vs = inst.var_space();
  // queries avoid blocks 0 and 1, so the closure blocks stay free
  auto t = random_pdt(vs, 2, 44, {2, 3, 4});
  auto w = simulate_walk(inst, t, 10);
  REQUIRE_FALSE(w.fail);
  // two forms inside block 0: closure is {0}
  LinearSystem psi(vs);
  psi.add_row(BitVec::unit(vs.num_vars(), vs.var(0, 0)), 0);
  psi.add_row(BitVec::unit(vs.num_vars(), vs.var(0, 1)), 1);
  auto res = extract_restriction(inst, w, psi, 10);
  REQUIRE(res.ok());
  CHECK(res.extraction->fixed_blocks == std::vector<int>{0});
  check_extraction(inst, *res.extraction, psi, 12);
}

TEST_CASE("extraction with closure on a walk-consumed block, system drawn from L") {
  auto g = BlockGraph::sample({16, 6, 0.95, 5});
  NonEdgeInstance inst(g, {{5, 1}});
  VarSpace vs = inst.var_space();
  for (uint64_t s = 0; s < 20; ++s) {
    auto t = random_pdt(vs, 2, 600 + s, inst.free_blocks());
    auto w = simulate_walk(inst, t, s);
    if (w.fail || w.candidates.empty()) continue;
    // two of the walk's own pinned equations for one consumed block: the
    // closure is that block and the pinned value must satisfy them
    int consumed = w.candidates[0][0].first;
    LinearSystem psi(vs);
    for (const auto& row : w.equations.rows()) {
      if (row.form.count() != 1) continue;
      uint32_t v = uint32_t(row.form.lowest_set());
      if (int(vs.block_of(v)) == consumed && psi.size() < 2) psi.add_row(row);
    }
    if (psi.size() < 2) continue;
    auto res = extract_restriction(inst, w, psi, 10);
    REQUIRE(res.ok());
    CHECK(res.extraction->fixed_blocks == std::vector<int>{consumed});
    check_extraction(inst, *res.extraction, psi, 12);
  }
}

TEST_CASE("nonedge oracle: complete graph has no answer, edgeless pairs are found") {
  auto g = BlockGraph::complete(4, 3);
  NonEdgeInstance inst(g, {});
  CHECK(!nonedge_oracle(inst, {{0, 1}, {1, 2}, {2, 3}}));
  auto h = BlockGraph::edgeless(4, 2);
  NonEdgeInstance hinst(h, {});
  auto ans = nonedge_oracle(hinst, {{0, 0}, {1, 0}});
  REQUIRE(ans);
  CHECK(ans->first.block == 0);
  CHECK(ans->second.block == 1);
}

TEST_CASE("nonedge oracle rejects choices outside the neighborhood") {
  auto g = BlockGraph::sample({4, 3, 0.5, 2});
  // find a member and a non-neighbor
  VertexId m{0, 0};
  NonEdgeInstance inst(g, {m});
  int target = inst.free_blocks()[0];
  const auto& nb = inst.neighborhood(target);
  uint32_t outside = 0;
  bool found = false;
  for (uint32_t v = 0; v < 4 && !found; ++v)
    if (!nb.contains(v)) { outside = v; found = true; }
  if (found) {
    std::vector<std::pair<int, uint32_t>> choices;
    for (int b : inst.free_blocks())
      choices.push_back({b, b == target ? outside : inst.neighborhood(b).nth(0)});
    CHECK_THROWS(nonedge_oracle(inst, choices));
  }
}

TEST_CASE("nonedge oracle matches search_falsified on the block formula, M empty") {
  uint64_t seed = testsupport::find_unsat_seed(4, 3, 0.3);
  auto g = BlockGraph::sample({4, 3, 0.3, seed});
  auto f = encode_block_clique(g);
  NonEdgeInstance inst(g, {});
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::pair<int, uint32_t>> choices;
    std::vector<uint32_t> per_col;
    for (int b = 0; b < 3; ++b) {
      uint32_t v = uint32_t(rng.below(4));
      choices.push_back({b, v});
      per_col.push_back(v);
    }
    auto ans = nonedge_oracle(inst, choices);
    auto idx = search_falsified(f, Assignment::from_columns(f, per_col));
    CHECK(ans.has_value() == idx.has_value());
    if (ans && idx) {
      const auto& tag = f.tags[*idx];
      CHECK(ans->first.block == tag.i);
      CHECK(ans->first.index == tag.u);
      CHECK(ans->second.block == tag.j);
      CHECK(ans->second.index == tag.v);
    }
  }
}

TEST_CASE("pdt serialization round trips") {
  VarSpace vs{3, 2};
  auto t = random_pdt(vs, 3, 99);
  t.nodes[t.nodes.size() - 1].output = std::make_pair(VertexId{0, 1}, VertexId{2, 3});
  std::stringstream ss;
  save_pdt(t, ss);
  auto back = load_pdt(ss);
  CHECK(back.nodes.size() == t.nodes.size());
  CHECK(back.depth() == t.depth());
  // identical evaluation everywhere
  for (uint64_t m = 0; m < (1ull << vs.num_vars()); ++m) {
    BitVec x(vs.num_vars());
    for (uint32_t v = 0; v < vs.num_vars(); ++v)
      if ((m >> v) & 1) x.set(v, true);
    // leaves are positionally identical in this writer/parser pair
    CHECK(run_pdt(t, x) == run_pdt(back, x));
  }
  std::stringstream ts;
  auto g = BlockGraph::complete(4, 2);
  NonEdgeInstance inst(g, {});
  VarSpace vs2 = inst.var_space();
  auto t2 = single_query(vs2, 0);
  auto w = simulate_walk(inst, t2, 3);
  save_transcript_json(w, ts);
  CHECK(ts.str().find("\"fail\": false") != std::string::npos);
}
