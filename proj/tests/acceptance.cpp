// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criterion 10 exercises the command-line binary, whose path is
// expected as argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bclq/cnf.hpp"
#include "bclq/comm.hpp"
#include "bclq/density.hpp"
#include "bclq/f2.hpp"
#include "bclq/graph.hpp"
#include "bclq/pdt.hpp"
#include "bclq/proof.hpp"
#include "bclq/triangle.hpp"
#include "support.hpp"

using namespace bclq;
using namespace bclq::testsupport;

namespace {

int failures = 0;

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool pass, const std::string& detail) {
  printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  fflush(stdout);
  if (!pass) failures++;
}

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- criterion 1: almost-completeness tail concentration -----------------------

void criterion1() {
  Stopwatch sw;
  auto res = concentration_experiment_ac(4096, 0.9, 8, 20, 5000, 20260101, 4);
  double emp = res.empirical();
  double secs = sw.seconds();
  bool pass = emp <= 0.13 && res.tuples == 100000 && secs < 120.0;
  report(1, pass,
         "tail frequency " + fmt(emp) + " <= 0.13 (reference " + fmt(res.reference) + ", " +
             std::to_string(res.tuples) + " tuples over 20 graphs, " + fmt(secs) + "s)");
}

// --- criterion 2: bounded common neighborhoods ---------------------------------

void criterion2() {
  Stopwatch sw;
  auto g = BlockGraph::sample({4096, 4, 0.875, 7}, 4);
  BoundedCnParams prm{0.875, 0.59, 8};
  auto rep = check_bounded_cn_sampled(g, prm, 1000, 99);
  double secs = sw.seconds();
  bool pass = rep.pass && rep.checks == 1000 && secs < 60.0;
  report(2, pass,
         "1000 sampled neighborhoods inside (1 +/- 0.59) 0.875^|S| n (max deviation " +
             fmt(rep.max_deviation) + ", " + fmt(secs) + "s)");
}

// --- criterion 3: walk node distribution ----------------------------------------

void criterion3() {
  Stopwatch sw;
  auto g = BlockGraph::sample({16, 6, 0.8, 31});
  int good = 0;
  double worst = 0;
  for (int tree = 0; tree < 10; ++tree) {
    std::vector<VertexId> m;
    if (tree >= 5) m = {{4, 2}, {5, 7}};
    // members must be adjacent; fall back to an adjacent pair if needed
    if (!m.empty() && !g.adjacent(m[0], m[1])) m[1].index = (m[1].index + 1) % 16;
    if (!m.empty() && !g.adjacent(m[0], m[1])) m = {{4, 2}};
    NonEdgeInstance inst(g, m);
    auto t = random_pdt(inst.var_space(), 6, 4000 + tree, inst.free_blocks());
    auto rep = walk_distribution_test(inst, t, 100000, 777 + tree);
    worst = std::max(worst, rep.leaf_tv);
    if (rep.leaf_tv <= 0.02) good++;
  }
  bool pass = good == 10;
  report(3, pass,
         "leaf total variation <= 0.02 on " + std::to_string(good) + "/10 depth-6 trees (worst " +
             fmt(worst) + ", " + fmt(sw.seconds()) + "s)");
}

// --- criterion 4: walk success rate ----------------------------------------------

void criterion4() {
  Stopwatch sw;
  double p = 1.0 - std::pow(2.0, -10.0);
  auto g = BlockGraph::sample({1024, 16, p, 404}, 4);
  NonEdgeInstance inst(g, {});
  // measured beta over sampled vertex sets (sizes capped by one per block)
  auto bcn = check_bounded_cn_sampled(g, {p, 0.25, 64}, 2000, 5);
  double beta_hat = bcn.max_deviation;
  bool bcn_pass = bcn.pass;
  bool ok = true;
  double worst_succ = 1.0, worst_overrun = 0.0, reference = 0.0;
  for (int tree = 0; tree < 3; ++tree) {
    auto t = random_pdt(inst.var_space(), 8, 600 + tree, inst.free_blocks());
    auto rep = success_rate(inst, t, 10000, 3030 + tree, p, beta_hat, 64);
    reference = rep.reference;
    worst_succ = std::min(worst_succ, rep.empirical());
    worst_overrun = std::max(worst_overrun, rep.overrun_freq());
    if (rep.violated || rep.overrun_violated) ok = false;
  }
  // complete-graph success is exact
  auto cg = BlockGraph::complete(1024, 16);
  NonEdgeInstance cinst(cg, {});
  auto ct = random_pdt(cinst.var_space(), 8, 19, cinst.free_blocks());
  auto crep = success_rate(cinst, ct, 10000, 5, 1.0, 0.0, 64);
  bool complete_exact = crep.empirical() == 1.0;
  bool pass = ok && bcn_pass && complete_exact;
  report(4, pass,
         "success " + fmt(worst_succ) + " >= reference " + fmt(reference) + " (beta^ " +
             fmt(beta_hat) + "), overrun " + fmt(worst_overrun) + " <= exp(-2)+3s, complete graph exact 1 (" +
             fmt(sw.seconds()) + "s)");
}

// --- criterion 5: closure and safety against exhaustive oracles --------------------

void criterion5() {
  Stopwatch sw;
  int agree = 0, bound_ok = 0;
  const int total = 500;
  Rng rng(616);
  for (int i = 0; i < total; ++i) {
    VarSpace vs{uint32_t(2 + rng.below(5)), uint32_t(1 + rng.below(3))};
    std::vector<LinearForm> forms;
    size_t count = 1 + rng.below(5);
    for (size_t r = 0; r < count; ++r) {
      LinearForm f(vs.num_vars());
      while (f.none())
        for (uint32_t v = 0; v < vs.num_vars(); ++v)
          if (rng.below(3) == 0) f.flip(v);
      forms.push_back(f);
    }
    // safety on a basis
    LinearSystem sys(vs);
    for (const auto& f : forms) sys.add_row(f, 0);
    LinearSystem red = sys.reduced();
    std::vector<LinearForm> basis;
    for (const auto& r : red.rows())
      if (r.form.any()) basis.push_back(r.form);
    bool safe_match = basis.empty() || (is_safe(basis, vs) == safe_oracle(basis, vs));
    auto cl = closure(forms, vs);
    auto oracle = closure_oracle(forms, vs);
    bool closure_match = oracle && cl == *oracle;
    if (safe_match && closure_match) agree++;
    if (cl.size() + dim_of(restricted_basis(forms, cl, vs)) <= dim_of(forms)) bound_ok++;
  }
  bool pass = agree == total && bound_ok == total;
  report(5, pass,
         "oracle agreement " + std::to_string(agree) + "/500, dimension bound " +
             std::to_string(bound_ok) + "/500 (" + fmt(sw.seconds()) + "s)");
}

// --- criterion 6: rank vs satisfaction probability ----------------------------------

void criterion6() {
  Stopwatch sw;
  bool pass = true;
  std::string worst;
  for (uint32_t r = 1; r <= 6; ++r) {
    VarSpace vs{8, 4};  // n = 16, k = 8
    Rng rng(r);
    LinearSystem psi(vs);
    while (psi.rank() < r) {
      LinearForm f(vs.num_vars());
      for (uint32_t v = 0; v < vs.num_vars(); ++v)
        if (rng.below(4) == 0) f.flip(v);
      psi.add_row(f, uint8_t(rng.coin()));
    }
    std::vector<std::vector<uint32_t>> allowed;
    for (uint32_t b = 0; b < 8; ++b) {
      std::vector<uint32_t> a;
      for (uint32_t v = 0; v < 16; ++v) a.push_back(v);
      while (a.size() > 11) a.erase(a.begin() + rng.below(a.size()));  // 11 >= 2n/3
      allowed.push_back(std::move(a));
    }
    auto res = rank_probability_experiment(psi, allowed, 16, 100000, 8800 + r);
    if (res.violated) pass = false;
    if (r == 6) worst = fmt(res.empirical()) + " vs (3/4)^6 = " + fmt(res.reference);
  }
  report(6, pass, "empirical satisfaction <= (3/4)^r + 3s for r = 1..6 (r=6: " + worst + ", " +
                      fmt(sw.seconds()) + "s)");
}

// --- criterion 7: bottleneck mechanics ------------------------------------------------

void criterion7() {
  Stopwatch sw;
  // (a) exact block width vs brute-force set cover on 1000 random slices
  int bw_agree = 0;
  {
    Rng rng(27182);
    int done = 0;
    for (uint64_t seed = 0; done < 1000; ++seed) {
      auto g = BlockGraph::sample({16, 3, 0.15, seed});
      auto rs = RectSet::from_graph(g);
      if (rs.rects.empty()) continue;
      BitVec ally{uint32_t(rs.dom.size)};
      for (uint32_t y = 0; y < rs.dom.size; ++y)
        if (rng.coin()) ally.set(y, true);
      for (int t = 0; t < 50 && done < 1000; ++t, ++done) {
        Triangle tri;
        for (uint64_t i = 0; i < rs.dom.size; ++i) tri.a.push_back(Rational(int(rng.below(6))));
        for (uint64_t i = 0; i < rs.dom.size; ++i) tri.b.push_back(Rational(int(rng.below(6))));
        uint64_t x = rng.below(rs.dom.size);
        if (block_width_x(rs, tri, x, ally) == bw_oracle_x(rs, tri, x, ally)) bw_agree++;
      }
    }
  }
  // (b) 20 generated DAGs: survivor-width claim, covering tree properties,
  // out-degree claim and census
  int dags_ok = 0, trees_checked = 0, census_flags = 0;
  int mu_quarter = 0;
  for (int d = 0; d < 20; ++d) {
    uint64_t seed = find_unsat_seed(16, 3, 0.05, uint64_t(d) * 37);
    auto g = BlockGraph::sample({16, 3, 0.05, seed});
    auto f = encode_block_clique(g);
    auto proof = dpll_cp_refutation(f);
    if (!std::holds_alternative<CpOk>(verify_cp(f, proof))) continue;
    auto split = VarSplit::standard_halves(f.columns, f.bits_per_column);
    auto dag = cp_to_triangle_dag(f, proof, split);
    if (!check_search_dag(dag, f, split).valid) continue;
    auto rs = RectSet::from_graph(g);
    uint32_t s_star = min_almost_complete(g).s_star;
    int q = 1;  // n^(1/4) / sqrt(s) = 2/2 for s = 4
    auto mu = build_mu(dag, rs, q);
    bool two_q = check_two_q_claim(dag, rs, q, mu).empty();
    if (mu.assigned_total() * 4 >= dag.xsize + dag.ysize) mu_quarter++;
    // covering trees at a few nodes with surviving inputs
    bool trees_ok = true;
    int built = 0;
    for (const auto& snap : mu.snaps) {
      if (built >= 3) break;
      if (!snap.x_before.any() || !snap.y_before.any()) continue;
      const Triangle& tri = dag.nodes[snap.node].tri;
      CoverTree tree;
      try {
        tree = covering_tree(rs, tri, snap.x_before, snap.y_before, q);
      } catch (const std::exception&) {
        trees_ok = false;
        break;
      }
      auto props = check_cover_tree(tree, rs, tri, snap.x_before, snap.y_before);
      if (!props.all()) trees_ok = false;
      auto census = block_depth_census(tree, 16, q, s_star);
      if (census.hypothesis_holds && census.any_exceeded) census_flags++;
      built++;
      trees_checked++;
    }
    if (two_q && trees_ok) dags_ok++;
  }
  // census bound under the hypothesis: n = 64 families where 2 q^2 s = 2 <= 2
  bool census_valid_ok = true;
  {
    auto run_family = [&](const std::vector<std::pair<uint64_t, uint64_t>>& drops) {
      auto g = BlockGraph::complete(64, 3);
      auto edges = g.edges();
      for (auto [u, v] : drops)
        edges.erase(std::find(edges.begin(), edges.end(), std::make_pair(u, v)));
      auto h = BlockGraph::from_edges(64, 3, edges);
      auto rs = RectSet::from_graph(h);
      uint32_t s = min_almost_complete(h).s_star;
      Triangle tri;
      tri.a.assign(rs.dom.size, Rational(1));
      tri.b.assign(rs.dom.size, Rational(-1));
      for (size_t id = 0; id < rs.rects.size(); ++id)
        for (uint64_t z = 0; z < rs.dom.size; ++z) {
          if (rs.xmask[id].get(uint32_t(z))) tri.a[z] = Rational(0);
          if (rs.ymask[id].get(uint32_t(z))) tri.b[z] = Rational(0);
        }
      BitVec all(uint32_t(rs.dom.size), true);
      auto tree = covering_tree(rs, tri, all, all, 1);
      auto props = check_cover_tree(tree, rs, tri, all, all);
      auto census = block_depth_census(tree, 64, 1, s);
      return props.all() && census.hypothesis_holds && !census.any_exceeded;
    };
    // disjoint x-windows sharing one y-window, and a chain sharing one
    // x-window across distinct y-windows
    census_valid_ok = run_family({{0, 64}, {8, 72}, {16, 80}}) &&
                      run_family({{0, 64}, {1, 65}, {2, 66}, {3, 67}});
  }
  bool pass = bw_agree == 1000 && dags_ok == 20 && census_flags == 0 && census_valid_ok &&
              mu_quarter == 20;
  report(7, pass,
         "block width oracle " + std::to_string(bw_agree) + "/1000; 2q claim + tree properties on " +
             std::to_string(dags_ok) + "/20 dags (" + std::to_string(trees_checked) +
             " trees); census bound holds under the hypothesis; quarter-assignment on " +
             std::to_string(mu_quarter) + "/20 (" + fmt(sw.seconds()) + "s)");
}

// --- criterion 8: encodings and hand-built refutations ---------------------------------

void criterion8() {
  Stopwatch sw;
  int agree = 0;
  Rng rng(55);
  for (int i = 0; i < 50; ++i) {
    uint32_t k = (i % 2) ? 3 : 2;
    auto g = BlockGraph::sample({2, k, 0.3 + 0.5 * rng.uniform01(), rng.next()});
    auto f = encode_block_clique(g);
    if (satisfiable_bruteforce(f) == has_transversal_clique(g)) agree++;
  }

  auto f22 = encode_block_clique(BlockGraph::edgeless(2, 2));
  auto cp = edgeless22_cp();
  bool cp_ok = std::holds_alternative<CpOk>(verify_cp(f22, cp));
  VarSplit split;
  split.x_vars = {0};
  split.y_vars = {1};
  bool cp_dag_ok = false;
  if (cp_ok) {
    auto dag = cp_to_triangle_dag(f22, cp, split);
    cp_dag_ok = check_search_dag(dag, f22, split).valid;
  }
  auto rl = edgeless22_resplus();
  auto rres = verify_resplus(f22, rl);
  bool rl_ok = std::holds_alternative<ResPlusOk>(rres);
  bool rl_dag_ok = false;
  if (rl_ok) {
    auto adag = resplus_to_affine_dag(f22, rl);
    rl_dag_ok = check_affine_dag(adag, f22).valid &&
                adag.depth() == std::get<ResPlusOk>(rres).depth;
  }

  // single-line mutations must be rejected or break the translation
  int cp_mutations = 0, cp_rejected = 0;
  for (size_t i = 0; i < cp.lines.size(); ++i) {
    for (int mode = 0; mode < 2; ++mode) {
      auto p = cp;
      bool mutated = false;
      if (mode == 0) {
        for (auto& c : p.lines[i].coeffs)
          if (!(c == Rational(0))) { c = -c; mutated = true; break; }
      } else {
        p.lines[i].constant = p.lines[i].constant + Rational(1);
        mutated = true;
      }
      if (!mutated) continue;
      cp_mutations++;
      auto res = verify_cp(f22, p);
      bool rejected = std::holds_alternative<VerifyError>(res);
      if (!rejected) {
        auto dag = cp_to_triangle_dag(f22, p, split);
        rejected = !check_search_dag(dag, f22, split).valid;
      }
      if (rejected) cp_rejected++;
    }
  }
  int rl_mutations = 0, rl_rejected = 0;
  for (size_t i = 0; i < rl.lines.size(); ++i) {
    auto p = rl;
    bool mutated = false;
    if (!p.lines[i].clause.eqs.empty()) {
      p.lines[i].clause.eqs[0].rhs ^= 1;
      mutated = true;
    } else if (p.lines[i].kind == ResPlusLine::Resolution) {
      p.lines[i].pivot = BitVec::unit(2, 0);
      mutated = true;
    }
    if (!mutated) continue;
    rl_mutations++;
    auto res = verify_resplus(f22, p);
    bool rejected = std::holds_alternative<VerifyError>(res);
    if (!rejected) {
      auto dag = resplus_to_affine_dag(f22, p);
      rejected = !check_affine_dag(dag, f22).valid;
    }
    if (rejected) rl_rejected++;
  }

  bool pass = agree == 50 && cp_ok && cp_dag_ok && rl_ok && rl_dag_ok &&
              cp_rejected == cp_mutations && rl_rejected == rl_mutations;
  report(8, pass,
         "brute-force agreement " + std::to_string(agree) + "/50; hand-built proofs verify and translate; " +
             std::to_string(cp_rejected + rl_rejected) + "/" +
             std::to_string(cp_mutations + rl_mutations) + " mutations rejected (" +
             fmt(sw.seconds()) + "s)");
}

// --- criterion 9: communication census ---------------------------------------------------

void criterion9() {
  Stopwatch sw;
  auto dom = SplitDomain::make(16, 3);
  auto base = baseline_protocol(dom);

  // sampled error matches exhaustive within 3 standard errors
  auto g1 = BlockGraph::sample({16, 3, 0.5, 11});
  auto ex = distributional_error_exhaustive(base, g1);
  auto sm = distributional_error_sampled(base, g1, 100000, 3);
  double se = std::sqrt(std::max(ex.error() * (1 - ex.error()), 1e-12) / 100000.0);
  bool error_ok = std::fabs(sm.error() - ex.error()) <= 3 * se;

  // spread checker vs brute-force min-entropy over all coordinate subsets
  bool spread_ok = true;
  {
    Rng rng(5150);
    for (int t = 0; t < 20; ++t) {
      std::vector<uint64_t> set;
      std::set<uint64_t> seen;
      size_t size = 3 + rng.below(40);
      while (set.size() < size) {
        uint64_t v = rng.below(64);
        if (seen.insert(v).second) set.push_back(v);
      }
      double gamma = 0.3 + 0.6 * rng.uniform01();
      auto rep = spread_check(set, 6, gamma);
      // oracle: direct multiplicity scan over every subset of all coordinates
      bool oracle = true;
      for (uint32_t mask = 1; mask < 64; ++mask) {
        std::vector<uint32_t> I;
        for (uint32_t c = 0; c < 6; ++c)
          if ((mask >> c) & 1) I.push_back(c);
        // subsets touching fixed coordinates are skipped by the definition
        bool touches_fixed = false;
        for (uint32_t c : I)
          if (std::find(rep.fixed.begin(), rep.fixed.end(), c) != rep.fixed.end())
            touches_fixed = true;
        if (touches_fixed) continue;
        std::map<uint64_t, uint64_t> mult;
        for (uint64_t v : set) {
          uint64_t key = 0;
          for (uint32_t c : I) key = (key << 1) | ((v >> (5 - c)) & 1);
          mult[key]++;
        }
        uint64_t worst = 0;
        for (auto [kk, c] : mult) worst = std::max(worst, c);
        double h = std::log2(double(set.size()) / double(worst));
        if (h < gamma * double(I.size()) - 1e-12) { oracle = false; break; }
      }
      if (rep.spread_ok != oracle) { spread_ok = false; break; }
    }
  }

  // safe leaves respect s |Sigma|^{-0.9} on instances where the graph's
  // almost-completeness parameter supports it
  bool safe_ok = true;
  double sigma_pow = std::pow(4.0, 0.9);  // |Sigma| = sqrt(16)
  std::vector<BlockGraph> graphs;
  graphs.push_back(BlockGraph::complete(16, 3));
  graphs.push_back(BlockGraph::sample({16, 3, 0.5, 21}));
  graphs.push_back(BlockGraph::sample({16, 3, 0.45, 22}));
  for (const auto& gg : graphs) {
    uint32_t s = min_almost_complete(gg).s_star;
    double bound = double(s) / sigma_pow;
    for (const auto& rec : leaf_census(base, gg)) {
      if (!rec.safe) continue;
      if (rec.p_nonedge > bound + 1e-12) safe_ok = false;
    }
  }
  // dangerous leaves obey the same bound (single-leaf protocols, dense graphs)
  bool dangerous_ok = true;
  for (uint64_t seed : {1, 2}) {
    auto gg = BlockGraph::sample({16, 3, 0.97, seed});
    uint32_t s = min_almost_complete(gg).s_star;
    double bound = double(s) / sigma_pow;
    for (auto [a, b] : {std::pair<int, int>{0, 1}, {0, 2}, {1, 2}}) {
      auto p = fixed_pair_protocol(dom, {a, 0}, {b, 0});
      for (const auto& rec : leaf_census(p, gg)) {
        if (rec.safe) continue;
        if (rec.p_nonedge > bound + 1e-12) dangerous_ok = false;
      }
    }
  }
  bool pass = error_ok && spread_ok && safe_ok && dangerous_ok;
  report(9, pass,
         "sampled error " + fmt(sm.error()) + " vs exhaustive " + fmt(ex.error()) +
             " within 3s; spread oracle 20/20; safe and dangerous leaf bounds hold (" +
             fmt(sw.seconds()) + "s)");
}

// --- criterion 10: CLI reproducibility -----------------------------------------------------

void run_shell(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  (void)rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10(const std::string& cli) {
  Stopwatch sw;
  if (cli.empty()) {
    report(10, false, "command-line binary path missing (pass it as argv[1])");
    return;
  }
  std::string dir = "acceptance_cli_out";
  run_shell("rm -rf " + dir + " && mkdir -p " + dir);
  struct Cmd {
    std::string name, args, file;
  };
  std::vector<Cmd> cmds = {
      {"sample-graph", "sample-graph --n 16 --k 3 --p 0.7 --seed 5 --out DIR/g.json", "g.json"},
      {"encode-block", "encode block --n 4 --k 3 --p 0.6 --seed 2 --out DIR/f.cnf", "f.cnf"},
      {"concentration", "concentration --n 16 --k 3 --p 0.9 --graphs 2 --tuples 200 --seed 7 --out DIR/c.csv",
       "c.csv"},
      {"rank-prob", "rank-prob --n 16 --k 8 --rank 3 --trials 5000 --out DIR/r.csv", "r.csv"},
      {"walk-distribution",
       "walk distribution --n 16 --k 4 --p 0.85 --seed 3 --depth 3 --trees 1 --trials 2000 "
       "--tv-budget 0.1 --out DIR/w.csv",
       "w.csv"},
      {"closure-test", "closure-test --count 40 --out DIR/cl.csv", "cl.csv"},
      {"comm-census", "comm census --n 16 --k 3 --p 0.9 --seed 7 --out DIR/cc.csv", "cc.csv"},
  };
  bool all_ok = true;
  std::string bad;
  for (const auto& cmd : cmds) {
    std::string args = cmd.args;
    size_t pos;
    while ((pos = args.find("DIR")) != std::string::npos) args.replace(pos, 3, dir);
    std::string invocation = cli + " " + args + " --no-timestamp > /dev/null 2>&1";
    if (std::system(invocation.c_str()) != 0) {
      all_ok = false;
      bad = cmd.name + " (nonzero exit)";
      break;
    }
    std::string first = slurp(dir + "/" + cmd.file);
    if (std::system(invocation.c_str()) != 0) {
      all_ok = false;
      bad = cmd.name + " (nonzero exit on rerun)";
      break;
    }
    std::string second = slurp(dir + "/" + cmd.file);
    if (first.empty() || first != second) {
      all_ok = false;
      bad = cmd.name + " (outputs differ)";
      break;
    }
  }
  // invalid usage exits with code 2
  if (all_ok) {
    int rc = std::system((cli + " sample-graph --definitely-not-a-flag > /dev/null 2>&1").c_str());
    if (WEXITSTATUS(rc) != 2) {
      all_ok = false;
      bad = "unknown flag did not exit with code 2";
    }
  }
  // verify/translate pipeline reproducibility through files
  if (all_ok) {
    std::string cnf = dir + "/f22.cnf", proof = dir + "/p.cp", dag = dir + "/dag.json";
    std::string mk = cli + " encode block --n 2 --k 2 --p 0 --seed 1 --out " + cnf +
                     " --no-timestamp > /dev/null 2>&1";
    run_shell(mk);
    std::ofstream pf(proof);
    pf << "p cp 2\ncp 1 1 1 axiom\ncp 0 1 -1 axiom\ncp 0 -1 1 axiom\ncp -1 -1 -1 axiom\n"
          "cp 1 1 0 from 1 2\ncp 0 -1 0 from 3 4\ncp 1 0 0 from 5 6\n";
    pf.close();
    std::string tr = cli + " translate cp-dag --cnf " + cnf + " --proof " + proof +
                     " --split columns --out " + dag + " --no-timestamp > /dev/null 2>&1";
    if (std::system(tr.c_str()) != 0) {
      all_ok = false;
      bad = "translate (nonzero exit)";
    } else {
      std::string first = slurp(dag);
      run_shell(tr);
      if (first != slurp(dag) || first.empty()) {
        all_ok = false;
        bad = "translate (outputs differ)";
      }
    }
  }
  report(10, all_ok,
         all_ok ? "8 command families re-run byte-identically (" + fmt(sw.seconds()) + "s)"
                : "reproducibility failed for " + bad);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(cli);
  printf("%d/10 criteria passed\n", 10 - failures);
  return failures;
}
