// Batch front-end: reproducible experiments over block graphs, clique
// encodings, proof verification/translation, random-walk simulation and
// communication protocols. Every randomized command takes an explicit seed
// and re-runs byte-identically (pass --no-timestamp for byte-stable files).

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bclq/cnf.hpp"
#include "bclq/comm.hpp"
#include "bclq/density.hpp"
#include "bclq/f2.hpp"
#include "bclq/graph.hpp"
#include "bclq/pdt.hpp"
#include "bclq/proof.hpp"
#include "bclq/triangle.hpp"

using namespace bclq;

namespace {

struct Ctx {
  std::string command_line;
  bool timestamp = true;
  int threads = 1;
  int exit_code = 0;  // raised to 1 on experiment assertion failures

  void flag_violation(const std::string& what) {
    std::cerr << "violation: " << what << "\n";
    exit_code = 1;
  }
};

std::string out_path(const std::string& name) {
  if (name.empty() || name.find('/') != std::string::npos) return name;
  const char* dir = std::getenv("BCLQ_OUTDIR");
  if (!dir || !*dir) return name;
  std::string d(dir);
  if (d.back() != '/') d += '/';
  return d + name;
}

std::ofstream open_out(const std::string& name) {
  std::string path = out_path(name);
  std::ofstream f(path);
  if (!f) throw CLI::ValidationError("--out", "cannot open " + path);
  return f;
}

void header(std::ostream& os, const Ctx& ctx, const char* prefix) {
  os << prefix << " config: " << ctx.command_line << "\n";
  if (ctx.timestamp) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    os << prefix << " generated: " << buf << "\n";
  }
}

struct GraphOpts {
  std::string file;
  uint32_t n = 16, k = 3;
  double p = 0.9;
  uint64_t seed = 1;
};

void add_graph_opts(CLI::App* cmd, GraphOpts& g) {
  cmd->add_option("--graph", g.file, "graph file (BCLQ-1 JSON); overrides the sampler");
  cmd->add_option("--n", g.n, "vertices per block (power of two)");
  cmd->add_option("--k", g.k, "number of blocks");
  cmd->add_option("--p", g.p, "cross-block edge probability");
  cmd->add_option("--seed", g.seed, "graph seed");
}

BlockGraph get_graph(const GraphOpts& g, int threads) {
  if (!g.file.empty()) {
    std::ifstream in(g.file);
    if (!in) throw CLI::ValidationError("--graph", "cannot open " + g.file);
    auto graph = load_graph_json(in);
    graph.validate();
    return graph;
  }
  return BlockGraph::sample({g.n, g.k, g.p, g.seed}, threads);
}

std::vector<VertexId> parse_members(const std::string& text) {
  std::vector<VertexId> m;
  if (text.empty()) return m;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--members", "expected block:index pairs");
    m.push_back({std::stoi(part.substr(0, colon)), uint32_t(std::stoul(part.substr(colon + 1)))});
  }
  return m;
}

ParityDecisionTree get_pdt(const std::string& file, uint32_t depth, uint64_t seed,
                           const VarSpace& vs, const std::vector<int>& blocks) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw CLI::ValidationError("--pdt", "cannot open " + file);
    return load_pdt(in);
  }
  return random_pdt(vs, depth, seed, blocks);
}

CnfFormula load_cnf(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw CLI::ValidationError("--cnf", "cannot open " + file);
  return from_dimacs(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"experiments over binary-encoded clique formulas on block graphs"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "read options from an INI file");
  Ctx ctx;
  {
    std::ostringstream cl;
    for (int i = 1; i < argc; ++i) cl << (i > 1 ? " " : "") << argv[i];
    ctx.command_line = cl.str();
  }
  app.add_flag_callback(
      "--no-timestamp", [&ctx] { ctx.timestamp = false; },
      "omit the timestamp comment from outputs");
  app.add_option("--threads", ctx.threads, "worker thread bound")->capture_default_str();

  // ---- sample-graph -------------------------------------------------------
  auto* sg = app.add_subcommand("sample-graph", "sample a block graph and write it as JSON");
  GraphOpts sg_g;
  std::string sg_out = "graph.json";
  add_graph_opts(sg, sg_g);
  sg->add_option("--out", sg_out, "output file")->capture_default_str();
  sg->callback([&] {
    auto g = get_graph(sg_g, ctx.threads);
    auto f = open_out(sg_out);
    std::ostringstream body;
    save_graph_json(g, body);
    nlohmann::json j = nlohmann::json::parse(body.str());
    j["config"] = ctx.command_line;
    f << j.dump(1) << "\n";
    std::cout << "graph: " << g.n() << "x" << g.k() << ", " << g.edge_count() << " edges -> "
              << out_path(sg_out) << "\n";
  });

  // ---- encode ---------------------------------------------------------------
  auto* enc = app.add_subcommand("encode", "emit clique CNF encodings as DIMACS");
  enc->require_subcommand(1);
  GraphOpts enc_g;
  std::string enc_out = "formula.cnf", enc_tags;
  auto* encb = enc->add_subcommand("block", "block encoding of a sampled graph");
  add_graph_opts(encb, enc_g);
  encb->add_option("--out", enc_out, "output DIMACS file")->capture_default_str();
  encb->add_option("--tags-out", enc_tags, "optional clause-tag JSON sidecar");
  encb->callback([&] {
    auto g = get_graph(enc_g, ctx.threads);
    auto f = encode_block_clique(g);
    auto os = open_out(enc_out);
    header(os, ctx, "c");
    std::vector<std::string> meta;
    if (g.meta())
      meta.push_back("n " + std::to_string(g.n()) + " k " + std::to_string(g.k()) + " p " +
                     std::to_string(g.meta()->p) + " seed " + std::to_string(g.meta()->seed));
    to_dimacs(f, os, meta);
    if (!enc_tags.empty()) {
      auto ts = open_out(enc_tags);
      save_clause_tags_json(f, ts);
    }
    std::cout << "block encoding: " << f.num_vars << " vars, " << f.clauses.size()
              << " clauses -> " << out_path(enc_out) << "\n";
  });
  auto* encf = enc->add_subcommand("bin", "flat binary encoding of a sampled graph");
  add_graph_opts(encf, enc_g);
  encf->add_option("--out", enc_out, "output DIMACS file")->capture_default_str();
  encf->callback([&] {
    auto g = get_graph(enc_g, ctx.threads);
    auto flat = encode_bin_clique(SimpleGraph::from_block_graph(g), g.k());
    auto os = open_out(enc_out);
    header(os, ctx, "c");
    std::vector<std::string> meta;
    if (g.meta())
      meta.push_back("n " + std::to_string(g.n()) + " k " + std::to_string(g.k()) + " p " +
                     std::to_string(g.meta()->p) + " seed " + std::to_string(g.meta()->seed));
    to_dimacs(flat, os, meta);
    std::cout << "flat encoding: " << flat.num_vars << " vars, " << flat.clauses.size()
              << " clauses -> " << out_path(enc_out) << "\n";
  });

  // ---- check-density ---------------------------------------------------------
  auto* cd = app.add_subcommand("check-density", "graph density property checkers");
  cd->require_subcommand(1);
  GraphOpts cd_g;
  std::string cd_out;
  auto* cda = cd->add_subcommand("ac", "exact minimal almost-completeness parameter");
  add_graph_opts(cda, cd_g);
  cda->add_option("--out", cd_out, "optional CSV output");
  cda->callback([&] {
    auto g = get_graph(cd_g, ctx.threads);
    auto rep = min_almost_complete(g);
    std::cout << "s_star " << rep.s_star << " witness i=" << rep.witness.i
              << " j=" << rep.witness.j << " xi=" << rep.witness.xi << " yi=" << rep.witness.yi
              << " xj=" << rep.witness.xj << "\n";
    if (!cd_out.empty()) {
      auto os = open_out(cd_out);
      header(os, ctx, "#");
      os << "experiment_id,n,k,p,s_star,empirical_value,reference_bound,trials,seed\n";
      os << "almost-complete," << g.n() << "," << g.k() << "," << (g.meta() ? g.meta()->p : 0)
         << "," << rep.s_star << "," << rep.s_star << ",," << "1," << (g.meta() ? g.meta()->seed : 0)
         << "\n";
    }
  });
  auto* cdb = cd->add_subcommand("bcn", "bounded common neighborhood check");
  double cdb_alpha = 0.9, cdb_beta = 0.5;
  uint32_t cdb_r = 2;
  uint64_t cdb_trials = 1000, cdb_check_seed = 7;
  std::string cdb_mode = "auto";
  add_graph_opts(cdb, cd_g);
  cdb->add_option("--alpha", cdb_alpha)->capture_default_str();
  cdb->add_option("--beta", cdb_beta)->capture_default_str();
  cdb->add_option("--R", cdb_r)->capture_default_str();
  cdb->add_option("--mode", cdb_mode, "auto|exhaustive|sampled")->capture_default_str();
  cdb->add_option("--trials", cdb_trials)->capture_default_str();
  cdb->add_option("--check-seed", cdb_check_seed)->capture_default_str();
  cdb->add_option("--out", cd_out, "optional CSV output");
  cdb->callback([&] {
    auto g = get_graph(cd_g, ctx.threads);
    BoundedCnParams prm{cdb_alpha, cdb_beta, cdb_r};
    BoundedCnReport rep;
    if (cdb_mode == "exhaustive") rep = check_bounded_cn_exhaustive(g, prm);
    else if (cdb_mode == "sampled") rep = check_bounded_cn_sampled(g, prm, cdb_trials, cdb_check_seed);
    else rep = check_bounded_cn(g, prm, cdb_trials, cdb_check_seed);
    std::cout << (rep.pass ? "pass" : "fail") << " (" << (rep.exhaustive ? "exhaustive" : "sampled")
              << ", " << rep.checks << " checks, max deviation " << rep.max_deviation << ")\n";
    if (!cd_out.empty()) {
      auto os = open_out(cd_out);
      header(os, ctx, "#");
      os << "experiment_id,n,k,p,alpha,beta,R,empirical_value,reference_bound,trials,seed\n";
      os << "bounded-cn," << g.n() << "," << g.k() << "," << (g.meta() ? g.meta()->p : 0) << ","
         << cdb_alpha << "," << cdb_beta << "," << cdb_r << "," << rep.max_deviation << ","
         << cdb_beta << "," << rep.checks << "," << cdb_check_seed << "\n";
    }
    if (!rep.pass) ctx.flag_violation("bounded common neighborhood check failed");
  });

  // ---- concentration -----------------------------------------------------------
  auto* conc = app.add_subcommand("concentration", "almost-completeness tail experiment");
  uint32_t conc_n = 4096, conc_k = 8, conc_graphs = 20;
  double conc_p = 0.9;
  uint64_t conc_tuples = 5000, conc_seed = 1;
  std::string conc_out = "concentration.csv", conc_dump;
  conc->add_option("--n", conc_n)->capture_default_str();
  conc->add_option("--k", conc_k)->capture_default_str();
  conc->add_option("--p", conc_p)->capture_default_str();
  conc->add_option("--graphs", conc_graphs)->capture_default_str();
  conc->add_option("--tuples", conc_tuples, "tuples per graph")->capture_default_str();
  conc->add_option("--seed", conc_seed)->capture_default_str();
  conc->add_option("--out", conc_out)->capture_default_str();
  conc->add_option("--dump-samples", conc_dump, "write per-tuple bad counts");
  conc->callback([&] {
    auto res = concentration_experiment_ac(conc_n, conc_p, conc_k, conc_graphs, conc_tuples,
                                           conc_seed, ctx.threads);
    double se = std::sqrt(std::max(res.reference * (1 - res.reference), 1e-12) / double(res.tuples));
    auto os = open_out(conc_out);
    header(os, ctx, "#");
    os << "experiment_id,n,k,p,threshold,log_threshold,empirical_value,reference_bound,trials,seed\n";
    os << "concentration," << conc_n << "," << conc_k << "," << conc_p << "," << res.threshold
       << "," << res.log_threshold << "," << res.empirical() << "," << res.reference << ","
       << res.tuples << "," << conc_seed << "\n";
    if (!conc_dump.empty()) {
      auto ds = open_out(conc_dump);
      header(ds, ctx, "#");
      ds << "tuple,bad_count\n";
      for (size_t t = 0; t < res.samples.size(); ++t) ds << t << "," << res.samples[t] << "\n";
    }
    std::cout << "empirical " << res.empirical() << " reference " << res.reference << " (3se "
              << 3 * se << ")\n";
    if (res.empirical() > res.reference + 3 * se)
      ctx.flag_violation("tail frequency exceeds the reference bound");
  });

  // ---- walk ----------------------------------------------------------------------
  auto* walk = app.add_subcommand("walk", "random walk simulation over decision trees");
  walk->require_subcommand(1);
  GraphOpts walk_g;
  std::string walk_pdt, walk_members, walk_out;
  uint32_t walk_depth = 4, walk_trees = 1;
  uint64_t walk_seed = 1, walk_trials = 10000;

  auto* wsim = walk->add_subcommand("simulate", "one walk, transcript as JSON");
  add_graph_opts(wsim, walk_g);
  wsim->add_option("--pdt", walk_pdt, "decision tree file (random tree when absent)");
  wsim->add_option("--depth", walk_depth)->capture_default_str();
  wsim->add_option("--members", walk_members, "M as block:index,block:index,...");
  wsim->add_option("--walk-seed", walk_seed)->capture_default_str();
  wsim->add_option("--out", walk_out, "transcript JSON output");
  wsim->callback([&] {
    auto g = get_graph(walk_g, ctx.threads);
    NonEdgeInstance inst(g, parse_members(walk_members));
    auto t = get_pdt(walk_pdt, walk_depth, mix64(walk_seed, 0xdead), inst.var_space(),
                     inst.free_blocks());
    auto w = simulate_walk(inst, t, walk_seed);
    std::cout << (w.fail ? "FAIL" : "success") << " leaf " << w.leaf << " iterations "
              << w.iterations << " pinned " << w.candidates.size() << " blocks\n";
    if (!walk_out.empty()) {
      auto os = open_out(walk_out);
      save_transcript_json(w, os);
    }
  });

  auto* wdist = walk->add_subcommand("distribution", "walk vs direct node-visit distributions");
  double wdist_budget = 0.02;
  add_graph_opts(wdist, walk_g);
  wdist->add_option("--pdt", walk_pdt, "decision tree file (random trees when absent)");
  wdist->add_option("--depth", walk_depth)->capture_default_str();
  wdist->add_option("--trees", walk_trees)->capture_default_str();
  wdist->add_option("--members", walk_members);
  wdist->add_option("--trials", walk_trials)->capture_default_str();
  wdist->add_option("--walk-seed", walk_seed)->capture_default_str();
  wdist->add_option("--tv-budget", wdist_budget)->capture_default_str();
  wdist->add_option("--out", walk_out, "CSV output");
  wdist->callback([&] {
    auto g = get_graph(walk_g, ctx.threads);
    NonEdgeInstance inst(g, parse_members(walk_members));
    std::optional<std::ofstream> os;
    if (!walk_out.empty()) {
      os = open_out(walk_out);
      header(*os, ctx, "#");
      *os << "experiment_id,n,k,p,tree,empirical_value,reference_bound,trials,seed\n";
    }
    for (uint32_t tree = 0; tree < walk_trees; ++tree) {
      auto t = get_pdt(walk_pdt, walk_depth, mix64(walk_seed, tree), inst.var_space(),
                       inst.free_blocks());
      auto rep = walk_distribution_test(inst, t, walk_trials, mix64(walk_seed, 1000 + tree));
      std::cout << "tree " << tree << " leaf TV " << rep.leaf_tv << " max node diff "
                << rep.max_abs_diff << "\n";
      if (os)
        *os << "walk-distribution," << g.n() << "," << g.k() << ","
            << (g.meta() ? g.meta()->p : 0) << "," << tree << "," << rep.leaf_tv << ","
            << wdist_budget << "," << walk_trials << "," << walk_seed << "\n";
      if (rep.leaf_tv > wdist_budget)
        ctx.flag_violation("total variation exceeds the budget");
    }
  });

  auto* wsucc = walk->add_subcommand("success-rate", "non-FAIL frequency against the reference");
  double ws_alpha = 0.9, ws_beta = 0.1;
  uint32_t ws_r = 32;
  add_graph_opts(wsucc, walk_g);
  wsucc->add_option("--pdt", walk_pdt);
  wsucc->add_option("--depth", walk_depth)->capture_default_str();
  wsucc->add_option("--trees", walk_trees)->capture_default_str();
  wsucc->add_option("--members", walk_members);
  wsucc->add_option("--trials", walk_trials)->capture_default_str();
  wsucc->add_option("--walk-seed", walk_seed)->capture_default_str();
  wsucc->add_option("--alpha", ws_alpha)->capture_default_str();
  wsucc->add_option("--beta", ws_beta)->capture_default_str();
  wsucc->add_option("--R", ws_r)->capture_default_str();
  wsucc->add_option("--out", walk_out, "CSV output");
  wsucc->callback([&] {
    auto g = get_graph(walk_g, ctx.threads);
    NonEdgeInstance inst(g, parse_members(walk_members));
    std::optional<std::ofstream> os;
    if (!walk_out.empty()) {
      os = open_out(walk_out);
      header(*os, ctx, "#");
      *os << "experiment_id,n,k,p,tree,alpha,beta,R,empirical_value,reference_bound,trials,seed\n";
    }
    for (uint32_t tree = 0; tree < walk_trees; ++tree) {
      auto t = get_pdt(walk_pdt, walk_depth, mix64(walk_seed, tree), inst.var_space(),
                       inst.free_blocks());
      auto rep = success_rate(inst, t, walk_trials, mix64(walk_seed, 5000 + tree), ws_alpha,
                              ws_beta, ws_r);
      std::cout << "tree " << tree << " success " << rep.empirical() << " reference "
                << rep.reference << " overrun " << rep.overrun_freq() << " bound "
                << rep.overrun_bound << "\n";
      if (os)
        *os << "walk-success," << g.n() << "," << g.k() << "," << (g.meta() ? g.meta()->p : 0)
            << "," << tree << "," << ws_alpha << "," << ws_beta << "," << ws_r << ","
            << rep.empirical() << "," << rep.reference << "," << walk_trials << "," << walk_seed
            << "\n";
      if (rep.violated) ctx.flag_violation("success rate fell below the reference");
      if (rep.overrun_violated) ctx.flag_violation("loop overruns above the reference");
    }
  });

  // ---- extract -----------------------------------------------------------------------
  auto* ext = app.add_subcommand("extract", "affine restriction from a successful walk");
  GraphOpts ext_g;
  std::string ext_pdt, ext_members, ext_psi, ext_out;
  uint32_t ext_depth = 2, ext_r = 16;
  uint64_t ext_seed = 1, ext_retries = 100;
  add_graph_opts(ext, ext_g);
  ext->add_option("--pdt", ext_pdt);
  ext->add_option("--depth", ext_depth)->capture_default_str();
  ext->add_option("--members", ext_members);
  ext->add_option("--psi", ext_psi, "linear system file (defaults to the walk's own equations)");
  ext->add_option("--R", ext_r)->capture_default_str();
  ext->add_option("--walk-seed", ext_seed)->capture_default_str();
  ext->add_option("--retries", ext_retries)->capture_default_str();
  ext->add_option("--out", ext_out, "extraction JSON output");
  ext->callback([&] {
    auto g = get_graph(ext_g, ctx.threads);
    NonEdgeInstance inst(g, parse_members(ext_members));
    auto t = get_pdt(ext_pdt, ext_depth, mix64(ext_seed, 0xfeed), inst.var_space(),
                     inst.free_blocks());
    std::optional<WalkTranscript> w;
    for (uint64_t r = 0; r < ext_retries && !w; ++r) {
      auto cand = simulate_walk(inst, t, mix64(ext_seed, r));
      if (!cand.fail) w = std::move(cand);
    }
    if (!w) throw CLI::ValidationError("--retries", "no successful walk found");
    LinearSystem psi(inst.var_space());
    if (!ext_psi.empty()) {
      std::ifstream in(ext_psi);
      if (!in) throw CLI::ValidationError("--psi", "cannot open " + ext_psi);
      psi = load_linear_system(in, inst.var_space());
    } else {
      psi = w->equations;
    }
    auto res = extract_restriction(inst, *w, psi, ext_r);
    if (!res.ok()) {
      std::cout << "infeasible: " << res.infeasible_reason << "\n";
      ctx.flag_violation("extraction infeasible");
      return;
    }
    check_extraction(inst, *res.extraction, psi);
    std::cout << "fixed " << res.extraction->fixed_blocks.size() << " blocks (rank "
              << res.extraction->rank << "), |M'| = " << res.extraction->m_prime.size() << "\n";
    if (!ext_out.empty()) {
      auto os = open_out(ext_out);
      nlohmann::json j;
      j["config"] = ctx.command_line;
      j["fixed_blocks"] = res.extraction->fixed_blocks;
      j["free_blocks"] = res.extraction->free_blocks;
      nlohmann::json mp = nlohmann::json::array();
      for (const auto& v : res.extraction->m_prime) mp.push_back({v.block, v.index});
      j["m_prime"] = std::move(mp);
      nlohmann::json pins = nlohmann::json::array();
      const auto& vs = inst.var_space();
      for (uint32_t v = 0; v < vs.num_vars(); ++v) {
        const auto& e = res.extraction->rho.expr(v);
        if (!e) continue;
        pins.push_back({{"var", v}, {"coeffs", e->coeffs.to_string01()}, {"const", e->cst}});
      }
      j["rho"] = std::move(pins);
      os << j.dump(1) << "\n";
    }
  });

  // ---- closure-test ---------------------------------------------------------------------
  auto* clo = app.add_subcommand("closure-test", "safety and closure over random systems");
  uint32_t clo_k = 6, clo_bits = 3, clo_count = 500, clo_rows = 4;
  uint64_t clo_seed = 1;
  std::string clo_out;
  clo->add_option("--k", clo_k)->capture_default_str();
  clo->add_option("--bits", clo_bits)->capture_default_str();
  clo->add_option("--count", clo_count)->capture_default_str();
  clo->add_option("--rows", clo_rows)->capture_default_str();
  clo->add_option("--gen-seed", clo_seed)->capture_default_str();
  clo->add_option("--out", clo_out, "CSV output");
  clo->callback([&] {
    VarSpace vs{clo_k, clo_bits};
    std::optional<std::ofstream> os;
    if (!clo_out.empty()) {
      os = open_out(clo_out);
      header(*os, ctx, "#");
      *os << "experiment_id,k,bits,system,safe,closure_size,dim,empirical_value,reference_bound,trials,seed\n";
    }
    for (uint32_t i = 0; i < clo_count; ++i) {
      Rng rng(clo_seed, i);
      std::vector<LinearForm> forms;
      for (uint32_t r = 0; r < clo_rows; ++r) {
        LinearForm f(vs.num_vars());
        while (f.none())
          for (uint32_t v = 0; v < vs.num_vars(); ++v)
            if (rng.below(3) == 0) f.flip(v);
        forms.push_back(f);
      }
      auto cl = closure(forms, vs);
      auto basis = restricted_basis(forms, cl, vs);
      bool safe_after = basis.empty() || is_safe(basis, vs);
      uint32_t dim = dim_of(forms);
      bool bound_ok = cl.size() + dim_of(basis) <= dim;
      if (!safe_after) ctx.flag_violation("closure did not make the system safe");
      if (!bound_ok) ctx.flag_violation("dimension bound violated");
      if (os)
        *os << "closure," << clo_k << "," << clo_bits << "," << i << ","
            << (cl.empty() ? 1 : 0) << "," << cl.size() << "," << dim << "," << (bound_ok ? 0 : 1)
            << ",0,1," << clo_seed << "\n";
    }
    std::cout << clo_count << " systems checked\n";
  });

  // ---- rank-prob -------------------------------------------------------------------------
  auto* rp = app.add_subcommand("rank-prob", "satisfaction probability against (3/4)^rank");
  uint32_t rp_n = 16, rp_k = 8, rp_rank = 4, rp_asize = 0;
  uint64_t rp_trials = 100000, rp_seed = 1, rp_sample_seed = 2;
  std::string rp_system, rp_out;
  rp->add_option("--n", rp_n)->capture_default_str();
  rp->add_option("--k", rp_k)->capture_default_str();
  rp->add_option("--rank", rp_rank, "rank of the random system")->capture_default_str();
  rp->add_option("--system", rp_system, "system file overriding the random generator");
  rp->add_option("--asize", rp_asize, "allowed-set size per block (0 = full block)");
  rp->add_option("--trials", rp_trials)->capture_default_str();
  rp->add_option("--gen-seed", rp_seed)->capture_default_str();
  rp->add_option("--sample-seed", rp_sample_seed)->capture_default_str();
  rp->add_option("--out", rp_out, "CSV output");
  rp->callback([&] {
    VarSpace vs{rp_k, ilog2(rp_n)};
    LinearSystem psi(vs);
    if (!rp_system.empty()) {
      std::ifstream in(rp_system);
      if (!in) throw CLI::ValidationError("--system", "cannot open " + rp_system);
      psi = load_linear_system(in, vs);
    } else {
      Rng rng(rp_seed);
      while (psi.rank() < rp_rank) {
        LinearForm f(vs.num_vars());
        for (uint32_t v = 0; v < vs.num_vars(); ++v)
          if (rng.below(4) == 0) f.flip(v);
        psi.add_row(f, uint8_t(rng.coin()));
      }
    }
    uint32_t asize = rp_asize == 0 ? rp_n : rp_asize;
    Rng arng(rp_seed ^ 0x5a5a);
    std::vector<std::vector<uint32_t>> allowed;
    for (uint32_t b = 0; b < rp_k; ++b) {
      std::vector<uint32_t> a;
      for (uint32_t v = 0; v < rp_n; ++v) a.push_back(v);
      while (a.size() > asize) a.erase(a.begin() + arng.below(a.size()));
      allowed.push_back(std::move(a));
    }
    auto res = rank_probability_experiment(psi, allowed, rp_n, rp_trials, rp_sample_seed);
    std::cout << "rank " << res.rank << " empirical " << res.empirical() << " reference "
              << res.reference << "\n";
    if (!rp_out.empty()) {
      auto os = open_out(rp_out);
      header(os, ctx, "#");
      os << "experiment_id,n,k,rank,asize,empirical_value,reference_bound,trials,seed\n";
      os << "rank-prob," << rp_n << "," << rp_k << "," << res.rank << "," << asize << ","
         << res.empirical() << "," << res.reference << "," << rp_trials << "," << rp_sample_seed
         << "\n";
    }
    if (res.violated) ctx.flag_violation("satisfaction probability above (3/4)^rank");
  });

  // ---- verify -------------------------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "check refutations");
  ver->require_subcommand(1);
  std::string ver_cnf, ver_proof;
  uint32_t ver_budget = 24;
  auto* vcp = ver->add_subcommand("cp", "semantic cutting planes refutation");
  vcp->add_option("--cnf", ver_cnf)->required();
  vcp->add_option("--proof", ver_proof)->required();
  vcp->add_option("--budget", ver_budget)->capture_default_str();
  vcp->callback([&] {
    auto f = load_cnf(ver_cnf);
    std::ifstream in(ver_proof);
    if (!in) throw CLI::ValidationError("--proof", "cannot open " + ver_proof);
    auto proof = parse_cp_proof(in);
    auto res = verify_cp(f, proof, ver_budget);
    if (std::holds_alternative<CpOk>(res)) {
      std::cout << "Ok length " << std::get<CpOk>(res).length << "\n";
    } else {
      auto err = std::get<VerifyError>(res);
      std::cout << "Err step " << err.step + 1 << ": " << err.reason << "\n";
      ctx.flag_violation("proof rejected");
    }
  });
  auto* vrl = ver->add_subcommand("rlin", "resolution-over-parities refutation");
  vrl->add_option("--cnf", ver_cnf)->required();
  vrl->add_option("--proof", ver_proof)->required();
  vrl->add_option("--budget", ver_budget)->capture_default_str();
  vrl->callback([&] {
    auto f = load_cnf(ver_cnf);
    std::ifstream in(ver_proof);
    if (!in) throw CLI::ValidationError("--proof", "cannot open " + ver_proof);
    auto proof = parse_resplus_proof(in);
    auto res = verify_resplus(f, proof, ver_budget);
    if (std::holds_alternative<ResPlusOk>(res)) {
      auto ok = std::get<ResPlusOk>(res);
      std::cout << "Ok length " << ok.length << " depth " << ok.depth << "\n";
    } else {
      auto err = std::get<VerifyError>(res);
      std::cout << "Err step " << err.step + 1 << ": " << err.reason << "\n";
      ctx.flag_violation("proof rejected");
    }
  });

  // ---- translate -----------------------------------------------------------------------------
  auto* tr = app.add_subcommand("translate", "verified refutations into shape DAGs");
  tr->require_subcommand(1);
  std::string tr_cnf, tr_proof, tr_out = "dag.json";
  auto* trc = tr->add_subcommand("cp-dag", "cutting planes to a triangle DAG");
  std::string tr_split = "halves";
  trc->add_option("--cnf", tr_cnf)->required();
  trc->add_option("--proof", tr_proof)->required();
  trc->add_option("--split", tr_split, "halves | columns (first half of the columns to X)")
      ->capture_default_str();
  trc->add_option("--out", tr_out)->capture_default_str();
  trc->callback([&] {
    auto f = load_cnf(tr_cnf);
    std::ifstream in(tr_proof);
    if (!in) throw CLI::ValidationError("--proof", "cannot open " + tr_proof);
    auto proof = parse_cp_proof(in);
    auto res = verify_cp(f, proof);
    if (!std::holds_alternative<CpOk>(res)) {
      auto err = std::get<VerifyError>(res);
      std::cout << "Err step " << err.step + 1 << ": " << err.reason << "\n";
      ctx.flag_violation("proof rejected");
      return;
    }
    VarSplit split;
    if (tr_split == "halves") {
      split = VarSplit::standard_halves(f.columns, f.bits_per_column);
    } else if (tr_split == "columns") {
      for (uint32_t v = 0; v < f.num_vars; ++v)
        (v < f.num_vars / 2 ? split.x_vars : split.y_vars).push_back(v);
    } else {
      throw CLI::ValidationError("--split", "unknown split " + tr_split);
    }
    auto dag = cp_to_triangle_dag(f, proof, split);
    auto check = check_search_dag(dag, f, split);
    if (!check.valid) {
      ctx.flag_violation("translated DAG failed validity: " + check.reason);
      return;
    }
    auto os = open_out(tr_out);
    save_triangle_dag_json(dag, os);
    std::cout << "triangle DAG with " << dag.nodes.size() << " nodes -> " << out_path(tr_out)
              << "\n";
  });
  auto* trr = tr->add_subcommand("rlin-dag", "resolution over parities to an affine DAG");
  trr->add_option("--cnf", tr_cnf)->required();
  trr->add_option("--proof", tr_proof)->required();
  trr->add_option("--out", tr_out)->capture_default_str();
  trr->callback([&] {
    auto f = load_cnf(tr_cnf);
    std::ifstream in(tr_proof);
    if (!in) throw CLI::ValidationError("--proof", "cannot open " + tr_proof);
    auto proof = parse_resplus_proof(in);
    auto res = verify_resplus(f, proof);
    if (!std::holds_alternative<ResPlusOk>(res)) {
      auto err = std::get<VerifyError>(res);
      std::cout << "Err step " << err.step + 1 << ": " << err.reason << "\n";
      ctx.flag_violation("proof rejected");
      return;
    }
    auto dag = resplus_to_affine_dag(f, proof);
    auto check = check_affine_dag(dag, f);
    if (!check.valid) {
      ctx.flag_violation("translated DAG failed validity: " + check.reason);
      return;
    }
    auto os = open_out(tr_out);
    nlohmann::json j;
    j["config"] = ctx.command_line;
    j["k"] = proof.vs.k;
    j["bits"] = proof.vs.bits;
    j["depth"] = dag.depth();
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& nd : dag.nodes) {
      nlohmann::json nj;
      nj["branch"] = nd.branch;
      if (nd.branch) nj["query"] = nd.query.to_string01();
      nj["child0"] = nd.child0;
      nj["child1"] = nd.child1;
      nj["output"] = nd.output;
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : nd.space.rows()) rows.push_back(r.form.to_string01() + " " + std::to_string(r.rhs));
      nj["space"] = std::move(rows);
      nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);
    os << j.dump(1) << "\n";
    std::cout << "affine DAG with " << dag.nodes.size() << " nodes, depth " << dag.depth()
              << " -> " << out_path(tr_out) << "\n";
  });

  // ---- bottleneck ------------------------------------------------------------------------------
  auto* bn = app.add_subcommand("bottleneck", "progress map, covering trees and census");
  bn->require_subcommand(1);
  GraphOpts bn_g;
  std::string bn_dag, bn_out;
  int bn_q = 1;
  auto* bmu = bn->add_subcommand("mu", "run the progress map over a triangle DAG");
  add_graph_opts(bmu, bn_g);
  bmu->add_option("--dag", bn_dag, "triangle DAG JSON")->required();
  bmu->add_option("--q", bn_q)->capture_default_str();
  bmu->add_option("--out", bn_out, "assignment summary JSON");
  bool bmu_check = false;
  bmu->add_flag("--check-2q", bmu_check, "verify the survivor-width claim");
  bmu->callback([&] {
    auto g = get_graph(bn_g, ctx.threads);
    auto rs = RectSet::from_graph(g);
    std::ifstream in(bn_dag);
    if (!in) throw CLI::ValidationError("--dag", "cannot open " + bn_dag);
    auto dag = load_triangle_dag_json(in);
    auto mu = build_mu(dag, rs, bn_q);
    std::cout << "assigned " << mu.assigned_total() << " of " << (dag.xsize + dag.ysize)
              << " inputs\n";
    if (bmu_check) {
      auto bad = check_two_q_claim(dag, rs, bn_q, mu);
      if (!bad.empty())
        ctx.flag_violation("survivor width exceeded 2q at " + std::to_string(bad.size()) +
                           " places");
      else
        std::cout << "survivor-width claim holds\n";
    }
    if (!bn_out.empty()) {
      auto os = open_out(bn_out);
      nlohmann::json j;
      j["config"] = ctx.command_line;
      j["assigned"] = mu.assigned_total();
      j["mu_x"] = mu.mu_x;
      j["mu_y"] = mu.mu_y;
      os << j.dump(1) << "\n";
    }
  });
  auto* bcov = bn->add_subcommand("cover", "covering tree of a DAG node's survivors");
  int bcov_node = -1;
  add_graph_opts(bcov, bn_g);
  bcov->add_option("--dag", bn_dag)->required();
  bcov->add_option("--node", bcov_node, "node id (default: root)");
  bcov->add_option("--q", bn_q)->capture_default_str();
  bcov->add_option("--out", bn_out, "tree summary JSON");
  bcov->callback([&] {
    auto g = get_graph(bn_g, ctx.threads);
    auto rs = RectSet::from_graph(g);
    std::ifstream in(bn_dag);
    if (!in) throw CLI::ValidationError("--dag", "cannot open " + bn_dag);
    auto dag = load_triangle_dag_json(in);
    auto mu = build_mu(dag, rs, bn_q);
    int target = bcov_node < 0 ? dag.root : bcov_node;
    const MuSnapshot* snap = nullptr;
    for (const auto& s : mu.snaps)
      if (s.node == target) snap = &s;
    if (!snap) throw CLI::ValidationError("--node", "node not found");
    auto tree = covering_tree(rs, dag.nodes[target].tri, snap->x_before, snap->y_before, bn_q);
    auto props = check_cover_tree(tree, rs, dag.nodes[target].tri, snap->x_before, snap->y_before);
    std::cout << "tree with " << tree.nodes.size() << " nodes; properties "
              << (props.all() ? "hold" : ("FAIL: " + props.detail)) << "\n";
    if (!props.all()) ctx.flag_violation("covering tree property failed");
    if (!bn_out.empty()) {
      auto os = open_out(bn_out);
      nlohmann::json j;
      j["config"] = ctx.command_line;
      j["nodes"] = tree.nodes.size();
      nlohmann::json edges = nlohmann::json::array();
      for (size_t v = 1; v < tree.nodes.size(); ++v)
        edges.push_back({{"parent", tree.nodes[v].parent},
                         {"rect", tree.nodes[v].edge_rect},
                         {"block_depth", tree.nodes[v].block_depth}});
      j["edges"] = std::move(edges);
      os << j.dump(1) << "\n";
    }
  });
  auto* bcen = bn->add_subcommand("census", "block-depth census of a covering tree");
  uint32_t bcen_s = 0;
  add_graph_opts(bcen, bn_g);
  bcen->add_option("--dag", bn_dag)->required();
  bcen->add_option("--node", bcov_node, "node id (default: root)");
  bcen->add_option("--q", bn_q)->capture_default_str();
  bcen->add_option("--s", bcen_s, "almost-completeness parameter (default: measured)");
  bcen->add_option("--out", bn_out, "census CSV");
  bcen->callback([&] {
    auto g = get_graph(bn_g, ctx.threads);
    auto rs = RectSet::from_graph(g);
    std::ifstream in(bn_dag);
    if (!in) throw CLI::ValidationError("--dag", "cannot open " + bn_dag);
    auto dag = load_triangle_dag_json(in);
    auto mu = build_mu(dag, rs, bn_q);
    int target = bcov_node < 0 ? dag.root : bcov_node;
    const MuSnapshot* snap = nullptr;
    for (const auto& s : mu.snaps)
      if (s.node == target) snap = &s;
    if (!snap) throw CLI::ValidationError("--node", "node not found");
    auto tree = covering_tree(rs, dag.nodes[target].tri, snap->x_before, snap->y_before, bn_q);
    uint32_t s = bcen_s ? bcen_s : min_almost_complete(g).s_star;
    auto census = block_depth_census(tree, g.n(), bn_q, s);
    std::optional<std::ofstream> os;
    if (!bn_out.empty()) {
      os = open_out(bn_out);
      header(*os, ctx, "#");
      *os << "experiment_id,n,k,q,s,depth,empirical_value,reference_bound,hypothesis,seed\n";
    }
    for (const auto& row : census.rows) {
      std::cout << "depth " << row.depth << ": " << row.count << " nodes (bound " << row.bound
                << ")\n";
      if (os)
        *os << "census," << g.n() << "," << g.k() << "," << bn_q << "," << s << "," << row.depth
            << "," << row.count << "," << row.bound << "," << (census.hypothesis_holds ? 1 : 0)
            << "," << (g.meta() ? g.meta()->seed : 0) << "\n";
    }
    if (census.hypothesis_holds && census.any_exceeded)
      ctx.flag_violation("census exceeded the bound under the hypothesis");
  });

  // ---- comm ---------------------------------------------------------------------------------
  auto* comm = app.add_subcommand("comm", "communication protocol analysis");
  comm->require_subcommand(1);
  GraphOpts comm_g;
  std::string comm_protocol, comm_out;
  double comm_gamma = 0.9;
  auto* cchk = comm->add_subcommand("check", "subcube-likeness of every node");
  cchk->add_option("--protocol", comm_protocol, "protocol JSON (default: baseline over --n/--k)");
  add_graph_opts(cchk, comm_g);
  cchk->add_option("--gamma", comm_gamma)->capture_default_str();
  cchk->callback([&] {
    Protocol p;
    if (!comm_protocol.empty()) {
      std::ifstream in(comm_protocol);
      if (!in) throw CLI::ValidationError("--protocol", "cannot open " + comm_protocol);
      p = load_protocol_json(in);
    } else {
      p = baseline_protocol(SplitDomain::make(comm_g.n, comm_g.k));
    }
    int bad = -1;
    bool ok = protocol_subcube_like(p, comm_gamma, &bad);
    std::cout << (ok ? "subcube-like" : ("violation at node " + std::to_string(bad))) << "\n";
    if (!ok) ctx.flag_violation("protocol is not subcube-like");
  });
  auto* cerr2 = comm->add_subcommand("error", "distributional error of a protocol");
  bool cerr_exhaustive = false;
  uint64_t cerr_trials = 100000, cerr_seed = 1;
  add_graph_opts(cerr2, comm_g);
  cerr2->add_option("--protocol", comm_protocol);
  cerr2->add_flag("--exhaustive", cerr_exhaustive);
  cerr2->add_option("--trials", cerr_trials)->capture_default_str();
  cerr2->add_option("--error-seed", cerr_seed)->capture_default_str();
  cerr2->add_option("--out", comm_out, "CSV output");
  cerr2->callback([&] {
    auto g = get_graph(comm_g, ctx.threads);
    Protocol p;
    if (!comm_protocol.empty()) {
      std::ifstream in(comm_protocol);
      if (!in) throw CLI::ValidationError("--protocol", "cannot open " + comm_protocol);
      p = load_protocol_json(in);
    } else {
      p = baseline_protocol(SplitDomain::make(g.n(), g.k()));
    }
    ErrorReport rep = cerr_exhaustive ? distributional_error_exhaustive(p, g)
                                      : distributional_error_sampled(p, g, cerr_trials, cerr_seed);
    std::cout << "error " << rep.error() << " over " << rep.trials << " inputs\n";
    if (!comm_out.empty()) {
      auto os = open_out(comm_out);
      header(os, ctx, "#");
      os << "experiment_id,n,k,p,mode,empirical_value,reference_bound,trials,seed\n";
      os << "comm-error," << g.n() << "," << g.k() << "," << (g.meta() ? g.meta()->p : 0) << ","
         << (rep.exhaustive ? "exhaustive" : "sampled") << "," << rep.error() << ",,"
         << rep.trials << "," << cerr_seed << "\n";
    }
  });
  auto* ccen = comm->add_subcommand("census", "per-leaf fixed blocks and non-edge probability");
  add_graph_opts(ccen, comm_g);
  ccen->add_option("--protocol", comm_protocol);
  ccen->add_option("--out", comm_out, "CSV output");
  ccen->callback([&] {
    auto g = get_graph(comm_g, ctx.threads);
    Protocol p;
    if (!comm_protocol.empty()) {
      std::ifstream in(comm_protocol);
      if (!in) throw CLI::ValidationError("--protocol", "cannot open " + comm_protocol);
      p = load_protocol_json(in);
    } else {
      p = baseline_protocol(SplitDomain::make(g.n(), g.k()));
    }
    auto census = leaf_census(p, g);
    size_t safe = 0;
    for (const auto& rec : census) safe += rec.safe;
    std::cout << census.size() << " leaves, " << safe << " safe\n";
    if (!comm_out.empty()) {
      auto os = open_out(comm_out);
      header(os, ctx, "#");
      os << "experiment_id,n,k,p,leaf,safe,fixed_blocks,empirical_value,reference_bound,trials,seed\n";
      for (const auto& rec : census)
        os << "comm-census," << g.n() << "," << g.k() << "," << (g.meta() ? g.meta()->p : 0)
           << "," << rec.node << "," << (rec.safe ? 1 : 0) << "," << rec.fixed_blocks.size()
           << "," << rec.p_nonedge << ",," << rec.rect_size << ","
           << (g.meta() ? g.meta()->seed : 0) << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return ctx.exit_code;
}
