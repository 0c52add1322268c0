#include "bclq/comm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "bclq/util.hpp"

namespace bclq {

void Protocol::compute_rectangles() {
  if (root < 0) throw std::invalid_argument("protocol: missing root");
  std::function<void(int, BitVec, BitVec)> go = [&](int v, BitVec xs, BitVec ys) {
    ProtocolNode& nd = nodes[v];
    nd.xset = xs;
    nd.yset = ys;
    if (nd.leaf) return;
    const BitVec& side = nd.speaker == 0 ? xs : ys;
    size_t expected = nd.speaker == 0 ? dom.size : dom.size;
    if (nd.table.size() != expected)
      throw std::invalid_argument("protocol: table size mismatch");
    BitVec side0{uint32_t(dom.size)}, side1{uint32_t(dom.size)};
    side.for_each_set([&](uint32_t z) {
      if (nd.table[z]) side1.set(z, true);
      else side0.set(z, true);
    });
    if (nd.speaker == 0) {
      go(nd.child0, side0, ys);
      go(nd.child1, side1, ys);
    } else {
      go(nd.child0, xs, side0);
      go(nd.child1, xs, side1);
    }
  };
  go(root, BitVec(uint32_t(dom.size), true), BitVec(uint32_t(dom.size), true));
}

void Protocol::validate() const {
  for (size_t v = 0; v < nodes.size(); ++v) {
    const auto& nd = nodes[v];
    if (nd.leaf) continue;
    if (nd.child0 < 0 || nd.child1 < 0) throw std::invalid_argument("protocol: missing child");
    const auto& c0 = nodes[nd.child0];
    const auto& c1 = nodes[nd.child1];
    // children partition the parent rectangle along the speaker's side
    if (nd.speaker == 0) {
      if (!(c0.yset == nd.yset) || !(c1.yset == nd.yset))
        throw std::runtime_error("protocol: y side changed on Alice's turn");
      BitVec both = c0.xset | c1.xset;
      if (!(both == nd.xset) || (c0.xset & c1.xset).any())
        throw std::runtime_error("protocol: x sides do not partition");
    } else {
      if (!(c0.xset == nd.xset) || !(c1.xset == nd.xset))
        throw std::runtime_error("protocol: x side changed on Bob's turn");
      BitVec both = c0.yset | c1.yset;
      if (!(both == nd.yset) || (c0.yset & c1.yset).any())
        throw std::runtime_error("protocol: y sides do not partition");
    }
  }
}

uint32_t Protocol::cost() const {
  std::function<uint32_t(int)> go = [&](int v) -> uint32_t {
    const auto& nd = nodes[v];
    if (nd.leaf) return 0;
    return 1 + std::max(go(nd.child0), go(nd.child1));
  };
  return root >= 0 ? go(root) : 0;
}

int run_protocol(const Protocol& p, uint64_t x, uint64_t y, std::vector<int>* visited) {
  int v = p.root;
  if (visited) visited->push_back(v);
  while (!p.nodes[v].leaf) {
    const auto& nd = p.nodes[v];
    uint8_t bit = nd.table[nd.speaker == 0 ? x : y];
    v = bit ? nd.child1 : nd.child0;
    if (visited) visited->push_back(v);
  }
  return v;
}

// --- min-entropy ------------------------------------------------------------------

double min_entropy(const std::vector<uint64_t>& values, uint32_t m, const std::vector<uint32_t>& I) {
  if (values.empty()) throw std::invalid_argument("min_entropy: empty set");
  std::map<uint64_t, uint64_t> mult;
  for (uint64_t v : values) {
    uint64_t key = 0;
    for (size_t t = 0; t < I.size(); ++t) {
      uint32_t bitpos = I[t];
      uint64_t bit = (v >> (m - 1 - bitpos)) & 1;
      key = (key << 1) | bit;
    }
    mult[key]++;
  }
  uint64_t worst = 0;
  for (auto [k, c] : mult) worst = std::max(worst, c);
  return std::log2(double(values.size()) / double(worst));
}

SpreadReport spread_check(const std::vector<uint64_t>& values, uint32_t m, double gamma,
                          uint32_t budget_bits) {
  SpreadReport rep;
  if (values.empty()) throw std::invalid_argument("spread_check: empty set");
  // fixed coordinates: constant across the set
  std::vector<uint32_t> free_coords;
  for (uint32_t c = 0; c < m; ++c) {
    uint64_t first = (values[0] >> (m - 1 - c)) & 1;
    bool constant = true;
    for (uint64_t v : values)
      if (((v >> (m - 1 - c)) & 1) != first) { constant = false; break; }
    if (constant) rep.fixed.push_back(c);
    else free_coords.push_back(c);
  }
  if (free_coords.size() > budget_bits)
    throw std::invalid_argument("spread_check: too many free coordinates");
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (uint32_t mask = 1; mask < (1u << free_coords.size()); ++mask) {
    std::vector<uint32_t> I;
    for (size_t t = 0; t < free_coords.size(); ++t)
      if ((mask >> t) & 1) I.push_back(free_coords[t]);
    double h = min_entropy(values, m, I);
    double margin = h - gamma * double(I.size());
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.worst_subset = I;
    }
    if (margin < -1e-12) {
      rep.spread_ok = false;
      break;
    }
  }
  if (rep.min_margin == std::numeric_limits<double>::infinity()) rep.min_margin = 0.0;
  return rep;
}

SubcubeReport subcube_like_check(const Protocol& p, int node, double gamma, uint32_t budget_bits) {
  const auto& nd = p.nodes[node];
  uint32_t m = p.dom.k * p.dom.half_bits;
  std::vector<uint64_t> xs, ys;
  nd.xset.for_each_set([&](uint32_t v) { xs.push_back(v); });
  nd.yset.for_each_set([&](uint32_t v) { ys.push_back(v); });
  SubcubeReport rep;
  rep.x_side = spread_check(xs, m, gamma, budget_bits);
  rep.y_side = spread_check(ys, m, gamma, budget_bits);
  return rep;
}

bool protocol_subcube_like(const Protocol& p, double gamma, int* first_bad_node) {
  for (size_t v = 0; v < p.nodes.size(); ++v) {
    auto rep = subcube_like_check(p, int(v), gamma);
    if (!rep.subcube_like()) {
      if (first_bad_node) *first_bad_node = int(v);
      return false;
    }
  }
  return true;
}

// --- error and census -------------------------------------------------------------

namespace {

bool output_valid(const Protocol& p, const BlockGraph& g, int leaf, uint64_t x, uint64_t y) {
  const auto& out = p.nodes[leaf].output;
  auto selected = [&](int block) {
    uint32_t xd = p.dom.digit(x, uint32_t(block));
    uint32_t yd = p.dom.digit(y, uint32_t(block));
    return index_from_halves(xd, yd, g.n());
  };
  if (out.first.block == out.second.block) return false;
  if (selected(out.first.block) != out.first.index) return false;
  if (selected(out.second.block) != out.second.index) return false;
  return !g.adjacent(out.first, out.second);
}

}  // namespace

ErrorReport distributional_error_exhaustive(const Protocol& p, const BlockGraph& g) {
  ErrorReport rep;
  rep.exhaustive = true;
  for (uint64_t x = 0; x < p.dom.size; ++x)
    for (uint64_t y = 0; y < p.dom.size; ++y) {
      int leaf = run_protocol(p, x, y);
      rep.trials++;
      if (!output_valid(p, g, leaf, x, y)) rep.errors++;
    }
  return rep;
}

ErrorReport distributional_error_sampled(const Protocol& p, const BlockGraph& g, uint64_t trials,
                                         uint64_t seed) {
  ErrorReport rep;
  rep.trials = trials;
  for (uint64_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    uint64_t x = rng.below(p.dom.size), y = rng.below(p.dom.size);
    int leaf = run_protocol(p, x, y);
    if (!output_valid(p, g, leaf, x, y)) rep.errors++;
  }
  return rep;
}

std::vector<LeafRecord> leaf_census(const Protocol& p, const BlockGraph& g) {
  uint32_t m = p.dom.k * p.dom.half_bits;
  std::vector<LeafRecord> out;
  double total = double(p.dom.size) * double(p.dom.size);
  for (size_t v = 0; v < p.nodes.size(); ++v) {
    const auto& nd = p.nodes[v];
    if (!nd.leaf) continue;
    LeafRecord rec;
    rec.node = int(v);
    std::vector<uint64_t> xs, ys;
    nd.xset.for_each_set([&](uint32_t z) { xs.push_back(z); });
    nd.yset.for_each_set([&](uint32_t z) { ys.push_back(z); });
    if (xs.empty() || ys.empty()) continue;  // unreachable leaf
    std::set<int> blocks;
    for (uint32_t c = 0; c < m; ++c) {
      auto constant_on = [&](const std::vector<uint64_t>& side) {
        uint64_t first = (side[0] >> (m - 1 - c)) & 1;
        for (uint64_t z : side)
          if (((z >> (m - 1 - c)) & 1) != first) return false;
        return true;
      };
      if (constant_on(xs) || constant_on(ys)) blocks.insert(int(c / p.dom.half_bits));
    }
    rec.fixed_blocks.assign(blocks.begin(), blocks.end());
    int a = nd.output.first.block, b = nd.output.second.block;
    rec.safe = blocks.count(a) && blocks.count(b);
    uint64_t bad = 0;
    for (uint64_t x : xs)
      for (uint64_t y : ys) {
        VertexId va{a, index_from_halves(p.dom.digit(x, uint32_t(a)), p.dom.digit(y, uint32_t(a)), g.n())};
        VertexId vb{b, index_from_halves(p.dom.digit(x, uint32_t(b)), p.dom.digit(y, uint32_t(b)), g.n())};
        if (!g.adjacent(va, vb)) bad++;
      }
    rec.rect_size = uint64_t(xs.size()) * ys.size();
    rec.p_nonedge = double(bad) / double(rec.rect_size);
    rec.reach = double(rec.rect_size) / total;
    out.push_back(std::move(rec));
  }
  return out;
}

// --- canned protocols ----------------------------------------------------------------

Protocol baseline_protocol(const SplitDomain& dom) {
  if (dom.k < 2) throw std::invalid_argument("baseline_protocol: needs two blocks");
  Protocol p;
  p.dom = dom;
  uint32_t h = dom.half_bits;
  // Alice announces the halves of blocks 0 and 1 bit by bit, then Bob does
  // the same; the leaf outputs the selected pair of blocks (0, 1).
  std::function<int(uint32_t, uint64_t, uint64_t)> build = [&](uint32_t depth, uint64_t xk,
                                                               uint64_t yk) -> int {
    ProtocolNode nd;
    uint32_t xbits = 2 * h, ybits = 2 * h;
    if (depth == xbits + ybits) {
      nd.leaf = true;
      uint32_t x0 = uint32_t(xk >> h), x1 = uint32_t(xk & (dom.sigma - 1));
      uint32_t y0 = uint32_t(yk >> h), y1 = uint32_t(yk & (dom.sigma - 1));
      nd.output = {VertexId{0, index_from_halves(x0, y0, dom.n)},
                   VertexId{1, index_from_halves(x1, y1, dom.n)}};
      p.nodes.push_back(std::move(nd));
      return int(p.nodes.size()) - 1;
    }
    bool alice = depth < xbits;
    uint32_t bit_index = alice ? depth : depth - xbits;  // over blocks 0,1 halves
    nd.speaker = alice ? 0 : 1;
    nd.table.assign(dom.size, 0);
    for (uint64_t z = 0; z < dom.size; ++z) {
      uint32_t d0 = dom.digit(z, 0), d1 = dom.digit(z, 1);
      uint64_t halves = (uint64_t(d0) << h) | d1;
      nd.table[z] = uint8_t((halves >> (2 * h - 1 - bit_index)) & 1);
    }
    int self = int(p.nodes.size());
    p.nodes.push_back(std::move(nd));
    int c0 = build(depth + 1, alice ? (xk << 1) : xk, alice ? yk : (yk << 1));
    int c1 = build(depth + 1, alice ? ((xk << 1) | 1) : xk, alice ? yk : ((yk << 1) | 1));
    p.nodes[self].child0 = c0;
    p.nodes[self].child1 = c1;
    return self;
  };
  p.root = build(0, 0, 0);
  p.compute_rectangles();
  return p;
}

Protocol fixed_pair_protocol(const SplitDomain& dom, VertexId u, VertexId v) {
  Protocol p;
  p.dom = dom;
  ProtocolNode leaf;
  leaf.leaf = true;
  leaf.output = {u, v};
  p.nodes.push_back(std::move(leaf));
  p.root = 0;
  p.compute_rectangles();
  return p;
}

// --- serialization ---------------------------------------------------------------------

void save_protocol_json(const Protocol& p, std::ostream& out) {
  nlohmann::json j;
  j["n"] = p.dom.n;
  j["k"] = p.dom.k;
  j["root"] = p.root;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& nd : p.nodes) {
    nlohmann::json nj;
    nj["leaf"] = nd.leaf;
    if (nd.leaf) {
      nj["output"] = {{"ublock", nd.output.first.block},
                      {"uindex", nd.output.first.index},
                      {"vblock", nd.output.second.block},
                      {"vindex", nd.output.second.index}};
    } else {
      nj["speaker"] = nd.speaker;
      nj["table"] = nd.table;
      nj["child0"] = nd.child0;
      nj["child1"] = nd.child1;
    }
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  out << j.dump(1) << "\n";
}

Protocol load_protocol_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  Protocol p;
  p.dom = SplitDomain::make(j.at("n").get<uint32_t>(), j.at("k").get<uint32_t>());
  p.root = j.at("root").get<int>();
  for (const auto& nj : j.at("nodes")) {
    ProtocolNode nd;
    nd.leaf = nj.at("leaf").get<bool>();
    if (nd.leaf) {
      const auto& o = nj.at("output");
      nd.output = {VertexId{o.at("ublock").get<int>(), o.at("uindex").get<uint32_t>()},
                   VertexId{o.at("vblock").get<int>(), o.at("vindex").get<uint32_t>()}};
    } else {
      nd.speaker = nj.at("speaker").get<int>();
      nd.table = nj.at("table").get<std::vector<uint8_t>>();
      nd.child0 = nj.at("child0").get<int>();
      nd.child1 = nj.at("child1").get<int>();
    }
    p.nodes.push_back(std::move(nd));
  }
  p.compute_rectangles();
  p.validate();
  return p;
}

}  // namespace bclq
