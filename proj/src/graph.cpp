#include "bclq/graph.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace bclq {

bool pair_present(const GraphParams& pr, uint64_t gu, uint64_t gv) {
  if (gu > gv) std::swap(gu, gv);
  uint64_t pair_id = (gu << 32) | gv;
  uint64_t h = mix64(mix64(pr.seed) ^ pair_id);
  return double(h >> 11) * 0x1.0p-53 < pr.p;
}

// --- BlockSubset ------------------------------------------------------------

BlockSubset::BlockSubset(int block, uint32_t n, bool full)
    : block_(block), n_(n), w_((n + 63) / 64, full ? ~0ull : 0ull) {
  if (full && (n & 63)) w_.back() &= (1ull << (n & 63)) - 1;
}

uint32_t BlockSubset::count() const {
  uint32_t c = 0;
  for (uint64_t x : w_) c += std::popcount(x);
  return c;
}

uint32_t BlockSubset::nth(uint32_t t) const {
  for (size_t i = 0; i < w_.size(); ++i) {
    uint32_t c = std::popcount(w_[i]);
    if (t < c) {
      uint64_t x = w_[i];
      while (t--) x &= x - 1;
      return uint32_t(i * 64 + std::countr_zero(x));
    }
    t -= c;
  }
  throw std::out_of_range("BlockSubset::nth");
}

std::vector<uint32_t> BlockSubset::indices() const {
  std::vector<uint32_t> out;
  for (size_t i = 0; i < w_.size(); ++i) {
    uint64_t x = w_[i];
    while (x) {
      out.push_back(uint32_t(i * 64 + std::countr_zero(x)));
      x &= x - 1;
    }
  }
  return out;
}

void BlockSubset::intersect_words(const uint64_t* words) {
  for (size_t i = 0; i < w_.size(); ++i) w_[i] &= words[i];
}

// --- BlockGraph -------------------------------------------------------------

void BlockGraph::init(uint32_t n, uint32_t k) {
  if (!is_pow2(n) || n < 2) throw std::invalid_argument("BlockGraph: n must be a power of two >= 2");
  if (k < 1) throw std::invalid_argument("BlockGraph: k must be positive");
  n_ = n;
  k_ = k;
  bits_ = ilog2(n);
  uint64_t nv = uint64_t(n) * k;
  stride_ = size_t((nv + 63) / 64);
  rows_.assign(nv * stride_, 0);
}

void BlockGraph::set_edge(uint64_t gu, uint64_t gv) {
  rows_[gu * stride_ + (gv >> 6)] |= 1ull << (gv & 63);
  rows_[gv * stride_ + (gu >> 6)] |= 1ull << (gu & 63);
}

BlockGraph BlockGraph::sample(const GraphParams& pr, int threads) {
  if (pr.p < 0.0 || pr.p > 1.0) throw std::invalid_argument("BlockGraph: p outside [0,1]");
  BlockGraph g;
  g.init(pr.n, pr.k);
  g.meta_ = pr;
  uint64_t nv = g.num_vertices();
  // Each row is filled independently; edge membership is a pure function of
  // (seed, pair), so parallel construction is race-free per row and the
  // result is identical for every thread count.
  auto fill_rows = [&](uint64_t lo, uint64_t hi) {
    for (uint64_t gu = lo; gu < hi; ++gu) {
      uint32_t bu = uint32_t(gu / pr.n);
      uint64_t* row = &g.rows_[gu * g.stride_];
      for (uint64_t gv = 0; gv < nv; ++gv) {
        if (uint32_t(gv / pr.n) == bu) continue;
        if (pair_present(pr, gu, gv)) row[gv >> 6] |= 1ull << (gv & 63);
      }
    }
  };
  if (threads <= 1) {
    fill_rows(0, nv);
  } else {
    std::vector<std::thread> pool;
    uint64_t chunk = (nv + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      uint64_t lo = std::min<uint64_t>(t * chunk, nv);
      uint64_t hi = std::min<uint64_t>(lo + chunk, nv);
      if (lo < hi) pool.emplace_back(fill_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return g;
}

BlockGraph BlockGraph::complete(uint32_t n, uint32_t k) {
  return sample({n, k, 1.0, 0});
}

BlockGraph BlockGraph::edgeless(uint32_t n, uint32_t k) {
  return sample({n, k, 0.0, 0});
}

BlockGraph BlockGraph::from_edges(uint32_t n, uint32_t k,
                                  const std::vector<std::pair<uint64_t, uint64_t>>& edges,
                                  std::optional<GraphParams> meta) {
  BlockGraph g;
  g.init(n, k);
  g.meta_ = meta;
  uint64_t nv = g.num_vertices();
  for (auto [u, v] : edges) {
    if (u >= nv || v >= nv) throw std::invalid_argument("edge endpoint out of range");
    if (u / n == v / n) throw std::invalid_argument("edge inside a block");
    g.set_edge(u, v);
  }
  return g;
}

uint64_t BlockGraph::edge_count() const {
  uint64_t c = 0;
  for (uint64_t x : rows_) c += std::popcount(x);
  return c / 2;
}

std::vector<std::pair<uint64_t, uint64_t>> BlockGraph::edges() const {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  uint64_t nv = num_vertices();
  for (uint64_t u = 0; u < nv; ++u) {
    const uint64_t* row = &rows_[u * stride_];
    for (uint64_t v = u + 1; v < nv; ++v)
      if ((row[v >> 6] >> (v & 63)) & 1) out.emplace_back(u, v);
  }
  return out;
}

BlockSubset BlockGraph::neighbors_in_block(VertexId u, int i) const {
  BlockSubset s(i, n_, false);
  uint64_t base = uint64_t(i) * n_;
  const uint64_t* row = &rows_[gid(u) * stride_];
  if (n_ >= 64) {
    // block range is word-aligned
    std::vector<uint64_t> w(row + base / 64, row + base / 64 + n_ / 64);
    BlockSubset out(i, n_, true);
    out.intersect_words(w.data());
    return out;
  }
  // n < 64: the whole block lives inside one word
  uint64_t word = row[base >> 6] >> (base & 63);
  uint64_t mask = (n_ == 64) ? ~0ull : ((1ull << n_) - 1);
  BlockSubset out(i, n_, false);
  uint64_t bitsw = word & mask;
  while (bitsw) {
    out.add(uint32_t(std::countr_zero(bitsw)));
    bitsw &= bitsw - 1;
  }
  return out;
}

BlockSubset BlockGraph::common_neighborhood(const std::vector<VertexId>& U, int i) const {
  if (i < 0 || uint32_t(i) >= k_) throw std::invalid_argument("common_neighborhood: bad block");
  for (const auto& u : U)
    if (u.block == i) throw std::invalid_argument("common_neighborhood: block intersects B(U)");
  BlockSubset acc(i, n_, true);
  for (const auto& u : U) {
    BlockSubset nb = neighbors_in_block(u, i);
    acc.intersect_words(nb.words().data());
  }
  return acc;
}

void BlockGraph::validate() const {
  uint64_t nv = num_vertices();
  for (uint64_t u = 0; u < nv; ++u) {
    if (adjacent_gid(u, u)) throw std::runtime_error("self loop");
    for (uint64_t v = u + 1; v < nv; ++v) {
      bool uv = adjacent_gid(u, v), vu = adjacent_gid(v, u);
      if (uv != vu) throw std::runtime_error("asymmetric adjacency");
      if (uv && u / n_ == v / n_) throw std::runtime_error("same-block edge");
    }
  }
}

// --- vertex encodings -------------------------------------------------------

std::vector<uint8_t> vertex_bits(uint32_t idx, uint32_t n) {
  uint32_t b = ilog2(n);
  if (idx >= n) throw std::invalid_argument("vertex_bits: index out of range");
  std::vector<uint8_t> out(b);
  for (uint32_t a = 0; a < b; ++a) out[a] = (idx >> (b - 1 - a)) & 1;
  return out;
}

uint32_t bits_to_index(const std::vector<uint8_t>& bits) {
  uint32_t idx = 0;
  for (uint8_t b : bits) idx = (idx << 1) | (b & 1);
  return idx;
}

uint32_t x_half(uint32_t idx, uint32_t n) {
  uint32_t b = ilog2(n);
  if (b % 2) throw std::invalid_argument("x_half: log2(n) must be even");
  return idx >> (b / 2);
}

uint32_t y_half(uint32_t idx, uint32_t n) {
  uint32_t b = ilog2(n);
  if (b % 2) throw std::invalid_argument("y_half: log2(n) must be even");
  return idx & ((1u << (b / 2)) - 1);
}

uint32_t index_from_halves(uint32_t xh, uint32_t yh, uint32_t n) {
  uint32_t h = ilog2(n) / 2;
  return (xh << h) | yh;
}

// --- JSON graph files -------------------------------------------------------

void save_graph_json(const BlockGraph& g, std::ostream& out) {
  nlohmann::json j;
  j["format"] = "BCLQ-1";
  j["n"] = g.n();
  j["k"] = g.k();
  if (g.meta()) {
    j["p"] = g.meta()->p;
    j["seed"] = g.meta()->seed;
  }
  auto es = g.edges();
  nlohmann::json je = nlohmann::json::array();
  for (auto [u, v] : es) je.push_back({u, v});
  j["edges"] = std::move(je);
  out << j.dump(1) << "\n";
}

BlockGraph load_graph_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != std::string("BCLQ-1"))
    throw std::invalid_argument("graph file: unknown format");
  uint32_t n = j.at("n").get<uint32_t>();
  uint32_t k = j.at("k").get<uint32_t>();
  std::optional<GraphParams> meta;
  if (j.contains("p") && j.contains("seed"))
    meta = GraphParams{n, k, j["p"].get<double>(), j["seed"].get<uint64_t>()};
  std::vector<std::pair<uint64_t, uint64_t>> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e.at(0).get<uint64_t>(), e.at(1).get<uint64_t>());
  auto g = BlockGraph::from_edges(n, k, edges, meta);
  return g;
}

}  // namespace bclq
