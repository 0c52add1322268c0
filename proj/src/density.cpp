#include "bclq/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace bclq {

namespace {

uint32_t half_count(const BlockGraph& g) {
  if (g.bits() % 2) throw std::invalid_argument("almost-complete scan needs log2(n) even");
  return 1u << (g.bits() / 2);
}

}  // namespace

uint32_t bad_count_for_tuple(const BlockGraph& g, int i, int j,
                             uint32_t xi, uint32_t yi, uint32_t xj) {
  uint32_t sq = half_count(g);
  VertexId u{i, index_from_halves(xi, yi, g.n())};
  uint32_t bad = 0;
  for (uint32_t yj = 0; yj < sq; ++yj)
    if (!g.adjacent(u, {j, index_from_halves(xj, yj, g.n())})) ++bad;
  return bad;
}

AlmostCompleteReport min_almost_complete(const BlockGraph& g) {
  uint32_t sq = half_count(g);
  AlmostCompleteReport rep;
  for (int i = 0; i < int(g.k()); ++i)
    for (int j = 0; j < int(g.k()); ++j) {
      if (i == j) continue;
      for (uint32_t ui = 0; ui < g.n(); ++ui) {
        VertexId u{i, ui};
        // y_j values with fixed x_j form one aligned run of sq indices,
        // so each count is a popcount over the adjacency row.
        auto nb = g.neighbors_in_block(u, j);
        for (uint32_t xj = 0; xj < sq; ++xj) {
          uint32_t present = 0;
          for (uint32_t yj = 0; yj < sq; ++yj)
            if (nb.contains(xj * sq + yj)) ++present;
          uint32_t bad = sq - present;
          if (bad > rep.s_star) {
            rep.s_star = bad;
            rep.witness = {i, j, x_half(ui, g.n()), y_half(ui, g.n()), xj, bad};
          }
        }
      }
    }
  return rep;
}

// --- bounded common neighborhoods --------------------------------------------

namespace {

bool interval_ok(const BoundedCnParams& p, uint32_t n, size_t set_size, uint32_t count,
                 double* deviation, double* lo_out, double* hi_out) {
  double mean = std::pow(p.alpha, double(set_size)) * double(n);
  double lo = (1.0 - p.beta) * mean, hi = (1.0 + p.beta) * mean;
  if (lo_out) *lo_out = lo;
  if (hi_out) *hi_out = hi;
  if (deviation && mean > 0) *deviation = std::fabs(double(count) / mean - 1.0);
  return double(count) >= lo && double(count) <= hi;
}

void record_check(BoundedCnReport& rep, const BlockGraph& g, const BoundedCnParams& p,
                  const std::vector<VertexId>& S, int block) {
  auto cn = g.common_neighborhood(S, block);
  uint32_t cnt = cn.count();
  double dev = 0, lo = 0, hi = 0;
  bool ok = interval_ok(p, g.n(), S.size(), cnt, &dev, &lo, &hi);
  rep.checks++;
  rep.max_deviation = std::max(rep.max_deviation, dev);
  if (!ok && rep.pass) {
    rep.pass = false;
    rep.counterexample = BoundedCnCounterexample{S, block, cnt, lo, hi};
  }
}

}  // namespace

BoundedCnReport check_bounded_cn_exhaustive(const BlockGraph& g, const BoundedCnParams& p,
                                            uint64_t budget) {
  // work estimate: sum_{r<=R} C(kn, r) * k
  long double estimate = 0, choose = 1;
  uint64_t nv = g.num_vertices();
  for (uint32_t r = 1; r <= p.R && r <= nv; ++r) {
    choose = choose * (long double)(nv - r + 1) / r;
    estimate += choose * g.k();
    if (estimate > (long double)budget)
      throw std::invalid_argument("check_bounded_cn: exhaustive budget exceeded");
  }

  BoundedCnReport rep;
  rep.params = p;
  rep.exhaustive = true;
  std::vector<VertexId> S;
  std::vector<bool> block_used(g.k(), false);
  // enumerate subsets of global vertices by increasing max id
  auto rec = [&](auto&& self, uint64_t next) -> void {
    if (!S.empty()) {
      for (int i = 0; i < int(g.k()); ++i)
        if (!block_used[i]) record_check(rep, g, p, S, i);
    }
    if (S.size() == p.R) return;
    for (uint64_t gv = next; gv < nv; ++gv) {
      VertexId v = g.vertex(gv);
      bool had = block_used[v.block];
      S.push_back(v);
      block_used[v.block] = true;
      self(self, gv + 1);
      S.pop_back();
      block_used[v.block] = had;
    }
  };
  rec(rec, 0);
  return rep;
}

BoundedCnReport check_bounded_cn_sampled(const BlockGraph& g, const BoundedCnParams& p,
                                         uint64_t trials, uint64_t seed) {
  BoundedCnReport rep;
  rep.params = p;
  rep.exhaustive = false;
  uint32_t rmax = std::min<uint32_t>(p.R, g.k() - 1);
  if (rmax == 0) throw std::invalid_argument("check_bounded_cn_sampled: k too small");
  for (uint64_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    uint32_t r = 1 + uint32_t(rng.below(rmax));
    // uniform r-subset of blocks via partial Fisher-Yates
    std::vector<uint32_t> blocks(g.k());
    for (uint32_t b = 0; b < g.k(); ++b) blocks[b] = b;
    for (uint32_t i = 0; i < r; ++i)
      std::swap(blocks[i], blocks[i + rng.below(g.k() - i)]);
    std::vector<VertexId> S;
    for (uint32_t i = 0; i < r; ++i)
      S.push_back({int(blocks[i]), uint32_t(rng.below(g.n()))});
    int target = int(blocks[r + rng.below(g.k() - r)]);
    record_check(rep, g, p, S, target);
  }
  return rep;
}

BoundedCnReport check_bounded_cn(const BlockGraph& g, const BoundedCnParams& p,
                                 uint64_t sampled_trials, uint64_t seed, uint64_t budget) {
  long double estimate = 0, choose = 1;
  uint64_t nv = g.num_vertices();
  for (uint32_t r = 1; r <= p.R && r <= nv; ++r) {
    choose = choose * (long double)(nv - r + 1) / r;
    estimate += choose * g.k();
  }
  if (estimate <= (long double)budget) return check_bounded_cn_exhaustive(g, p, budget);
  return check_bounded_cn_sampled(g, p, sampled_trials, seed);
}

// --- concentration experiment --------------------------------------------------

ConcentrationResult concentration_experiment_ac(uint32_t n, double p, uint32_t k,
                                                uint32_t graphs, uint64_t tuples_per_graph,
                                                uint64_t seed, int threads) {
  if (!is_pow2(n) || ilog2(n) % 2) throw std::invalid_argument("concentration: n must be an even power of two");
  if (k < 2) throw std::invalid_argument("concentration: k < 2");
  ConcentrationResult res;
  res.n = n;
  res.k = k;
  res.p = p;
  res.seed = seed;
  res.tuples = uint64_t(graphs) * tuples_per_graph;
  double sq = std::sqrt(double(n));
  res.threshold = 2.0 * sq * (1.0 - p);
  res.reference = std::exp(-sq * (1.0 - p) / 3.0);
  res.log_threshold = 9.0 * std::exp(2.0) * std::log(double(k) * double(n));
  res.samples.assign(res.tuples, 0);

  uint32_t h = 1u << (ilog2(n) / 2);
  auto run_range = [&](uint64_t lo, uint64_t hi) {
    for (uint64_t t = lo; t < hi; ++t) {
      uint64_t gidx = t / tuples_per_graph;
      GraphParams pr{n, k, p, mix64(seed, gidx)};
      Rng rng(seed, 0x10000000ull + t);
      int i = int(rng.below(k));
      int j = int(rng.below(k - 1));
      if (j >= i) ++j;
      uint32_t xi = uint32_t(rng.below(h)), yi = uint32_t(rng.below(h));
      uint32_t xj = uint32_t(rng.below(h));
      uint64_t gu = uint64_t(i) * n + index_from_halves(xi, yi, n);
      uint32_t bad = 0;
      for (uint32_t yj = 0; yj < h; ++yj) {
        uint64_t gv = uint64_t(j) * n + index_from_halves(xj, yj, n);
        if (!pair_present(pr, gu, gv)) ++bad;
      }
      res.samples[t] = bad;
    }
  };
  if (threads <= 1) {
    run_range(0, res.tuples);
  } else {
    std::vector<std::thread> pool;
    uint64_t chunk = (res.tuples + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      uint64_t lo = std::min<uint64_t>(w * chunk, res.tuples);
      uint64_t hi = std::min(lo + chunk, res.tuples);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  // Tail event: count >= threshold. At p=1 the threshold degenerates to 0 and
  // every count is 0; a zero count never witnesses a tail excursion, so it is
  // not counted.
  for (uint32_t c : res.samples)
    if (c > 0 && double(c) >= res.threshold) res.tail_hits++;
  return res;
}

}  // namespace bclq
