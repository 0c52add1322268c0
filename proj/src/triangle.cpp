#include "bclq/triangle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "bclq/util.hpp"

namespace bclq {

SplitDomain SplitDomain::make(uint32_t n, uint32_t k) {
  uint32_t bits = ilog2(n);
  if (bits % 2) throw std::invalid_argument("SplitDomain: log2(n) must be even");
  SplitDomain d;
  d.n = n;
  d.k = k;
  d.half_bits = bits / 2;
  d.sigma = 1u << d.half_bits;
  d.size = 1;
  for (uint32_t i = 0; i < k; ++i) {
    d.size *= d.sigma;
    if (d.size > (1ull << 24)) throw std::invalid_argument("SplitDomain: domain too large");
  }
  return d;
}

RectSet RectSet::from_graph(const BlockGraph& g) {
  RectSet rs;
  rs.dom = SplitDomain::make(g.n(), g.k());
  for (uint32_t bi = 0; bi < g.k(); ++bi)
    for (uint32_t bj = bi + 1; bj < g.k(); ++bj)
      for (uint32_t ui = 0; ui < g.n(); ++ui)
        for (uint32_t vj = 0; vj < g.n(); ++vj) {
          if (g.adjacent({int(bi), ui}, {int(bj), vj})) continue;
          SolutionRect r;
          r.u = {int(bi), ui};
          r.v = {int(bj), vj};
          r.ux = x_half(ui, g.n());
          r.uy = y_half(ui, g.n());
          r.vx = x_half(vj, g.n());
          r.vy = y_half(vj, g.n());
          rs.rects.push_back(r);
        }
  uint64_t sz = rs.dom.size;
  rs.xmask.reserve(rs.rects.size());
  rs.ymask.reserve(rs.rects.size());
  rs.by_x.assign(sz, {});
  rs.by_y.assign(sz, {});
  for (size_t id = 0; id < rs.rects.size(); ++id) {
    const auto& r = rs.rects[id];
    BitVec xm{uint32_t(sz)}, ym{uint32_t(sz)};
    for (uint64_t z = 0; z < sz; ++z) {
      if (rs.dom.digit(z, r.u.block) == r.ux && rs.dom.digit(z, r.v.block) == r.vx) {
        xm.set(uint32_t(z), true);
        rs.by_x[z].push_back(uint32_t(id));
      }
      if (rs.dom.digit(z, r.u.block) == r.uy && rs.dom.digit(z, r.v.block) == r.vy) {
        ym.set(uint32_t(z), true);
        rs.by_y[z].push_back(uint32_t(id));
      }
    }
    rs.xmask.push_back(std::move(xm));
    rs.ymask.push_back(std::move(ym));
  }
  return rs;
}

Triangle Triangle::full(uint64_t xsize, uint64_t ysize) {
  Triangle t;
  t.a.assign(xsize, Rational(0));
  t.b.assign(ysize, Rational(0));
  return t;
}

Triangle Triangle::empty(uint64_t xsize, uint64_t ysize) {
  Triangle t;
  t.a.assign(xsize, Rational(1));
  t.b.assign(ysize, Rational(0));
  return t;
}

Triangle Triangle::of_rect(const RectSet& rs, size_t rect_id) {
  Triangle t;
  uint64_t sz = rs.dom.size;
  t.a.assign(sz, Rational(1));
  t.b.assign(sz, Rational(-1));
  for (uint64_t x = 0; x < sz; ++x)
    if (rs.xmask[rect_id].get(uint32_t(x))) t.a[x] = Rational(0);
  for (uint64_t y = 0; y < sz; ++y)
    if (rs.ymask[rect_id].get(uint32_t(y))) t.b[y] = Rational(0);
  return t;
}

DagCheckResult check_triangle_dag(const TriangleDag& dag,
                                  const std::function<bool(uint64_t, uint64_t, int)>& in_preimage) {
  DagCheckResult res;
  auto fail = [&](std::string why) {
    res.valid = false;
    res.reason = std::move(why);
    return res;
  };
  if (dag.root < 0 || size_t(dag.root) >= dag.nodes.size()) return fail("missing root");
  const auto& root = dag.nodes[dag.root];
  for (uint64_t x = 0; x < dag.xsize; ++x)
    for (uint64_t y = 0; y < dag.ysize; ++y)
      if (!root.tri.member(x, y))
        return fail("root does not cover the full domain");
  for (size_t v = 0; v < dag.nodes.size(); ++v) {
    const auto& nd = dag.nodes[v];
    bool leaf = nd.child0 < 0 && nd.child1 < 0;
    for (uint64_t x = 0; x < dag.xsize; ++x)
      for (uint64_t y = 0; y < dag.ysize; ++y) {
        if (!nd.tri.member(x, y)) continue;
        if (leaf) {
          if (nd.output < 0) return fail("nonempty leaf without an output");
          if (!in_preimage(x, y, nd.output))
            return fail("leaf " + std::to_string(v) + " escapes its output preimage");
        } else {
          bool covered = false;
          if (nd.child0 >= 0) covered = dag.nodes[nd.child0].tri.member(x, y);
          if (!covered && nd.child1 >= 0) covered = dag.nodes[nd.child1].tri.member(x, y);
          if (!covered) return fail("node " + std::to_string(v) + " not covered by children");
        }
      }
  }
  return res;
}

// --- block width -----------------------------------------------------------------

int block_width_of_slice(const RectSet& rs, const BitVec& slice,
                         const std::vector<uint32_t>& consistent,
                         const std::vector<BitVec>& side_masks, BwMode mode,
                         uint32_t k_budget, std::vector<uint32_t>* best_blocks) {
  if (best_blocks) best_blocks->clear();
  if (slice.none()) return 0;
  uint32_t k = rs.dom.k;

  if (mode == BwMode::Exact) {
    if (k > k_budget) throw std::invalid_argument("block_width: exact mode k budget exceeded");
    // subsets of [k] in (size, numeric) order
    std::vector<uint32_t> subsets;
    for (uint32_t m = 1; m < (1u << k); ++m) subsets.push_back(m);
    std::stable_sort(subsets.begin(), subsets.end(), [](uint32_t a, uint32_t b) {
      return std::popcount(a) < std::popcount(b);
    });
    for (uint32_t m : subsets) {
      BitVec covered(slice.size());
      for (uint32_t id : consistent)
        if ((rs.block_pair_mask(id) & ~m) == 0) covered |= side_masks[id];
      if (slice.subset_of(covered)) {
        if (best_blocks)
          for (uint32_t b = 0; b < k; ++b)
            if ((m >> b) & 1) best_blocks->push_back(b);
        return std::popcount(m);
      }
    }
    return kBwInfinite;
  }

  // Greedy: grow the block set by the single block or block pair covering the
  // most still-uncovered slice points.
  uint32_t used = 0;
  BitVec covered(slice.size());
  auto covered_with = [&](uint32_t m) {
    BitVec c(slice.size());
    for (uint32_t id : consistent)
      if ((rs.block_pair_mask(id) & ~m) == 0) c |= side_masks[id];
    c &= slice;
    return c;
  };
  for (;;) {
    BitVec want = slice;
    bool done = want.subset_of(covered);
    if (done) break;
    uint32_t best_mask = 0;
    uint64_t best_gain = 0;
    uint32_t best_added = 0;
    auto consider = [&](uint32_t add_mask) {
      uint32_t m = used | add_mask;
      BitVec c = covered_with(m);
      uint64_t gain = (c & ~covered & slice).count();
      uint32_t added = std::popcount(add_mask & ~used);
      if (gain == 0 || added == 0) return;
      // prefer higher gain per added block, then fewer blocks, then low mask
      bool better;
      if (best_added == 0) better = true;
      else better = gain * best_added > best_gain * added ||
                    (gain * best_added == best_gain * added &&
                     (added < best_added || (added == best_added && add_mask < best_mask)));
      if (better) { best_mask = add_mask; best_gain = gain; best_added = added; }
    };
    for (uint32_t b = 0; b < k; ++b) consider(1u << b);
    for (uint32_t b = 0; b < k; ++b)
      for (uint32_t c = b + 1; c < k; ++c) consider((1u << b) | (1u << c));
    if (best_added == 0) return kBwInfinite;
    used |= best_mask;
    covered = covered_with(used);
  }
  if (best_blocks)
    for (uint32_t b = 0; b < k; ++b)
      if ((used >> b) & 1) best_blocks->push_back(b);
  return std::popcount(used);
}

namespace {

BitVec slice_of_x(const Triangle& t, uint64_t x, const BitVec& ymask) {
  BitVec s(ymask.size());
  ymask.for_each_set([&](uint32_t y) {
    if (t.member(x, y)) s.set(y, true);
  });
  return s;
}

BitVec slice_of_y(const Triangle& t, uint64_t y, const BitVec& xmask) {
  BitVec s(xmask.size());
  xmask.for_each_set([&](uint32_t x) {
    if (t.member(x, y)) s.set(x, true);
  });
  return s;
}

}  // namespace

int block_width_x(const RectSet& rs, const Triangle& t, uint64_t x, const BitVec& ymask,
                  BwMode mode, uint32_t k_budget) {
  return block_width_of_slice(rs, slice_of_x(t, x, ymask), rs.by_x[x], rs.ymask, mode, k_budget);
}

int block_width_y(const RectSet& rs, const Triangle& t, uint64_t y, const BitVec& xmask,
                  BwMode mode, uint32_t k_budget) {
  return block_width_of_slice(rs, slice_of_y(t, y, xmask), rs.by_y[y], rs.xmask, mode, k_budget);
}

// --- progress map -------------------------------------------------------------------

namespace {

// children-first ordering over all nodes, ties by node id
std::vector<int> sinks_first_order(const TriangleDag& dag) {
  size_t nn = dag.nodes.size();
  std::vector<int> outdeg_unprocessed(nn, 0);
  std::vector<std::vector<int>> parents(nn);
  for (size_t v = 0; v < nn; ++v) {
    for (int c : {dag.nodes[v].child0, dag.nodes[v].child1}) {
      if (c < 0) continue;
      outdeg_unprocessed[v]++;
      parents[c].push_back(int(v));
    }
  }
  std::set<int> ready;
  for (size_t v = 0; v < nn; ++v)
    if (outdeg_unprocessed[v] == 0) ready.insert(int(v));
  std::vector<int> order;
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int p : parents[v])
      if (--outdeg_unprocessed[p] == 0) ready.insert(p);
  }
  if (order.size() != nn) throw std::invalid_argument("triangle DAG has a cycle");
  return order;
}

}  // namespace

uint64_t MuResult::assigned_total() const {
  uint64_t c = 0;
  for (int v : mu_x) c += v >= 0;
  for (int v : mu_y) c += v >= 0;
  return c;
}

MuResult build_mu(const TriangleDag& dag, const RectSet& rs, int q) {
  MuResult res;
  res.mu_x.assign(dag.xsize, -1);
  res.mu_y.assign(dag.ysize, -1);
  BitVec xs(uint32_t(dag.xsize), true), ys(uint32_t(dag.ysize), true);
  for (int u : sinks_first_order(dag)) {
    MuSnapshot snap;
    snap.node = u;
    snap.x_before = xs;
    snap.y_before = ys;
    const Triangle& t = dag.nodes[u].tri;
    for (uint64_t x = 0; x < dag.xsize; ++x) {
      if (!xs.get(uint32_t(x))) continue;
      int bw = block_width_x(rs, t, x, ys);
      if (bw > q) {
        res.mu_x[x] = u;
        xs.set(uint32_t(x), false);
        snap.assigned_x.push_back(uint32_t(x));
      }
    }
    for (uint64_t y = 0; y < dag.ysize; ++y) {
      if (!ys.get(uint32_t(y))) continue;
      int bw = block_width_y(rs, t, y, xs);
      if (bw > q) {
        res.mu_y[y] = u;
        ys.set(uint32_t(y), false);
        snap.assigned_y.push_back(uint32_t(y));
      }
    }
    res.snaps.push_back(std::move(snap));
  }
  return res;
}

std::vector<std::pair<int, uint64_t>> check_two_q_claim(const TriangleDag& dag, const RectSet& rs,
                                                        int q, const MuResult& mu) {
  std::vector<std::pair<int, uint64_t>> bad;
  for (const auto& snap : mu.snaps) {
    const Triangle& t = dag.nodes[snap.node].tri;
    snap.x_before.for_each_set([&](uint32_t x) {
      int bw = block_width_x(rs, t, x, snap.y_before);
      if (bw != kBwInfinite && bw > 2 * q) bad.emplace_back(snap.node, uint64_t(x));
      if (bw == kBwInfinite) bad.emplace_back(snap.node, uint64_t(x));
    });
    snap.y_before.for_each_set([&](uint32_t y) {
      int bw = block_width_y(rs, t, y, snap.x_before);
      if (bw != kBwInfinite && bw > 2 * q) bad.emplace_back(snap.node, uint64_t(y) + dag.xsize);
      if (bw == kBwInfinite) bad.emplace_back(snap.node, uint64_t(y) + dag.xsize);
    });
  }
  return bad;
}

// --- covering tree ---------------------------------------------------------------------

PointSet PointSet::from_triangle(const Triangle& t, const BitVec& xmask, const BitVec& ymask) {
  PointSet ps;
  ps.xsize = t.a.size();
  ps.ysize = t.b.size();
  ps.rows.assign(ps.xsize, BitVec(uint32_t(ps.ysize)));
  xmask.for_each_set([&](uint32_t x) {
    ymask.for_each_set([&](uint32_t y) {
      if (t.member(x, y)) ps.rows[x].set(y, true);
    });
  });
  return ps;
}

bool PointSet::any() const {
  for (const auto& r : rows)
    if (r.any()) return true;
  return false;
}

uint64_t PointSet::count() const {
  uint64_t c = 0;
  for (const auto& r : rows) c += r.count();
  return c;
}

BitVec PointSet::column(uint64_t y) const {
  BitVec c{uint32_t(xsize)};
  for (uint64_t x = 0; x < xsize; ++x)
    if (rows[x].get(uint32_t(y))) c.set(uint32_t(x), true);
  return c;
}

CoverTree covering_tree(const RectSet& rs, const Triangle& t, const BitVec& xmask,
                        const BitVec& ymask, int q) {
  // input condition: every y in the survivor set has block width <= 2q
  for (uint32_t y = 0; y < ymask.size(); ++y) {
    if (!ymask.get(y)) continue;
    BitVec sl = BitVec(xmask.size());
    xmask.for_each_set([&](uint32_t x) {
      if (t.member(x, y)) sl.set(x, true);
    });
    if (sl.none()) continue;
    int bw = block_width_of_slice(rs, sl, rs.by_y[y], rs.xmask, BwMode::Exact, 20);
    if (bw == kBwInfinite || bw > 2 * q)
      throw std::invalid_argument("covering_tree: a y-slice exceeds block width 2q");
  }

  CoverTree tree;
  CoverTreeNode root;
  root.points = PointSet::from_triangle(t, xmask, ymask);
  root.parent = -1;
  root.block_depth = 0;
  tree.nodes.push_back(std::move(root));

  std::deque<int> leaves;
  if (tree.nodes[0].points.any()) leaves.push_back(0);
  while (!leaves.empty()) {
    int cur = leaves.front();
    leaves.pop_front();
    // work on a copy of the point set; children reference the current one
    PointSet pts = tree.nodes[cur].points;
    // choose y maximizing |T^y| (ties: least y)
    uint64_t best_y = 0, best_count = 0;
    for (uint64_t y = 0; y < pts.ysize; ++y) {
      uint64_t c = pts.column(y).count();
      if (c > best_count) { best_count = c; best_y = y; }
    }
    if (best_count == 0) continue;  // empty: no children
    BitVec yslice = pts.column(best_y);
    // minimal-block-width cover of T^y
    std::vector<uint32_t> blocks;
    int bw = block_width_of_slice(rs, yslice, rs.by_y[best_y], rs.xmask, BwMode::Exact, 20, &blocks);
    if (bw == kBwInfinite) throw std::runtime_error("covering_tree: uncoverable slice");
    uint32_t wmask = 0;
    for (uint32_t b : blocks) wmask |= 1u << b;
    // greedy max-coverage cover within the optimal block set (ties: low id);
    // a rectangle covering the whole slice is then always chosen alone
    std::vector<uint32_t> cover;
    BitVec covered(yslice.size());
    for (;;) {
      if (yslice.subset_of(covered)) break;
      uint32_t best_id = 0;
      uint64_t best_gain = 0;
      bool found = false;
      for (uint32_t id : rs.by_y[best_y]) {
        if (rs.block_pair_mask(id) & ~wmask) continue;
        uint64_t gain = (rs.xmask[id] & yslice & ~covered).count();
        if (gain > best_gain) { best_gain = gain; best_id = id; found = true; }
      }
      if (!found) throw std::runtime_error("covering_tree: cover construction stalled");
      cover.push_back(best_id);
      covered |= rs.xmask[best_id] & yslice;
    }
    // path blocks for depth bookkeeping
    uint32_t path_mask = 0;
    for (int v = cur; v != 0; v = tree.nodes[v].parent)
      path_mask |= rs.block_pair_mask(tree.nodes[v].edge_rect);
    // Children are spawned on disjoint x-windows: each x is routed to the
    // first cover rectangle whose window contains it. This keeps the node
    // point sets product-shaped and gives every input a single descent path.
    BitVec routed{uint32_t(pts.xsize)};
    for (uint32_t id : cover) {
      CoverTreeNode child;
      child.parent = cur;
      child.edge_rect = int(id);
      uint32_t child_mask = path_mask | rs.block_pair_mask(id);
      child.block_depth = std::popcount(child_mask);
      // T_R = T cap ((X_R minus earlier windows) x (Y \ Y_R))
      child.points.xsize = pts.xsize;
      child.points.ysize = pts.ysize;
      child.points.rows.assign(pts.xsize, BitVec(uint32_t(pts.ysize)));
      for (uint64_t x = 0; x < pts.xsize; ++x) {
        if (!rs.xmask[id].get(uint32_t(x)) || routed.get(uint32_t(x))) continue;
        child.points.rows[x] = pts.rows[x] & ~rs.ymask[id];
      }
      routed |= rs.xmask[id];
      int idx = int(tree.nodes.size());
      tree.nodes[cur].children.push_back(idx);
      bool nonempty = child.points.any();
      tree.nodes.push_back(std::move(child));
      if (nonempty) leaves.push_back(idx);
    }
  }
  return tree;
}

CoverTreeProperties check_cover_tree(const CoverTree& tree, const RectSet& rs,
                                     const Triangle& t, const BitVec& xmask, const BitVec& ymask) {
  CoverTreeProperties props;
  PointSet all = PointSet::from_triangle(t, xmask, ymask);

  // property 1: edge labels cover the input point set
  for (uint64_t x = 0; x < all.xsize && props.covers; ++x) {
    std::vector<uint32_t> ys = all.rows[x].set_bits();
    for (uint32_t y : ys) {
      bool hit = false;
      for (size_t v = 1; v < tree.nodes.size() && !hit; ++v) {
        int id = tree.nodes[v].edge_rect;
        hit = rs.xmask[id].get(uint32_t(x)) && rs.ymask[id].get(y);
      }
      if (!hit) {
        props.covers = false;
        props.detail = "uncovered point";
        break;
      }
    }
  }

  // property 2: the nodes containing a point form a contiguous root chain
  for (uint64_t x = 0; x < all.xsize && props.nested; ++x) {
    for (uint32_t y : all.rows[x].set_bits()) {
      std::vector<int> holders;
      for (size_t v = 0; v < tree.nodes.size(); ++v)
        if (tree.nodes[v].points.member(x, y)) holders.push_back(int(v));
      // each holder's parent must also hold the point (except the root)
      for (int v : holders) {
        if (v == 0) continue;
        int p = tree.nodes[v].parent;
        if (!tree.nodes[p].points.member(x, y)) { props.nested = false; break; }
      }
      // holders must form a single downward path: at most one child holder
      // per holder
      for (int v : holders) {
        int holder_children = 0;
        for (int c : tree.nodes[v].children)
          if (tree.nodes[c].points.member(x, y)) holder_children++;
        if (holder_children > 1) { props.nested = false; break; }
      }
      if (!props.nested) { props.detail = "nesting violated"; break; }
    }
  }

  // property 3: every x with a nonempty slice descends along a single chain
  // of nodes, and the labels of its root-to-leaf path cover the slice
  for (uint64_t x = 0; x < all.xsize && props.unique_paths; ++x) {
    if (all.rows[x].none()) continue;
    // single descent: at most one child per node keeps a nonempty x-row
    for (size_t v = 0; v < tree.nodes.size(); ++v) {
      if (tree.nodes[v].points.rows[x].none()) continue;
      int live = 0;
      for (int c : tree.nodes[v].children)
        if (tree.nodes[c].points.rows[x].any()) live++;
      if (live > 1) {
        props.unique_paths = false;
        props.detail = "x descends into several children";
        break;
      }
    }
    if (!props.unique_paths) break;
    int covering_leaves = 0;
    for (size_t v = 0; v < tree.nodes.size(); ++v) {
      if (!tree.nodes[v].children.empty()) continue;  // leaves only
      BitVec covered{uint32_t(all.ysize)};
      for (int w = int(v); w != 0; w = tree.nodes[w].parent) {
        int id = tree.nodes[w].edge_rect;
        if (rs.xmask[id].get(uint32_t(x))) covered |= rs.ymask[id];
      }
      if (all.rows[x].subset_of(covered)) covering_leaves++;
    }
    if (covering_leaves < 1) {
      props.unique_paths = false;
      props.detail = "x without a covering path";
    }
  }

  // out-degree claim
  for (size_t v = 0; v < tree.nodes.size() && props.out_degree_ok; ++v) {
    if (tree.nodes[v].children.size() <= 1) continue;
    for (int c : tree.nodes[v].children)
      if (tree.nodes[c].block_depth <= tree.nodes[v].block_depth) {
        props.out_degree_ok = false;
        props.detail = "fan-out node with non-deeper child";
        break;
      }
  }
  return props;
}

// --- census -----------------------------------------------------------------------------

CensusResult block_depth_census(const CoverTree& tree, uint32_t n, int q, uint32_t s) {
  if (n < 16) throw std::invalid_argument("census: n below 16");
  // contract parent-child chains of equal block depth
  std::vector<bool> removed(tree.nodes.size(), false);
  std::vector<int> parent(tree.nodes.size());
  std::vector<std::vector<int>> children(tree.nodes.size());
  for (size_t v = 0; v < tree.nodes.size(); ++v) {
    parent[v] = tree.nodes[v].parent;
    children[v] = tree.nodes[v].children;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t v = 0; v < tree.nodes.size(); ++v) {
      if (removed[v] || children[v].size() != 1) continue;
      int c = children[v][0];
      if (tree.nodes[c].block_depth != tree.nodes[v].block_depth) continue;
      // splice v out, letting c take its place
      removed[v] = true;
      int p = parent[v];
      parent[c] = p;
      if (p >= 0) {
        for (auto& ch : children[p])
          if (ch == int(v)) ch = c;
      }
      changed = true;
    }
  }

  CensusResult res;
  double base = std::sqrt(double(n)) / 2.0;
  res.hypothesis_holds = 2.0 * double(q) * double(q) * double(s) <= std::sqrt(double(n)) / 4.0;
  std::map<int, uint64_t> counts;
  for (size_t v = 0; v < tree.nodes.size(); ++v)
    if (!removed[v]) counts[tree.nodes[v].block_depth]++;
  for (auto [d, c] : counts) {
    CensusRow row;
    row.depth = d;
    row.count = c;
    row.bound = std::pow(base, double(d));
    row.exceeded = double(c) > row.bound;
    if (row.exceeded) res.any_exceeded = true;
    res.rows.push_back(row);
  }
  return res;
}

// --- serialization ------------------------------------------------------------------------

void save_triangle_dag_json(const TriangleDag& dag, std::ostream& out) {
  nlohmann::json j;
  j["xsize"] = dag.xsize;
  j["ysize"] = dag.ysize;
  j["root"] = dag.root;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& nd : dag.nodes) {
    nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
    for (const auto& r : nd.tri.a) a.push_back(r.str());
    for (const auto& r : nd.tri.b) b.push_back(r.str());
    nodes.push_back({{"a", a}, {"b", b}, {"child0", nd.child0}, {"child1", nd.child1}, {"output", nd.output}});
  }
  j["nodes"] = std::move(nodes);
  out << j.dump(1) << "\n";
}

TriangleDag load_triangle_dag_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  TriangleDag dag;
  dag.xsize = j.at("xsize").get<uint64_t>();
  dag.ysize = j.at("ysize").get<uint64_t>();
  dag.root = j.at("root").get<int>();
  for (const auto& nj : j.at("nodes")) {
    TriangleDagNode nd;
    for (const auto& v : nj.at("a")) nd.tri.a.push_back(Rational::parse(v.get<std::string>()));
    for (const auto& v : nj.at("b")) nd.tri.b.push_back(Rational::parse(v.get<std::string>()));
    nd.child0 = nj.at("child0").get<int>();
    nd.child1 = nj.at("child1").get<int>();
    nd.output = nj.at("output").get<int>();
    if (nd.tri.a.size() != dag.xsize || nd.tri.b.size() != dag.ysize)
      throw std::invalid_argument("triangle DAG: score size mismatch");
    dag.nodes.push_back(std::move(nd));
  }
  return dag;
}

}  // namespace bclq
