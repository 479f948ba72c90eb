#pragma once

// K-Match: pad the graph with dummies to r*k vertices, arrange them in an
// r x k vertex alignment table, then add every shifted copy
// (v[i][j+t], v[p][q+t]) of every edge. The row rotations
// gamma_t(v[i][j]) = v[i][j+t mod k] are then automorphisms without fixed
// points, so every orbit has at least k members.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ksym/automorphism.hpp"
#include "ksym/errors.hpp"
#include "ksym/graph.hpp"
#include "ksym/rng.hpp"

namespace ksym {

struct VertexAlignmentTable {
  std::size_t k = 0;
  /// rows[i][j] is the vertex in row i, column j.
  std::vector<std::vector<VertexId>> rows;
  /// Padding vertices; always the ids original_order .. r*k-1.
  VertexSet dummies;

  std::size_t row_count() const { return rows.size(); }
  std::size_t order() const { return rows.size() * k; }

  struct Cell {
    std::uint32_t row;
    std::uint32_t col;
  };

  /// cell_of()[v] is the position of vertex v. Assumes validate() passed.
  std::vector<Cell> cell_of() const {
    std::vector<Cell> out(order());
    for (std::uint32_t i = 0; i < rows.size(); ++i)
      for (std::uint32_t j = 0; j < k; ++j) out[rows[i][j]] = {i, j};
    return out;
  }

  /// Throws InputError unless the table is a bijection onto {0..rk-1} whose
  /// dummies are exactly the ids from `original_order` up.
  void validate(std::size_t original_order) const {
    if (k < 2) throw InputError("alignment table needs k >= 2");
    const std::size_t total = order();
    if (total < original_order) throw InputError("alignment table has fewer cells than vertices");
    if (total - original_order >= k && original_order > 0) {
      throw InputError("alignment table has a row made only of padding");
    }
    std::vector<char> seen(total, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != k) {
        throw InputError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                         " cells, expected " + std::to_string(k));
      }
      for (VertexId v : rows[i]) {
        if (v >= total) throw InputError("cell id " + std::to_string(v) + " out of range");
        if (seen[v]++) throw InputError("vertex " + std::to_string(v) + " appears twice");
      }
    }
    if (dummies.size() != total - original_order) {
      throw InputError("dummy list has " + std::to_string(dummies.size()) + " ids, expected " +
                       std::to_string(total - original_order));
    }
    for (VertexId d : dummies) {
      if (d < original_order || d >= total) {
        throw InputError("dummy id " + std::to_string(d) + " is not a padding id");
      }
    }
  }

  /// gamma_t for t = 1..k-1.
  std::vector<VertexMapping> rotations() const {
    std::vector<VertexMapping> out;
    for (std::size_t t = 1; t < k; ++t) {
      VertexMapping m{std::vector<VertexId>(order())};
      for (const auto& row : rows)
        for (std::size_t j = 0; j < k; ++j) m.image[row[j]] = row[(j + t) % k];
      out.push_back(std::move(m));
    }
    return out;
  }

  friend bool operator==(const VertexAlignmentTable&, const VertexAlignmentTable&) = default;
};

struct KMatchResult {
  Graph graph_in;
  Graph graph_out;
  VertexAlignmentTable vat;
  std::vector<Edge> added_edges;
  std::vector<VertexMapping> gamma;
};

struct KMatchOptions {
  /// Row-swap proposals per vertex in the alignment hill climb.
  std::size_t swap_proposals_per_vertex = 200;
  std::size_t refinement_passes = 8;
  /// Coarsening stops once the graph has at most this many vertices per part.
  std::size_t coarsen_until_per_part = 8;
};

namespace detail {

inline Graph pad_graph(const Graph& g, std::size_t total) {
  if (total == g.order()) return g;
  const auto e = g.edges();
  return Graph(total, e);
}

// Weighted graph for the coarsening hierarchy.
struct WeightedGraph {
  std::vector<std::size_t> vertex_weight;
  std::vector<std::map<VertexId, std::size_t>> adj;

  std::size_t order() const { return vertex_weight.size(); }
};

inline WeightedGraph to_weighted(const Graph& g) {
  WeightedGraph w;
  w.vertex_weight.assign(g.order(), 1);
  w.adj.resize(g.order());
  for (const Edge& e : g.edges()) {
    w.adj[e.u][e.v] = 1;
    w.adj[e.v][e.u] = 1;
  }
  return w;
}

// One heavy-edge matching step. Returns the coarse graph and the map from
// fine vertex to coarse vertex.
inline std::pair<WeightedGraph, std::vector<VertexId>> coarsen_once(const WeightedGraph& g,
                                                                   std::size_t max_weight, Rng& rng) {
  const std::size_t n = g.order();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<VertexId>(order));
  constexpr VertexId kNone = ~VertexId{0};
  std::vector<VertexId> mate(n, kNone);
  for (VertexId v : order) {
    if (mate[v] != kNone) continue;
    VertexId best = v;
    std::size_t best_w = 0;
    for (auto [u, w] : g.adj[v]) {
      if (mate[u] != kNone || g.vertex_weight[u] + g.vertex_weight[v] > max_weight) continue;
      if (w > best_w) {
        best = u;
        best_w = w;
      }
    }
    mate[v] = best;
    mate[best] = v;
  }
  std::vector<VertexId> coarse_of(n, kNone);
  VertexId next = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (coarse_of[v] != kNone) continue;
    coarse_of[v] = next;
    coarse_of[mate[v]] = next;
    ++next;
  }
  WeightedGraph c;
  c.vertex_weight.assign(next, 0);
  c.adj.resize(next);
  for (VertexId v = 0; v < n; ++v) {
    c.vertex_weight[coarse_of[v]] += g.vertex_weight[v];
    for (auto [u, w] : g.adj[v]) {
      const VertexId a = coarse_of[v];
      const VertexId b = coarse_of[u];
      if (a != b) c.adj[a][b] += w;
    }
  }
  return {std::move(c), std::move(coarse_of)};
}

// Greedy graph growing on the coarsest graph: part p absorbs the frontier
// vertex most connected to it until it reaches the target weight.
inline std::vector<std::uint32_t> grow_parts(const WeightedGraph& g, std::size_t k, std::size_t target,
                                            Rng& rng) {
  const std::size_t n = g.order();
  constexpr std::uint32_t kFree = ~std::uint32_t{0};
  std::vector<std::uint32_t> part(n, kFree);
  std::size_t unassigned = n;
  for (std::uint32_t p = 0; p + 1 < k && unassigned > 0; ++p) {
    std::vector<std::size_t> gain(n, 0);
    std::size_t weight = 0;
    while (weight < target && unassigned > 0) {
      VertexId pick = 0;
      bool found = false;
      std::size_t best_gain = 0;
      for (VertexId v = 0; v < n; ++v) {
        if (part[v] != kFree || g.vertex_weight[v] + weight > target + target / 4) continue;
        if (!found || gain[v] > best_gain) {
          pick = v;
          best_gain = gain[v];
          found = true;
        }
      }
      if (!found) break;
      if (best_gain == 0) {
        // New component: start from a random free vertex.
        std::vector<VertexId> free;
        for (VertexId v = 0; v < n; ++v)
          if (part[v] == kFree && g.vertex_weight[v] + weight <= target + target / 4) free.push_back(v);
        pick = free[rng.below(free.size())];
      }
      part[pick] = p;
      weight += g.vertex_weight[pick];
      --unassigned;
      for (auto [u, w] : g.adj[pick]) gain[u] += w;
    }
  }
  for (auto& p : part)
    if (p == kFree) p = static_cast<std::uint32_t>(k - 1);
  return part;
}

// Exact balance, then pairwise-swap refinement of the edge cut.
inline void balance_and_refine(const Graph& g, std::vector<std::uint32_t>& part, std::size_t k,
                               std::size_t passes) {
  const std::size_t n = g.order();
  const std::size_t target = n / k;
  std::vector<std::vector<std::int64_t>> conn(n, std::vector<std::int64_t>(k, 0));
  for (const Edge& e : g.edges()) {
    ++conn[e.u][part[e.v]];
    ++conn[e.v][part[e.u]];
  }
  std::vector<std::size_t> size(k, 0);
  for (auto p : part) ++size[p];
  auto move = [&](VertexId v, std::uint32_t to) {
    const std::uint32_t from = part[v];
    for (VertexId u : g.neighbors(v)) {
      --conn[u][from];
      ++conn[u][to];
    }
    --size[from];
    ++size[to];
    part[v] = to;
  };

  for (;;) {
    std::uint32_t over = 0;
    while (over < k && size[over] <= target) ++over;
    if (over == k) break;
    VertexId best_v = 0;
    std::uint32_t best_to = 0;
    std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
    for (VertexId v = 0; v < n; ++v) {
      if (part[v] != over) continue;
      for (std::uint32_t to = 0; to < k; ++to) {
        if (size[to] >= target) continue;
        const std::int64_t gain = conn[v][to] - conn[v][over];
        if (gain > best_gain) {
          best_gain = gain;
          best_v = v;
          best_to = to;
        }
      }
    }
    move(best_v, best_to);
  }

  for (std::size_t pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (VertexId a = 0; a < n; ++a) {
      const std::uint32_t pa = part[a];
      std::int64_t best_gain = 0;
      VertexId best_b = a;
      for (VertexId b = 0; b < n; ++b) {
        const std::uint32_t pb = part[b];
        if (pb == pa) continue;
        const std::int64_t gain = conn[a][pb] - conn[a][pa] + conn[b][pa] - conn[b][pb] -
                                  2 * static_cast<std::int64_t>(g.has_edge(a, b));
        if (gain > best_gain) {
          best_gain = gain;
          best_b = b;
        }
      }
      if (best_b != a) {
        const std::uint32_t pb = part[best_b];
        move(a, pb);
        move(best_b, pa);
        improved = true;
      }
    }
    if (!improved) break;
  }
}

/// k exactly balanced groups with a small edge cut. n must be a multiple of k.
inline std::vector<std::uint32_t> partition_balanced(const Graph& g, std::size_t k, Rng& rng,
                                                    const KMatchOptions& opt) {
  const std::size_t n = g.order();
  const std::size_t target = n / k;
  std::vector<WeightedGraph> levels{to_weighted(g)};
  std::vector<std::vector<VertexId>> maps;
  const std::size_t stop = std::max<std::size_t>(k * opt.coarsen_until_per_part, k);
  while (levels.back().order() > stop) {
    auto [coarse, map] = coarsen_once(levels.back(), std::max<std::size_t>(target / 2, 1), rng);
    if (coarse.order() * 10 > levels.back().order() * 9) break;
    levels.push_back(std::move(coarse));
    maps.push_back(std::move(map));
  }
  std::vector<std::uint32_t> part = grow_parts(levels.back(), k, target, rng);
  for (std::size_t lvl = maps.size(); lvl-- > 0;) {
    std::vector<std::uint32_t> fine(maps[lvl].size());
    for (VertexId v = 0; v < fine.size(); ++v) fine[v] = part[maps[lvl][v]];
    part = std::move(fine);
  }
  balance_and_refine(g, part, k, opt.refinement_passes);
  return part;
}

// Number of edges the closure adds for a given cell assignment, maintained
// incrementally under row swaps. Edges are grouped into shift orbits keyed
// by (row a, row b, column offset).
class OrbitCost {
 public:
  OrbitCost(const Graph& g, std::size_t r, std::size_t k, std::vector<VertexAlignmentTable::Cell> cell)
      : g_(g), r_(r), k_(k), cell_(std::move(cell)), count_(r * r * k, 0) {
    for (const Edge& e : g.edges()) add(e.u, e.v, +1);
  }

  std::int64_t total() const { return total_ - static_cast<std::int64_t>(g_.size()); }

  /// Swaps the cells of a and b (same column); returns the change in cost.
  std::int64_t swap(VertexId a, VertexId b) {
    const std::int64_t before = total_;
    touch(a, b, -1);
    std::swap(cell_[a], cell_[b]);
    touch(a, b, +1);
    return total_ - before;
  }

  const std::vector<VertexAlignmentTable::Cell>& cells() const { return cell_; }

 private:
  void touch(VertexId a, VertexId b, int sign) {
    for (VertexId u : g_.neighbors(a)) add(a, u, sign);
    for (VertexId u : g_.neighbors(b))
      if (u != a) add(b, u, sign);
  }

  std::size_t key(VertexId x, VertexId y) const {
    const auto cx = cell_[x];
    const auto cy = cell_[y];
    const std::size_t d1 = (cy.col + k_ - cx.col) % k_;
    const std::size_t d2 = (cx.col + k_ - cy.col) % k_;
    const std::size_t k1 = (cx.row * r_ + cy.row) * k_ + d1;
    const std::size_t k2 = (cy.row * r_ + cx.row) * k_ + d2;
    return std::min(k1, k2);
  }

  std::size_t orbit_size(VertexId x, VertexId y) const {
    const auto cx = cell_[x];
    const auto cy = cell_[y];
    const bool half = cx.row == cy.row && k_ % 2 == 0 && (cy.col + k_ - cx.col) % k_ == k_ / 2;
    return half ? k_ / 2 : k_;
  }

  void add(VertexId x, VertexId y, int sign) {
    auto& c = count_[key(x, y)];
    if (sign > 0) {
      if (c++ == 0) total_ += static_cast<std::int64_t>(orbit_size(x, y));
    } else {
      if (--c == 0) total_ -= static_cast<std::int64_t>(orbit_size(x, y));
    }
  }

  const Graph& g_;
  std::size_t r_;
  std::size_t k_;
  std::vector<VertexAlignmentTable::Cell> cell_;
  std::vector<std::uint32_t> count_;
  std::int64_t total_ = 0;
};

}  // namespace detail

/// Closure edge count for `vat` over `g` (padded to the table order).
inline std::size_t closure_cost(const Graph& g, const VertexAlignmentTable& vat) {
  const Graph padded = detail::pad_graph(g, vat.order());
  return static_cast<std::size_t>(
      detail::OrbitCost(padded, vat.row_count(), vat.k, vat.cell_of()).total());
}

inline VertexAlignmentTable build_vat(const Graph& g, std::size_t k, std::uint64_t rng_seed,
                                      const KMatchOptions& opt = {}) {
  if (k < 2) throw InputError("k must be at least 2, got " + std::to_string(k));
  const std::size_t n = g.order();
  const std::size_t r = std::max<std::size_t>((n + k - 1) / k, 1);
  const std::size_t total = r * k;
  std::vector<VertexId> pad;
  for (VertexId d = static_cast<VertexId>(n); d < total; ++d) pad.push_back(d);
  const Graph padded = detail::pad_graph(g, total);
  Rng rng(rng_seed);

  const auto part = detail::partition_balanced(padded, k, rng, opt);
  std::vector<std::vector<VertexId>> columns(k);
  for (VertexId v = 0; v < total; ++v) columns[part[v]].push_back(v);
  for (auto& col : columns) {
    std::stable_sort(col.begin(), col.end(), [&](VertexId a, VertexId b) {
      return padded.neighbors(a).size() > padded.neighbors(b).size();
    });
  }
  std::vector<VertexAlignmentTable::Cell> cell(total);
  for (std::uint32_t j = 0; j < k; ++j)
    for (std::uint32_t i = 0; i < r; ++i) cell[columns[j][i]] = {i, j};

  // Hill climb over same-column row swaps; only strict improvements stick.
  if (r > 1) {
    detail::OrbitCost cost(padded, r, k, std::move(cell));
    const std::size_t proposals = opt.swap_proposals_per_vertex * total;
    for (std::size_t step = 0; step < proposals; ++step) {
      const std::size_t j = rng.below(k);
      const std::size_t a = rng.below(r);
      std::size_t b = rng.below(r - 1);
      if (b >= a) ++b;
      const VertexId va = columns[j][a];
      const VertexId vb = columns[j][b];
      if (cost.swap(va, vb) < 0) {
        std::swap(columns[j][a], columns[j][b]);
      } else {
        cost.swap(va, vb);
      }
    }
  }

  VertexAlignmentTable vat;
  vat.k = k;
  vat.rows.assign(r, std::vector<VertexId>(k));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < r; ++i) vat.rows[i][j] = columns[j][i];
  vat.dummies = VertexSet(std::move(pad));
  return vat;
}

/// Adds every shift image of every edge until the edge set is closed under
/// all row rotations of `vat`.
/// `g` may be the original graph or one already padded to the table order.
inline KMatchResult edge_copy_closure(const Graph& g, const VertexAlignmentTable& vat) {
  vat.validate(g.order() == vat.order() ? vat.order() - vat.dummies.size() : g.order());
  const std::size_t k = vat.k;
  const auto cell = vat.cell_of();
  GraphBuilder b(vat.order());
  std::deque<Edge> work;
  for (const Edge& e : g.edges()) {
    b.add_edge(e.u, e.v);
    work.push_back(e);
  }
  std::vector<Edge> added;
  while (!work.empty()) {
    const Edge e = work.front();
    work.pop_front();
    const auto cu = cell[e.u];
    const auto cv = cell[e.v];
    for (std::size_t t = 1; t < k; ++t) {
      const VertexId x = vat.rows[cu.row][(cu.col + t) % k];
      const VertexId y = vat.rows[cv.row][(cv.col + t) % k];
      if (b.add_edge(x, y)) {
        added.push_back(make_edge(x, y));
        work.push_back(make_edge(x, y));
      }
    }
  }
  std::sort(added.begin(), added.end());
  KMatchResult res{g, b.build(), vat, std::move(added), vat.rotations()};
  return res;
}

inline KMatchResult kmatch(const Graph& g, std::size_t k, std::uint64_t rng_seed,
                           const KMatchOptions& opt = {}) {
  KMatchResult res = edge_copy_closure(g, build_vat(g, k, rng_seed, opt));
  for (const Edge& e : g.edges()) {
    if (!res.graph_out.has_edge(e.u, e.v)) throw std::logic_error("kmatch dropped an input edge");
  }
  return res;
}

struct ConditionReport {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string what) {
    ok = false;
    violations.push_back(std::move(what));
  }
};

/// Checks the input is contained in the output, the structural conditions
/// on the rotations (no fixed points, distinct images, composition) and
/// that every rotation is an automorphism of the output graph.
inline ConditionReport verify_kmatch_conditions(const KMatchResult& res, std::size_t max_reports = 20) {
  ConditionReport rep;
  auto report = [&](std::string s) {
    if (rep.violations.size() < max_reports) rep.fail(std::move(s));
    rep.ok = false;
  };
  const Graph& out = res.graph_out;
  const std::size_t k = res.vat.k;
  const std::size_t n = out.order();
  if (res.gamma.size() + 1 != k) {
    report("expected " + std::to_string(k - 1) + " rotations, got " + std::to_string(res.gamma.size()));
    return rep;
  }
  if (res.graph_in.order() > n) report("output has fewer vertices than the input");
  for (const Edge& e : res.graph_in.edges()) {
    if (e.v >= n || !out.has_edge(e.u, e.v)) {
      report("input edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") missing from output");
    }
  }
  for (const auto& gm : res.gamma) {
    if (gm.image.size() != n || !gm.is_bijection()) {
      report("rotation is not a bijection on the output vertex set");
      return rep;
    }
  }
  // gamma_0 is the identity; index t-1 holds gamma_t.
  auto apply = [&](std::size_t t, VertexId v) { return t % k == 0 ? v : res.gamma[t % k - 1].image[v]; };
  for (VertexId v = 0; v < n; ++v) {
    for (std::size_t i = 1; i < k; ++i) {
      if (apply(i, v) == v) report("2a: gamma_" + std::to_string(i) + " fixes " + std::to_string(v));
      for (std::size_t j = i; j < k; ++j) {
        if (j > i && apply(i, v) == apply(j, v)) {
          report("2b: gamma_" + std::to_string(i) + " and gamma_" + std::to_string(j) + " agree on " +
                 std::to_string(v));
        }
        const VertexId ij = apply(i, apply(j, v));
        const VertexId ji = apply(j, apply(i, v));
        if (ij != apply(i + j, v) || ji != apply(i + j, v)) {
          report("2c: gamma_" + std::to_string(i) + " and gamma_" + std::to_string(j) +
                 " do not compose at " + std::to_string(v));
        }
      }
    }
  }
  for (std::size_t t = 1; t < k; ++t) {
    for (const Edge& e : out.edges()) {
      const VertexId x = apply(t, e.u);
      const VertexId y = apply(t, e.v);
      if (!out.has_edge(x, y)) {
        report("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") has no image (" +
               std::to_string(x) + "," + std::to_string(y) + ") under t=" + std::to_string(t));
      }
    }
  }
  return rep;
}

}  // namespace ksym
