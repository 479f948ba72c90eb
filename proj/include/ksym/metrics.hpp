#pragma once

// Utility measures comparing a graph before and after anonymisation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ksym/errors.hpp"
#include "ksym/graph.hpp"

namespace ksym {

/// Triangles through each vertex, by merging sorted neighbour lists.
inline std::vector<std::uint64_t> triangles_per_vertex(const Graph& g) {
  std::vector<std::uint64_t> t(g.order(), 0);
  for (VertexId u = 0; u < g.order(); ++u) {
    const auto nu = g.neighbors(u);
    for (VertexId v : nu) {
      if (v <= u) continue;
      const auto nv = g.neighbors(v);
      auto a = std::upper_bound(nu.begin(), nu.end(), v);
      auto b = std::upper_bound(nv.begin(), nv.end(), v);
      while (a != nu.end() && b != nv.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++t[u];
          ++t[v];
          ++t[*a];
          ++a;
          ++b;
        }
      }
    }
  }
  return t;
}

inline std::uint64_t triangle_count(const Graph& g) {
  const auto t = triangles_per_vertex(g);
  return std::accumulate(t.begin(), t.end(), std::uint64_t{0}) / 3;
}

/// Checks every vertex triple; test oracle for triangle_count.
inline std::uint64_t triangles_bruteforce(const Graph& g) {
  if (g.order() > 200) throw BudgetError("brute-force triangle count limited to 200 vertices");
  std::uint64_t c = 0;
  for (VertexId a = 0; a < g.order(); ++a) {
    for (VertexId b = a + 1; b < g.order(); ++b) {
      if (!g.has_edge(a, b)) continue;
      for (VertexId d = b + 1; d < g.order(); ++d) c += g.has_edge(a, d) && g.has_edge(b, d);
    }
  }
  return c;
}

namespace detail {
inline double pairs(std::size_t d) { return d < 2 ? 0.0 : 0.5 * static_cast<double>(d) * static_cast<double>(d - 1); }
}  // namespace detail

/// 3 * triangles / connected triples; 0 without triples.
inline double global_clustering(const Graph& g) {
  double triples = 0;
  for (VertexId v = 0; v < g.order(); ++v) triples += detail::pairs(g.neighbors(v).size());
  if (triples == 0) return 0.0;
  return 3.0 * static_cast<double>(triangle_count(g)) / triples;
}

/// Mean over vertices of closed neighbour pairs / neighbour pairs; vertices
/// of degree < 2 contribute 0.
inline double avg_local_clustering(const Graph& g) {
  if (g.order() == 0) return 0.0;
  const auto t = triangles_per_vertex(g);
  double sum = 0;
  for (VertexId v = 0; v < g.order(); ++v) {
    const std::size_t d = g.neighbors(v).size();
    if (d >= 2) sum += static_cast<double>(t[v]) / detail::pairs(d);
  }
  return sum / static_cast<double>(g.order());
}

namespace detail {
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}
}  // namespace detail

/// Cosine between degree-frequency histograms (index = degree). Two empty
/// vertex sets count as identical.
inline double degree_cosine_similarity(const Graph& a, const Graph& b) {
  std::size_t top = 0;
  for (const Graph* g : {&a, &b}) {
    for (VertexId v = 0; v < g->order(); ++v) top = std::max(top, g->neighbors(v).size());
  }
  std::vector<double> ha(top + 1, 0), hb(top + 1, 0);
  for (VertexId v = 0; v < a.order(); ++v) ha[a.neighbors(v).size()] += 1;
  for (VertexId v = 0; v < b.order(); ++v) hb[b.neighbors(v).size()] += 1;
  return detail::cosine(ha, hb);
}

/// Cosine between the degree vectors of two graphs on the same vertex ids.
inline double degree_vector_cosine(const Graph& a, const Graph& b) {
  if (a.order() != b.order()) throw InputError("degree vectors need graphs of equal order");
  std::vector<double> da(a.order()), db(b.order());
  for (VertexId v = 0; v < a.order(); ++v) {
    da[v] = static_cast<double>(a.neighbors(v).size());
    db[v] = static_cast<double>(b.neighbors(v).size());
  }
  return detail::cosine(da, db);
}

struct UtilityReport {
  double gcc_before = 0;
  double gcc_after = 0;
  double avg_lcc_before = 0;
  double avg_lcc_after = 0;
  /// Degree-vector cosine over the compared vertex set.
  double degree_cosine = 1;
  /// Degree-histogram cosine over the compared vertex set.
  double degree_histogram_cosine = 1;
  std::size_t edges_added = 0;
  std::size_t edges_removed = 0;
};

/// Compares `before` with the subgraph of `after` induced on the ids of
/// `before`; vertices after.order() > before.order() (dummies) are left out
/// unless `include_extra` is set, in which case `before` is padded with
/// isolated vertices.
inline UtilityReport utility_report(const Graph& before, const Graph& after, bool include_extra = false) {
  if (after.order() < before.order()) throw InputError("anonymised graph lost vertices");
  Graph b = before;
  Graph a = after;
  if (include_extra) {
    b = Graph(after.order(), before.edges());
  } else if (after.order() > before.order()) {
    std::vector<VertexId> keep(before.order());
    std::iota(keep.begin(), keep.end(), VertexId{0});
    a = induced_subgraph(after, VertexSet(std::move(keep))).graph;
  }
  UtilityReport r;
  r.gcc_before = global_clustering(b);
  r.gcc_after = global_clustering(a);
  r.avg_lcc_before = avg_local_clustering(b);
  r.avg_lcc_after = avg_local_clustering(a);
  r.degree_cosine = degree_vector_cosine(b, a);
  r.degree_histogram_cosine = degree_cosine_similarity(b, a);
  for (const Edge& e : a.edges()) r.edges_added += !b.has_edge(e.u, e.v);
  for (const Edge& e : b.edges()) r.edges_removed += !a.has_edge(e.u, e.v);
  return r;
}

}  // namespace ksym
