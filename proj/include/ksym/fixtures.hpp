#pragma once

// Small named graphs used throughout the tests and by `ksym fixtures`.
// Labels v1..vN map to ids 0..N-1.

#include <string>
#include <vector>

#include "ksym/graph.hpp"

namespace ksym::fixtures {

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) e.push_back({u, v});
  return Graph(n, e);
}

inline Graph cycle(std::size_t n) {
  std::vector<Edge> e;
  for (VertexId u = 0; u < n; ++u) e.push_back(make_edge(u, static_cast<VertexId>((u + 1) % n)));
  return Graph(n, e);
}

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (VertexId u = 0; u + 1 < n; ++u) e.push_back({u, u + 1});
  return Graph(n, e);
}

/// Star with centre 0 and leaves 1..leaves.
inline Graph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (VertexId v = 1; v <= leaves; ++v) e.push_back({0, v});
  return Graph(leaves + 1, e);
}

namespace detail {
inline Graph one_based(std::size_t n, std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Edge> e;
  for (auto [a, b] : pairs) e.push_back(make_edge(a - 1, b - 1));
  return Graph(n, e);
}
}  // namespace detail

/// Two 4-cycles-with-tail joined through v5-v6; mirror symmetric, so every
/// orbit has size >= 2, yet small sybil sets separate vertices by distance.
inline Graph incomparability_a() {
  return detail::one_based(10, {{1, 2}, {2, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 10},
                                {10, 9}, {9, 7}, {1, 3}, {3, 4}});
}

/// Bowtie: triangles v1v2v3 and v3v4v5 sharing v3.
inline Graph incomparability_b() {
  return detail::one_based(5, {{3, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 3}});
}

/// K4 on v1..v4, bridge v4v5, triangle v5v6v7.
inline Graph incomparability_c() {
  return detail::one_based(7, {{1, 2}, {2, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 5}, {4, 3},
                               {3, 1}, {1, 4}, {2, 3}});
}

/// Tree v1,v2 - v3 - u - v4 - v5,v6; u (id 6) is the only degree-2 vertex.
inline Graph automorphism_counterexample() {
  return detail::one_based(7, {{1, 3}, {2, 3}, {3, 7}, {7, 4}, {4, 5}, {4, 6}});
}

inline constexpr VertexId kCounterexampleCentre = 6;

/// Sybil-extended toy network with original users A..F (ids 0..5) and
/// sybils 1,2,3 (ids 6..8). Only the edges A-B and B-E are pinned by the
/// alignment-table walkthrough; the rest are illustrative.
inline Graph sybil_toy() {
  constexpr VertexId A = 0, B = 1, C = 2, D = 3, E = 4, F = 5, s1 = 6, s2 = 7, s3 = 8;
  return Graph(9, {make_edge(A, B), make_edge(A, C), make_edge(B, E), make_edge(C, D),
                   make_edge(D, F), make_edge(E, F), make_edge(s1, s2), make_edge(s2, s3),
                   make_edge(s1, E), make_edge(s3, E), make_edge(s2, F), make_edge(s3, F)});
}

/// Alignment table rows {1,F,D}, {C,A,B}, {2,3,E} over sybil_toy ids.
inline std::vector<std::vector<VertexId>> sybil_toy_table() { return {{6, 5, 3}, {2, 0, 1}, {7, 8, 4}}; }

struct NamedFixture {
  std::string name;
  Graph graph;
};

inline std::vector<NamedFixture> named_fixtures() {
  return {{"incomparability_a", incomparability_a()},
          {"incomparability_b", incomparability_b()},
          {"incomparability_c", incomparability_c()},
          {"automorphism_counterexample", automorphism_counterexample()}};
}

}  // namespace ksym::fixtures
