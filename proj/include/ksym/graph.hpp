#pragma once

// Undirected simple graphs on dense vertex ids {0, ..., n-1}, and the
// edge-list interchange format:
//
//   line 1   : vertex count n
//   each line: "u v" with u < v, 0-based
//   blank lines and lines starting with '#' are ignored

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ksym/errors.hpp"

namespace ksym {

using VertexId = std::uint32_t;

struct Edge {
  VertexId u;
  VertexId v;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Sorted, duplicate-free set of vertex ids.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<VertexId> ids) : VertexSet(std::vector<VertexId>(ids)) {}
  explicit VertexSet(std::vector<VertexId> ids) : members_(std::move(ids)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  bool contains(VertexId v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const VertexId> members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<VertexId> members_;
};

class Graph {
 public:
  Graph() = default;

  /// Edgeless graph on n vertices.
  explicit Graph(std::size_t n) : adjacency_(n) { build_matrix(); }

  /// Throws InputError on self-loops, duplicates or out-of-range endpoints.
  Graph(std::size_t n, std::span<const Edge> edges) : adjacency_(n) {
    for (const Edge& e : edges) {
      if (e.u >= n || e.v >= n) {
        throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") has an endpoint outside [0," + std::to_string(n) + ")");
      }
      if (e.u == e.v) throw InputError("self-loop at vertex " + std::to_string(e.u));
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& row : adjacency_) {
      std::sort(row.begin(), row.end());
      auto dup = std::adjacent_find(row.begin(), row.end());
      if (dup != row.end()) {
        throw InputError("duplicate edge incident to vertex " + std::to_string(*dup));
      }
    }
    edge_count_ = edges.size();
    build_matrix();
  }

  Graph(std::size_t n, std::initializer_list<Edge> edges)
      : Graph(n, std::span<const Edge>(edges.begin(), edges.size())) {}

  std::size_t order() const { return adjacency_.size(); }
  std::size_t size() const { return edge_count_; }

  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[v]; }

  bool has_edge(VertexId a, VertexId b) const {
    if (!matrix_.empty()) {
      const std::size_t bit = static_cast<std::size_t>(a) * order() + b;
      return (matrix_[bit >> 6] >> (bit & 63)) & 1U;
    }
    const auto& row = adjacency_[a];
    return std::binary_search(row.begin(), row.end(), b);
  }

  /// Edges with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (VertexId u = 0; u < order(); ++u) {
      for (VertexId v : adjacency_[u]) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adjacency_ == b.adjacency_; }

 private:
  // Dense adjacency bits for the pairwise lookups that dominate attack search.
  static constexpr std::size_t kMatrixLimit = 8192;

  void build_matrix() {
    const std::size_t n = order();
    if (n == 0 || n > kMatrixLimit) return;
    matrix_.assign((n * n + 63) / 64, 0);
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v : adjacency_[u]) {
        const std::size_t bit = static_cast<std::size_t>(u) * n + v;
        matrix_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
      }
    }
  }

  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::uint64_t> matrix_;
  std::size_t edge_count_ = 0;
};

/// Accumulates edges, silently ignoring duplicates.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n) : n_(n) {}
  explicit GraphBuilder(const Graph& g) : n_(g.order()) {
    for (const Edge& e : g.edges()) add_edge(e.u, e.v);
  }

  /// Returns true when the edge was not present before.
  bool add_edge(VertexId a, VertexId b) {
    if (a == b) throw InputError("self-loop at vertex " + std::to_string(a));
    if (a >= n_ || b >= n_) throw InputError("edge endpoint outside the vertex range");
    const Edge e = make_edge(a, b);
    if (!keys_.insert(key(e)).second) return false;
    edges_.push_back(e);
    return true;
  }

  bool has_edge(VertexId a, VertexId b) const { return keys_.count(key(make_edge(a, b))) != 0; }

  std::size_t order() const { return n_; }
  std::size_t size() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  Graph build() const { return Graph(n_, edges_); }

 private:
  static std::uint64_t key(const Edge& e) {
    return (static_cast<std::uint64_t>(e.u) << 32) | e.v;
  }

  std::size_t n_;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> keys_;
};

inline std::size_t degree(const Graph& g, VertexId v) {
  if (v >= g.order()) throw InputError("vertex " + std::to_string(v) + " out of range");
  return g.neighbors(v).size();
}

inline std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> out(g.order());
  for (VertexId v = 0; v < g.order(); ++v) out[v] = g.neighbors(v).size();
  return out;
}

struct InducedSubgraph {
  Graph graph;
  /// to_parent[i] is the id in the original graph of subgraph vertex i.
  std::vector<VertexId> to_parent;
};

/// Subgraph vertex i corresponds to the i-th smallest member of `s`.
inline InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s) {
  constexpr VertexId kAbsent = ~VertexId{0};
  std::vector<VertexId> local(g.order(), kAbsent);
  std::vector<VertexId> to_parent(s.begin(), s.end());
  for (VertexId i = 0; i < to_parent.size(); ++i) {
    if (to_parent[i] >= g.order()) {
      throw InputError("vertex " + std::to_string(to_parent[i]) + " is not in the graph");
    }
    local[to_parent[i]] = i;
  }
  std::vector<Edge> edges;
  for (VertexId i = 0; i < to_parent.size(); ++i) {
    for (VertexId w : g.neighbors(to_parent[i])) {
      if (local[w] != kAbsent && i < local[w]) edges.push_back({i, local[w]});
    }
  }
  return {Graph(to_parent.size(), edges), std::move(to_parent)};
}

/// Image of `g` under the bijection old id -> image[old id].
inline Graph relabel(const Graph& g, std::span<const VertexId> image) {
  if (image.size() != g.order()) throw InputError("relabelling has the wrong length");
  std::vector<Edge> edges;
  edges.reserve(g.size());
  for (const Edge& e : g.edges()) edges.push_back(make_edge(image[e.u], image[e.v]));
  return Graph(g.order(), edges);
}

namespace detail {

inline bool parse_unsigned(std::string_view token, std::uint64_t& out) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

}  // namespace detail

inline Graph parse_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_order = false;
  std::uint64_t n = 0;
  std::optional<GraphBuilder> builder;
  while (std::getline(in, line)) {
    ++line_no;
    auto parts = detail::split_ws(line);
    if (parts.empty() || parts.front().front() == '#') continue;
    if (!have_order) {
      if (parts.size() != 1 || !detail::parse_unsigned(parts[0], n)) {
        throw ParseError("expected the vertex count on the first line", line_no);
      }
      have_order = true;
      builder.emplace(static_cast<std::size_t>(n));
      continue;
    }
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    if (parts.size() != 2 || !detail::parse_unsigned(parts[0], u) ||
        !detail::parse_unsigned(parts[1], v)) {
      throw ParseError("expected \"u v\"", line_no);
    }
    if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u), line_no);
    if (u >= n || v >= n) throw ParseError("endpoint outside [0," + std::to_string(n) + ")", line_no);
    if (u > v) throw ParseError("edge endpoints must satisfy u < v", line_no);
    if (!builder->add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v))) {
      throw ParseError("duplicate edge " + std::to_string(u) + " " + std::to_string(v), line_no);
    }
  }
  if (!have_order) throw ParseError("missing vertex count", line_no);
  return builder->build();
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_edge_list(in);
}

inline std::string format_edge_list(const Graph& g) {
  std::string out = std::to_string(g.order()) + "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << format_edge_list(g);
}

}  // namespace ksym
