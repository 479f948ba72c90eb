#pragma once

// Isomorphism testing and automorphism orbits.
//
// Both problems run on a *pair* of coloured graphs refined in lockstep:
// every round recolours each vertex by (colour, sorted neighbour colours)
// and ranks the signatures of both sides together, so colour ids stay
// comparable across the pair. A round that leaves the two sides with
// different colour-class sizes proves that no colour-preserving
// isomorphism exists below this node. Search individualises the lowest id
// of the first non-singleton class on the left and tries every member of
// that class on the right.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksym/errors.hpp"
#include "ksym/graph.hpp"

namespace ksym {

/// Total map on {0, ..., n-1}; image[v] is the image of v.
struct VertexMapping {
  std::vector<VertexId> image;

  VertexId operator()(VertexId v) const { return image[v]; }
  std::size_t size() const { return image.size(); }

  static VertexMapping identity(std::size_t n) {
    VertexMapping m;
    m.image.resize(n);
    std::iota(m.image.begin(), m.image.end(), VertexId{0});
    return m;
  }

  bool is_bijection() const {
    std::vector<char> seen(image.size(), 0);
    for (VertexId v : image) {
      if (v >= image.size() || seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  }

  VertexMapping inverse() const {
    VertexMapping inv;
    inv.image.resize(image.size());
    for (VertexId v = 0; v < image.size(); ++v) inv.image[image[v]] = v;
    return inv;
  }

  friend bool operator==(const VertexMapping&, const VertexMapping&) = default;
};

/// True when `m` is a bijection V(a) -> V(b) with {u,v} in E(a) iff {m(u),m(v)} in E(b).
inline bool is_isomorphism(const Graph& a, const Graph& b, const VertexMapping& m) {
  if (a.order() != b.order() || a.size() != b.size() || m.size() != a.order()) return false;
  if (!m.is_bijection()) return false;
  for (const Edge& e : a.edges()) {
    if (!b.has_edge(m(e.u), m(e.v))) return false;
  }
  return true;
}

inline bool is_automorphism(const Graph& g, const VertexMapping& m) { return is_isomorphism(g, g, m); }

struct OrbitPartition {
  /// Each block sorted ascending; blocks ordered by their smallest member.
  std::vector<std::vector<VertexId>> blocks;
  std::vector<std::size_t> block_of;

  /// Builds the partition whose blocks are the classes of `label`.
  static OrbitPartition from_labels(std::span<const std::size_t> label) {
    OrbitPartition p;
    p.block_of.assign(label.size(), 0);
    std::vector<std::size_t> slot(label.size(), SIZE_MAX);
    for (VertexId v = 0; v < label.size(); ++v) {
      std::size_t& s = slot[label[v]];
      if (s == SIZE_MAX) {
        s = p.blocks.size();
        p.blocks.emplace_back();
      }
      p.blocks[s].push_back(v);
      p.block_of[v] = s;
    }
    return p;
  }

  std::size_t min_block_size() const {
    std::size_t best = blocks.empty() ? 0 : SIZE_MAX;
    for (const auto& b : blocks) best = std::min(best, b.size());
    return best;
  }

  bool same_block(VertexId a, VertexId b) const { return block_of[a] == block_of[b]; }

  friend bool operator==(const OrbitPartition& a, const OrbitPartition& b) {
    return a.blocks == b.blocks;
  }
};

using Colouring = std::vector<std::uint32_t>;

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Joint dense ranking of two colourings; false when class sizes differ.
inline bool rank_jointly(Colouring& left, Colouring& right) {
  std::vector<std::uint32_t> values(left);
  values.insert(values.end(), right.begin(), right.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::int64_t> balance(values.size(), 0);
  auto rank = [&](std::uint32_t c) {
    return static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), c) - values.begin());
  };
  for (auto& c : left) {
    c = rank(c);
    ++balance[c];
  }
  for (auto& c : right) {
    c = rank(c);
    --balance[c];
  }
  return std::all_of(balance.begin(), balance.end(), [](std::int64_t b) { return b == 0; });
}

/// Lockstep colour refinement of two equally sized coloured graphs.
class PairRefiner {
 public:
  PairRefiner(const Graph& left, const Graph& right) : g_{&left, &right} {}

  std::size_t order() const { return g_[0]->order(); }

  /// Refines both colourings to their coarsest common equitable refinement.
  /// Returns false as soon as the two sides disagree.
  bool refine(Colouring& left, Colouring& right) const {
    Colouring* c[2] = {&left, &right};
    const std::size_t n = order();
    std::size_t colours = count_colours(left);
    std::vector<std::vector<std::uint32_t>> sig(2 * n);
    std::vector<std::uint32_t> idx(2 * n);
    while (true) {
      for (int side = 0; side < 2; ++side) {
        for (VertexId v = 0; v < n; ++v) {
          auto& s = sig[side * n + v];
          s.clear();
          s.push_back((*c[side])[v]);
          for (VertexId w : g_[side]->neighbors(v)) s.push_back((*c[side])[w]);
          std::sort(s.begin() + 1, s.end());
        }
      }
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return sig[a] < sig[b];
      });
      std::uint32_t next = 0;
      std::int64_t balance = 0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i > 0 && sig[idx[i]] != sig[idx[i - 1]]) {
          if (balance != 0) return false;
          ++next;
        }
        balance += idx[i] < n ? 1 : -1;
      }
      if (balance != 0) return false;
      next = 0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i > 0 && sig[idx[i]] != sig[idx[i - 1]]) ++next;
        const std::uint32_t slot = idx[i];
        (*c[slot < n ? 0 : 1])[slot < n ? slot : slot - n] = next;
      }
      const std::size_t now = static_cast<std::size_t>(next) + 1;
      if (n == 0 || now == colours) return true;
      colours = now;
    }
  }

  static std::size_t count_colours(const Colouring& c) {
    std::vector<std::uint32_t> v(c);
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  }

  /// Gives `v` a colour of its own, placed just before the rest of its class.
  static Colouring individualise(const Colouring& c, VertexId v) {
    Colouring out(c.size());
    for (VertexId x = 0; x < c.size(); ++x) out[x] = 2 * c[x] + (x == v ? 0 : 1);
    return out;
  }

  /// First non-singleton colour class, or nullopt when discrete.
  static std::optional<std::uint32_t> target_cell(const Colouring& c) {
    std::vector<std::uint32_t> count(c.size() + 1, 0);
    for (auto x : c) ++count[x];
    for (std::uint32_t colour = 0; colour < count.size(); ++colour) {
      if (count[colour] > 1) return colour;
    }
    return std::nullopt;
  }

  /// Depth-first search for colour-preserving isomorphisms left -> right.
  /// `visit` is called with each one found; returning false stops the search.
  /// Returns false when the visitor stopped it.
  template <typename Visit>
  bool search(Colouring left, Colouring right, Visit&& visit) const {
    if (!refine(left, right)) return true;
    const auto cell = target_cell(left);
    if (!cell) {
      VertexMapping m;
      m.image.resize(order());
      std::vector<VertexId> right_of(order());
      for (VertexId v = 0; v < order(); ++v) right_of[right[v]] = v;
      for (VertexId v = 0; v < order(); ++v) m.image[v] = right_of[left[v]];
      if (!is_isomorphism(*g_[0], *g_[1], m)) return true;
      return visit(std::move(m));
    }
    VertexId pivot = 0;
    while (left[pivot] != *cell) ++pivot;
    const Colouring left_next = individualise(left, pivot);
    for (VertexId w = 0; w < order(); ++w) {
      if (right[w] != *cell) continue;
      if (!search(left_next, individualise(right, w), visit)) return false;
    }
    return true;
  }

 private:
  const Graph* g_[2];
};

inline Colouring uniform_colouring(std::size_t n) { return Colouring(n, 0); }

inline bool denser_than_complement(const Graph& g) {
  const std::size_t n = g.order();
  return n > 1 && 4 * g.size() > n * (n - 1);
}

inline Graph complement(const Graph& g) {
  std::vector<Edge> e;
  for (VertexId u = 0; u < g.order(); ++u)
    for (VertexId v = u + 1; v < g.order(); ++v)
      if (!g.has_edge(u, v)) e.push_back({u, v});
  return Graph(g.order(), e);
}

}  // namespace detail

/// Colour-preserving isomorphism from (a, colours_a) to (b, colours_b), if any.
/// Colours are arbitrary integers compared by value across the two graphs.
inline std::optional<VertexMapping> find_isomorphism(const Graph& a, const Graph& b,
                                                     Colouring colours_a, Colouring colours_b) {
  if (a.order() != b.order() || a.size() != b.size()) return std::nullopt;
  if (colours_a.size() != a.order() || colours_b.size() != b.order()) {
    throw InputError("colouring length does not match the graph order");
  }
  if (!detail::rank_jointly(colours_a, colours_b)) return std::nullopt;
  // Same isomorphisms as the complements; refinement cost scales with edges.
  if (detail::denser_than_complement(a)) {
    return find_isomorphism(detail::complement(a), detail::complement(b), std::move(colours_a),
                            std::move(colours_b));
  }
  std::optional<VertexMapping> found;
  detail::PairRefiner(a, b).search(std::move(colours_a), std::move(colours_b),
                                   [&](VertexMapping m) {
                                     found = std::move(m);
                                     return false;
                                   });
  return found;
}

inline std::optional<VertexMapping> find_isomorphism(const Graph& a, const Graph& b) {
  return find_isomorphism(a, b, detail::uniform_colouring(a.order()),
                          detail::uniform_colouring(b.order()));
}

/// Exact orbit partition of the colour-preserving automorphism group.
inline OrbitPartition automorphism_orbits(const Graph& g, Colouring colours) {
  const std::size_t n = g.order();
  if (colours.size() != n) throw InputError("colouring length does not match the graph order");
  if (detail::denser_than_complement(g)) return automorphism_orbits(detail::complement(g), std::move(colours));
  detail::PairRefiner refiner(g, g);
  Colouring root = colours;
  Colouring mirror = colours;
  detail::rank_jointly(root, mirror);
  mirror = root;
  refiner.refine(root, mirror);

  detail::UnionFind orbits(n);
  std::vector<std::vector<VertexId>> cells(n);
  for (VertexId v = 0; v < n; ++v) cells[root[v]].push_back(v);
  for (const auto& cell : cells) {
    std::vector<VertexId> reps;
    for (VertexId v : cell) {
      bool merged = false;
      for (VertexId r : reps) {
        if (orbits.find(r) == orbits.find(v)) {
          merged = true;
          break;
        }
      }
      for (std::size_t i = 0; !merged && i < reps.size(); ++i) {
        const VertexId r = reps[i];
        refiner.search(detail::PairRefiner::individualise(root, r),
                       detail::PairRefiner::individualise(root, v), [&](VertexMapping m) {
                         for (VertexId x = 0; x < n; ++x) orbits.unite(x, m(x));
                         return false;
                       });
        merged = orbits.find(r) == orbits.find(v);
      }
      if (!merged) reps.push_back(v);
    }
  }
  std::vector<std::size_t> label(n);
  for (VertexId v = 0; v < n; ++v) label[v] = orbits.find(v);
  return OrbitPartition::from_labels(label);
}

inline OrbitPartition automorphism_orbits(const Graph& g) {
  return automorphism_orbits(g, detail::uniform_colouring(g.order()));
}

/// Every automorphism of g. Throws BudgetError past `cap` elements.
inline std::vector<VertexMapping> enumerate_automorphisms(const Graph& g, std::size_t cap = 100000) {
  std::vector<VertexMapping> all;
  bool over = false;
  detail::PairRefiner(g, g).search(detail::uniform_colouring(g.order()),
                                   detail::uniform_colouring(g.order()), [&](VertexMapping m) {
                                     if (all.size() == cap) {
                                       over = true;
                                       return false;
                                     }
                                     all.push_back(std::move(m));
                                     return true;
                                   });
  if (over) {
    throw BudgetError("automorphism group exceeds the enumeration cap of " + std::to_string(cap));
  }
  return all;
}

/// Orbits by exhaustive permutation search: for each vertex pair (u, v) a
/// plain backtracking over partial permutations, pruned only by adjacency
/// and degree consistency, decides whether some automorphism maps u to v.
/// Shares no code with the refinement engine; used as its test oracle.
inline OrbitPartition orbits_bruteforce(const Graph& g) {
  constexpr std::size_t kMaxOrder = 10;
  const std::size_t n = g.order();
  if (n > kMaxOrder) {
    throw BudgetError("orbits_bruteforce refuses graphs with more than " +
                      std::to_string(kMaxOrder) + " vertices (got " + std::to_string(n) + ")");
  }
  std::vector<VertexId> image(n);
  std::vector<char> used(n);
  // Assign vertices in the order u, then 0..n-1 skipping u.
  std::vector<VertexId> order(n);

  auto extend = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == n) return true;
    const VertexId x = order[depth];
    for (VertexId y = 0; y < n; ++y) {
      if (used[y] || g.neighbors(x).size() != g.neighbors(y).size()) continue;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) {
        ok = g.has_edge(x, order[d]) == g.has_edge(y, image[order[d]]);
      }
      if (!ok) continue;
      used[y] = 1;
      image[x] = y;
      if (self(self, depth + 1)) return true;
      used[y] = 0;
    }
    return false;
  };

  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  for (VertexId u = 0; u < n; ++u) {
    if (label[u] != u) continue;
    for (VertexId v = u + 1; v < n; ++v) {
      if (label[v] != v) continue;
      order[0] = u;
      for (VertexId x = 0, k = 1; x < n; ++x) {
        if (x != u) order[k++] = x;
      }
      std::fill(used.begin(), used.end(), 0);
      if (g.neighbors(u).size() != g.neighbors(v).size()) continue;
      used[v] = 1;
      image[u] = v;
      if (extend(extend, 1)) label[v] = u;
    }
  }
  return OrbitPartition::from_labels(label);
}

}  // namespace ksym
