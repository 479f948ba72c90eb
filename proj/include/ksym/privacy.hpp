#pragma once

// Checkers for the structural privacy properties:
//
//   k-degree         every degree value is shared by >= k vertices
//   k-neighbourhood  every rooted closed neighbourhood is shared by >= k vertices
//   k-automorphism   k-1 non-trivial automorphisms with pairwise distinct
//                    images at every vertex (fixed points allowed)
//   k-symmetry       every automorphism orbit has >= k vertices
//   (k,l)-anonymity  for every sybil candidate S, |S| <= l, each vertex
//                    outside S shares its distance vector to S with >= k-1
//                    others outside S; the adjacency variant compares
//                    adjacency bit-vectors instead
//
// Distance vectors are indexed by S in ascending id order; unreachable
// vertices get kUnreachable.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ksym/automorphism.hpp"
#include "ksym/errors.hpp"
#include "ksym/graph.hpp"
#include "ksym/rng.hpp"

namespace ksym {

enum class Property {
  kDegree,
  kNeighbourhood,
  kAutomorphismDef6,
  kSymmetry,
  klAnonymity,
  klAdjacencyAnonymity,
};

inline std::string to_string(Property p) {
  switch (p) {
    case Property::kDegree: return "k-degree";
    case Property::kNeighbourhood: return "k-neighbourhood";
    case Property::kAutomorphismDef6: return "k-automorphism";
    case Property::kSymmetry: return "k-symmetry";
    case Property::klAnonymity: return "kl-anonymity";
    case Property::klAdjacencyAnonymity: return "kl-adjacency-anonymity";
  }
  return "?";
}

inline Property property_from_string(const std::string& s) {
  for (Property p : {Property::kDegree, Property::kNeighbourhood, Property::kAutomorphismDef6,
                     Property::kSymmetry, Property::klAnonymity, Property::klAdjacencyAnonymity}) {
    if (to_string(p) == s) return p;
  }
  throw InputError("unknown property '" + s + "'");
}

struct PropertyReport {
  Property property = Property::kSymmetry;
  std::size_t k = 1;
  std::optional<std::size_t> l;
  bool holds = true;
  /// Present exactly when holds is false.
  std::optional<std::string> witness;
  /// Monte-Carlo verdicts only: number of sampled sybil sets. holds=true then
  /// means "no violation found in that many samples".
  std::optional<std::size_t> samples;
};

struct EnumerationBudget {
  /// Upper bound on the number of candidate sybil sets examined exactly.
  std::uint64_t max_subsets = 20'000'000;
  /// Upper bound on automorphisms materialised for the k-automorphism check.
  std::size_t max_automorphisms = 200'000;
};

// -- k-degree ---------------------------------------------------------------

/// Size of the rarest degree class (0 for the empty graph).
inline std::size_t max_k_degree(const Graph& g) {
  if (g.order() == 0) return 0;
  std::vector<std::size_t> count(g.order(), 0);
  for (VertexId v = 0; v < g.order(); ++v) ++count[g.neighbors(v).size()];
  std::size_t best = SIZE_MAX;
  for (std::size_t c : count)
    if (c > 0) best = std::min(best, c);
  return best;
}

// -- k-neighbourhood --------------------------------------------------------

/// Classes of vertices whose closed neighbourhoods are isomorphic with the
/// root mapped to the root.
inline std::vector<std::vector<VertexId>> neighbourhood_classes(const Graph& g) {
  struct Rooted {
    Graph graph;
    Colouring colours;
    std::vector<std::size_t> invariant;
  };
  std::vector<Rooted> rooted;
  rooted.reserve(g.order());
  for (VertexId v = 0; v < g.order(); ++v) {
    std::vector<VertexId> members(g.neighbors(v).begin(), g.neighbors(v).end());
    members.push_back(v);
    auto sub = induced_subgraph(g, VertexSet(std::move(members)));
    Colouring colours(sub.graph.order(), 0);
    std::vector<std::size_t> degs = degrees(sub.graph);
    for (VertexId i = 0; i < sub.to_parent.size(); ++i) {
      if (sub.to_parent[i] == v) colours[i] = 1;
    }
    std::sort(degs.begin(), degs.end());
    degs.push_back(sub.graph.size());
    rooted.push_back({std::move(sub.graph), std::move(colours), std::move(degs)});
  }
  std::vector<std::vector<VertexId>> classes;
  std::vector<VertexId> reps;
  for (VertexId v = 0; v < g.order(); ++v) {
    bool placed = false;
    for (std::size_t c = 0; c < classes.size() && !placed; ++c) {
      const Rooted& a = rooted[reps[c]];
      const Rooted& b = rooted[v];
      if (a.invariant != b.invariant) continue;
      if (find_isomorphism(a.graph, b.graph, a.colours, b.colours)) {
        classes[c].push_back(v);
        placed = true;
      }
    }
    if (!placed) {
      classes.push_back({v});
      reps.push_back(v);
    }
  }
  return classes;
}

inline std::size_t max_k_neighbourhood(const Graph& g) {
  std::size_t best = g.order() == 0 ? 0 : SIZE_MAX;
  for (const auto& c : neighbourhood_classes(g)) best = std::min(best, c.size());
  return best;
}

// -- k-symmetry -------------------------------------------------------------

inline bool is_k_symmetric(const Graph& g, std::size_t k) {
  if (k < 1) throw InputError("k must be at least 1");
  return automorphism_orbits(g).min_block_size() >= k || g.order() == 0;
}

// -- k-automorphism as literally defined (fixed points allowed) -------------

inline bool is_k_automorphic_def6(const Graph& g, std::size_t k,
                                  const EnumerationBudget& budget = {}) {
  if (k < 1) throw InputError("k must be at least 1");
  if (k == 1) return true;
  std::vector<VertexMapping> nontrivial;
  const auto identity = VertexMapping::identity(g.order());
  for (auto& m : enumerate_automorphisms(g, budget.max_automorphisms)) {
    if (m != identity) nontrivial.push_back(std::move(m));
  }
  const std::size_t need = k - 1;
  if (nontrivial.size() < need) return false;
  auto compatible = [&](std::size_t a, std::size_t b) {
    for (VertexId v = 0; v < g.order(); ++v) {
      if (nontrivial[a](v) == nontrivial[b](v)) return false;
    }
    return true;
  };
  std::vector<std::size_t> chosen;
  auto grow = [&](auto&& self, std::size_t from) -> bool {
    if (chosen.size() == need) return true;
    for (std::size_t i = from; i < nontrivial.size(); ++i) {
      if (nontrivial.size() - i < need - chosen.size()) return false;
      bool ok = true;
      for (std::size_t c : chosen) ok = ok && compatible(c, i);
      if (!ok) continue;
      chosen.push_back(i);
      if (self(self, i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return grow(grow, 0);
}

// -- (k,l)-anonymity --------------------------------------------------------

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Breadth-first distances between all pairs.
inline std::vector<std::vector<std::uint32_t>> all_pairs_distances(const Graph& g) {
  const std::size_t n = g.order();
  std::vector<std::vector<std::uint32_t>> dist(n, std::vector<std::uint32_t>(n, kUnreachable));
  std::vector<VertexId> queue(n);
  for (VertexId s = 0; s < n; ++s) {
    auto& d = dist[s];
    std::size_t head = 0, tail = 0;
    d[s] = 0;
    queue[tail++] = s;
    while (head < tail) {
      const VertexId x = queue[head++];
      for (VertexId y : g.neighbors(x)) {
        if (d[y] == kUnreachable) {
          d[y] = d[x] + 1;
          queue[tail++] = y;
        }
      }
    }
  }
  return dist;
}

namespace detail {

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t r, std::uint64_t cap) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  long double acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * static_cast<long double>(n - r + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(acc + 0.5L);
}

/// Evaluates one sybil candidate set; returns a witness on violation.
class KlEvaluator {
 public:
  KlEvaluator(const Graph& g, std::size_t k, bool adjacency_only)
      : n_(g.order()), k_(k), adjacency_(adjacency_only), dist_(all_pairs_distances(g)) {}

  std::optional<std::string> violation(std::span<const VertexId> sybils) {
    in_s_.assign(n_, 0);
    for (VertexId s : sybils) in_s_[s] = 1;
    rows_.clear();
    for (VertexId u = 0; u < n_; ++u) {
      if (in_s_[u]) continue;
      std::vector<std::uint32_t> key;
      key.reserve(sybils.size() + 1);
      for (VertexId s : sybils) {
        const std::uint32_t d = dist_[s][u];
        key.push_back(adjacency_ ? static_cast<std::uint32_t>(d == 1) : d);
      }
      key.push_back(u);
      rows_.push_back(std::move(key));
    }
    std::sort(rows_.begin(), rows_.end());
    const std::size_t width = sybils.size();
    for (std::size_t i = 0; i < rows_.size();) {
      std::size_t j = i;
      while (j < rows_.size() &&
             std::equal(rows_[i].begin(), rows_[i].begin() + width, rows_[j].begin())) {
        ++j;
      }
      if (j - i < k_) return describe(sybils, rows_[i].back(), j - i);
      i = j;
    }
    return std::nullopt;
  }

 private:
  std::string describe(std::span<const VertexId> sybils, VertexId u, std::size_t size) const {
    std::string s = "S={";
    for (std::size_t i = 0; i < sybils.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(sybils[i]);
    }
    return s + "}: vertex " + std::to_string(u) + " shares its " +
           (adjacency_ ? "adjacency" : "distance") + " vector with " +
           std::to_string(size - 1) + " other vertices";
  }

  std::size_t n_;
  std::size_t k_;
  bool adjacency_;
  std::vector<std::vector<std::uint32_t>> dist_;
  std::vector<char> in_s_;
  std::vector<std::vector<std::uint32_t>> rows_;
};

inline std::optional<std::string> kl_violation(const Graph& g, std::size_t k, std::size_t l,
                                               bool adjacency_only,
                                               const EnumerationBudget& budget) {
  if (k < 1) throw InputError("k must be at least 1");
  if (l < 1) throw InputError("l must be at least 1");
  const std::size_t n = g.order();
  const std::size_t top = std::min(l, n);
  std::uint64_t total = 0;
  for (std::size_t i = 1; i <= top; ++i) {
    total += binomial_capped(n, i, budget.max_subsets);
    if (total > budget.max_subsets) {
      throw BudgetError("exact (k,l) check needs more than max_subsets=" +
                        std::to_string(budget.max_subsets) + " sybil sets (n=" +
                        std::to_string(n) + ", l=" + std::to_string(l) + ")");
    }
  }
  KlEvaluator eval(g, k, adjacency_only);
  std::vector<VertexId> combo;
  for (std::size_t size = 1; size <= top; ++size) {
    combo.resize(size);
    std::iota(combo.begin(), combo.end(), VertexId{0});
    while (true) {
      if (auto w = eval.violation(combo)) return w;
      // next combination in lexicographic order
      std::size_t i = size;
      while (i > 0 && combo[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline bool is_kl_anonymous(const Graph& g, std::size_t k, std::size_t l,
                            const EnumerationBudget& budget = {}) {
  return !detail::kl_violation(g, k, l, false, budget);
}

inline bool is_kl_adjacency_anonymous(const Graph& g, std::size_t k, std::size_t l,
                                      const EnumerationBudget& budget = {}) {
  return !detail::kl_violation(g, k, l, true, budget);
}

/// Monte-Carlo (k,l) check over `samples` random sybil sets of uniformly
/// random size in [1, l]. One-sided: a violation is definitive, its absence
/// is not.
inline PropertyReport sample_kl(const Graph& g, std::size_t k, std::size_t l, bool adjacency_only,
                                std::size_t samples, std::uint64_t seed) {
  if (k < 1 || l < 1) throw InputError("k and l must be at least 1");
  PropertyReport r;
  r.property = adjacency_only ? Property::klAdjacencyAnonymity : Property::klAnonymity;
  r.k = k;
  r.l = l;
  r.samples = samples;
  const std::size_t n = g.order();
  if (n == 0) return r;
  detail::KlEvaluator eval(g, k, adjacency_only);
  Rng rng(seed);
  std::vector<VertexId> all(n);
  std::iota(all.begin(), all.end(), VertexId{0});
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t size = 1 + rng.below(std::min(l, n));
    for (std::size_t j = 0; j < size; ++j) std::swap(all[j], all[j + rng.below(n - j)]);
    std::vector<VertexId> s(all.begin(), all.begin() + size);
    std::sort(s.begin(), s.end());
    if (auto w = eval.violation(s)) {
      r.holds = false;
      r.witness = std::move(w);
      return r;
    }
  }
  return r;
}

/// Exact check with a witness on failure.
inline PropertyReport check_property(const Graph& g, Property p, std::size_t k,
                                     std::optional<std::size_t> l = std::nullopt,
                                     const EnumerationBudget& budget = {}) {
  if (k < 1) throw InputError("k must be at least 1");
  PropertyReport r;
  r.property = p;
  r.k = k;
  r.l = l;
  auto fail = [&](std::string w) {
    r.holds = false;
    r.witness = std::move(w);
  };
  switch (p) {
    case Property::kDegree: {
      std::vector<std::vector<VertexId>> by_degree(g.order());
      for (VertexId v = 0; v < g.order(); ++v) by_degree[g.neighbors(v).size()].push_back(v);
      for (std::size_t d = 0; d < by_degree.size(); ++d) {
        const auto& cls = by_degree[d];
        if (!cls.empty() && cls.size() < k) {
          fail("degree " + std::to_string(d) + " is held by " + std::to_string(cls.size()) +
               " vertices, e.g. vertex " + std::to_string(cls.front()));
          break;
        }
      }
      break;
    }
    case Property::kNeighbourhood:
      for (const auto& cls : neighbourhood_classes(g)) {
        if (cls.size() < k) {
          fail("vertex " + std::to_string(cls.front()) + " has a neighbourhood shared by " +
               std::to_string(cls.size()) + " vertices");
          break;
        }
      }
      break;
    case Property::kAutomorphismDef6:
      if (!is_k_automorphic_def6(g, k, budget)) {
        fail("no " + std::to_string(k - 1) +
             " non-trivial automorphisms with pairwise distinct images exist");
      }
      break;
    case Property::kSymmetry: {
      const auto orbits = automorphism_orbits(g);
      for (const auto& b : orbits.blocks) {
        if (b.size() < k) {
          fail("vertex " + std::to_string(b.front()) + " has an orbit of size " +
               std::to_string(b.size()));
          break;
        }
      }
      break;
    }
    case Property::klAnonymity:
    case Property::klAdjacencyAnonymity: {
      if (!l) throw InputError(to_string(p) + " needs l");
      if (auto w = detail::kl_violation(g, k, *l, p == Property::klAdjacencyAnonymity, budget)) {
        fail(std::move(*w));
      }
      break;
    }
  }
  return r;
}

}  // namespace ksym
