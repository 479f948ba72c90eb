#pragma once

// Exact adversary oracle. A guess rho maps the knowledge vertices S u I
// injectively into the published graph; its attacker subgraph H(rho) has
// vertex set rho(S u I) and the published edges between images of pairs that
// are not both victims. Support and weights:
//
//   kIsomorphismClass  rho is in the support iff H(rho) is isomorphic to the
//                      knowledge graph (as unlabelled graphs).
//   kLabelled          rho is in the support iff rho itself is an isomorphism
//                      from the knowledge graph onto H(rho).
//
// Either way p is uniform over the support, and the success probability of
// victim u is the mass of guesses with rho(u) = phi(u).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ksym/attack.hpp"
#include "ksym/automorphism.hpp"
#include "ksym/errors.hpp"
#include "ksym/graph.hpp"
#include "ksym/rational.hpp"

namespace ksym {

enum class SupportRule { kIsomorphismClass, kLabelled };

inline std::string to_string(SupportRule r) {
  return r == SupportRule::kLabelled ? "labelled" : "isomorphism-class";
}

struct OracleBudget {
  std::size_t max_domain = 7;
  std::size_t max_order = 16;
  /// Only bounds the explicit mapping list of enumerate_consistent_mappings.
  std::size_t max_support = 5'000'000;
};

struct MappingDistribution {
  std::size_t domain_size = 0;
  /// Local ids of the knowledge graph.
  VertexSet sybils;
  VertexSet victims;
  /// Mapping m occupies images[m*domain_size, (m+1)*domain_size).
  std::vector<VertexId> images;
  /// Class of H(rho) up to isomorphism preserving the sybil/victim split.
  std::vector<std::size_t> class_index;
  std::vector<Rational> class_weight;

  std::size_t size() const { return class_index.size(); }
  std::span<const VertexId> mapping(std::size_t m) const {
    return std::span<const VertexId>(images).subspan(m * domain_size, domain_size);
  }
  const Rational& weight(std::size_t m) const { return class_weight[class_index[m]]; }
};

namespace detail {

struct OracleQuery {
  const Graph& g;
  const Graph& knowledge;
  /// Domain order: sybils first, then victims, as local knowledge ids.
  std::vector<VertexId> order;
  std::size_t sybil_count;
};

inline OracleQuery make_query(const Graph& g, const Graph& knowledge, const VertexSet& sybils,
                              const VertexSet& victims, const OracleBudget& budget) {
  const std::size_t d = knowledge.order();
  if (sybils.size() + victims.size() != d) throw InputError("sybils and victims must partition the knowledge graph");
  std::vector<char> seen(d, 0);
  for (const VertexSet* s : {&sybils, &victims}) {
    for (VertexId v : *s) {
      if (v >= d || seen[v]) throw InputError("sybils and victims must partition the knowledge graph");
      seen[v] = 1;
    }
  }
  for (const Edge& e : knowledge.edges()) {
    if (victims.contains(e.u) && victims.contains(e.v)) throw InputError("knowledge holds a victim-victim edge");
  }
  if (g.order() > 64) throw BudgetError("oracle supports at most 64 published vertices");
  if (d > budget.max_domain || g.order() > budget.max_order) {
    throw BudgetError("oracle budget exceeded: |S u I| = " + std::to_string(d) + ", |V| = " +
                      std::to_string(g.order()));
  }
  if (d > g.order()) throw InputError("knowledge larger than the published graph");
  std::vector<VertexId> order(sybils.begin(), sybils.end());
  order.insert(order.end(), victims.begin(), victims.end());
  return {g, knowledge, std::move(order), sybils.size()};
}

/// H on the image list `w` (position i images order[i]).
inline Graph attacker_subgraph(const Graph& g, std::span<const VertexId> w, std::size_t sybil_count) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < w.size(); ++i) {
    for (VertexId j = i + 1; j < w.size(); ++j) {
      if (i >= sybil_count && j >= sybil_count) continue;
      if (g.has_edge(w[i], w[j])) edges.push_back({i, j});
    }
  }
  return Graph(w.size(), edges);
}

/// Knowledge relabelled into domain order.
inline Graph knowledge_in_order(const OracleQuery& q) {
  std::vector<VertexId> pos(q.order.size());
  for (VertexId i = 0; i < q.order.size(); ++i) pos[q.order[i]] = i;
  return relabel(q.knowledge, pos);
}

inline std::vector<std::size_t> sorted_degrees(const Graph& g) {
  auto d = degrees(g);
  std::sort(d.begin(), d.end());
  return d;
}

/// Calls f(sybil images, victim images) for each split of a d-subset of V
/// whose attacker subgraph is isomorphic to the knowledge. Images are sorted.
template <typename F>
void for_each_class_split(const OracleQuery& q, F&& f) {
  const std::size_t n = q.g.order();
  const std::size_t d = q.order.size();
  const std::size_t s = q.sybil_count;
  const Graph k = knowledge_in_order(q);
  const auto k_degrees = sorted_degrees(k);
  std::vector<VertexId> w(d), a, b;
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + d, 1);
  std::vector<int> role(d, 0);
  do {
    std::size_t at = 0;
    std::vector<VertexId> subset;
    for (VertexId v = 0; v < n; ++v) {
      if (pick[v]) subset.push_back(v);
    }
    std::fill(role.begin(), role.end(), 0);
    std::fill(role.begin() + s, role.end(), 1);
    do {
      a.clear();
      b.clear();
      for (std::size_t i = 0; i < d; ++i) (role[i] ? b : a).push_back(subset[i]);
      at = 0;
      for (VertexId v : a) w[at++] = v;
      for (VertexId v : b) w[at++] = v;
      const Graph h = attacker_subgraph(q.g, w, s);
      if (h.size() != k.size() || sorted_degrees(h) != k_degrees) continue;
      if (!find_isomorphism(h, k)) continue;
      f(std::span<const VertexId>(a), std::span<const VertexId>(b), h);
    } while (std::next_permutation(role.begin(), role.end()));
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

/// Depth-first enumeration of labelled-rule guesses; f(images in domain order).
template <typename F>
void for_each_labelled_guess(const OracleQuery& q, F&& f) {
  const std::size_t d = q.order.size();
  const Graph k = knowledge_in_order(q);
  std::vector<VertexId> w(d);
  std::vector<char> used(q.g.order(), 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == d) {
      f(std::span<const VertexId>(w));
      return;
    }
    for (VertexId v = 0; v < q.g.order(); ++v) {
      if (used[v]) continue;
      bool ok = true;
      for (VertexId j = 0; j < i && ok; ++j) {
        if (i >= q.sybil_count && j >= q.sybil_count) continue;
        ok = q.g.has_edge(w[j], v) == k.has_edge(j, static_cast<VertexId>(i));
      }
      if (!ok) continue;
      used[v] = 1;
      w[i] = v;
      self(self, i + 1);
      used[v] = 0;
    }
  };
  rec(rec, 0);
}

/// Colour of each domain position: 0 sybil, 1 victim.
inline Colouring role_colours(std::size_t d, std::size_t sybil_count) {
  Colouring c(d, 1);
  std::fill(c.begin(), c.begin() + sybil_count, 0);
  return c;
}

}  // namespace detail

/// Support and uniform weights of the adversary's belief over guesses.
/// Throws BudgetError when the domain, graph or support exceeds `budget`.
inline MappingDistribution enumerate_consistent_mappings(const Graph& g_pub, const Graph& knowledge,
                                                         const VertexSet& sybils, const VertexSet& victims,
                                                         SupportRule rule = SupportRule::kIsomorphismClass,
                                                         const OracleBudget& budget = {}) {
  const detail::OracleQuery q = detail::make_query(g_pub, knowledge, sybils, victims, budget);
  const std::size_t d = q.order.size();
  const std::size_t s = q.sybil_count;
  const Colouring colours = detail::role_colours(d, s);
  MappingDistribution dist;
  dist.domain_size = d;
  dist.sybils = sybils;
  dist.victims = victims;
  std::vector<Graph> representatives;
  auto class_of = [&](const Graph& h) {
    for (std::size_t c = 0; c < representatives.size(); ++c) {
      if (find_isomorphism(h, representatives[c], colours, colours)) return c;
    }
    representatives.push_back(h);
    return representatives.size() - 1;
  };
  // Images are stored by local knowledge id, not domain position.
  std::vector<VertexId> local(d);
  auto push = [&](std::span<const VertexId> w, std::size_t c) {
    if (dist.size() >= budget.max_support) {
      throw BudgetError("support exceeds " + std::to_string(budget.max_support) + " mappings");
    }
    for (std::size_t i = 0; i < d; ++i) local[q.order[i]] = w[i];
    dist.images.insert(dist.images.end(), local.begin(), local.end());
    dist.class_index.push_back(c);
  };
  if (rule == SupportRule::kLabelled) {
    detail::for_each_labelled_guess(q, [&](std::span<const VertexId> w) {
      push(w, class_of(detail::attacker_subgraph(g_pub, w, s)));
    });
  } else {
    std::vector<VertexId> w(d);
    detail::for_each_class_split(q, [&](std::span<const VertexId> a, std::span<const VertexId> b, const Graph& h) {
      const std::size_t c = class_of(h);
      std::vector<VertexId> pa(a.begin(), a.end()), pb(b.begin(), b.end());
      do {
        do {
          std::copy(pa.begin(), pa.end(), w.begin());
          std::copy(pb.begin(), pb.end(), w.begin() + s);
          push(w, c);
        } while (std::next_permutation(pb.begin(), pb.end()));
      } while (std::next_permutation(pa.begin(), pa.end()));
    });
  }
  if (dist.size() == 0) throw EmptySupportError();
  dist.class_weight.assign(representatives.size(), Rational(1, static_cast<long long>(dist.size())));
  return dist;
}

/// Probability that the guess maps victim `u` (a local knowledge id) to `truth`.
inline Rational victim_success_probability(const MappingDistribution& dist, VertexId u, VertexId truth) {
  if (!dist.victims.contains(u)) throw InputError("vertex " + std::to_string(u) + " is not a victim");
  Rational p = 0;
  for (std::size_t m = 0; m < dist.size(); ++m) {
    if (dist.mapping(m)[u] == truth) p += dist.weight(m);
  }
  return p;
}

/// Success probability of each victim (in `victims` order) without
/// materialising the support. truth[i] is the published id of the i-th victim.
inline std::vector<Rational> victim_probabilities(const Graph& g_pub, const Graph& knowledge,
                                                  const VertexSet& sybils, const VertexSet& victims,
                                                  std::span<const VertexId> truth,
                                                  SupportRule rule = SupportRule::kIsomorphismClass,
                                                  const OracleBudget& budget = {}) {
  const detail::OracleQuery q = detail::make_query(g_pub, knowledge, sybils, victims, budget);
  if (truth.size() != victims.size()) throw InputError("one truth per victim required");
  const std::size_t s = q.sybil_count;
  const std::size_t m = victims.size();
  std::uint64_t total = 0;
  std::vector<std::uint64_t> hits(m, 0);
  if (rule == SupportRule::kLabelled) {
    detail::for_each_labelled_guess(q, [&](std::span<const VertexId> w) {
      ++total;
      for (std::size_t i = 0; i < m; ++i) hits[i] += w[s + i] == truth[i];
    });
  } else {
    // Every split carries s! m! guesses and a fraction 1/m of those sending
    // a given victim to a given member of the victim images.
    detail::for_each_class_split(q, [&](std::span<const VertexId>, std::span<const VertexId> b, const Graph&) {
      total += m;
      for (std::size_t i = 0; i < m; ++i) hits[i] += std::find(b.begin(), b.end(), truth[i]) != b.end();
    });
  }
  if (total == 0) throw EmptySupportError();
  std::vector<Rational> out;
  for (std::size_t i = 0; i < m; ++i) {
    out.emplace_back(static_cast<long long>(hits[i]), static_cast<long long>(total));
  }
  return out;
}

/// Oracle probabilities for an attack environment published as `g_pub`,
/// where phi[v] is the published id of sybil-extended vertex v.
inline std::vector<Rational> victim_probabilities(const Graph& g_pub, const AttackEnvironment& env,
                                                  std::span<const VertexId> phi,
                                                  SupportRule rule = SupportRule::kIsomorphismClass,
                                                  const OracleBudget& budget = {}) {
  const InducedSubgraph k = adversary_knowledge(env.g_plus, env.sybils, env.victims);
  std::vector<VertexId> s, v;
  std::vector<VertexId> truth;
  for (VertexId i = 0; i < k.to_parent.size(); ++i) {
    if (env.sybils.contains(k.to_parent[i])) {
      s.push_back(i);
    } else {
      v.push_back(i);
      truth.push_back(phi[k.to_parent[i]]);
    }
  }
  return victim_probabilities(g_pub, k.graph, VertexSet(s), VertexSet(v), truth, rule, budget);
}

struct MaxAttackSuccess {
  Rational probability = 0;
  /// Witness in the ids of the examined graph.
  VertexSet sybils;
  VertexSet victims;
  VertexId victim = 0;
};

/// Largest per-victim probability over every placement inside g of at most
/// l sybils and a victim set with distinct fingerprints (nonempty when there
/// are sybils), the examined graph being published as is.
inline MaxAttackSuccess max_attack_success(const Graph& g, std::size_t l,
                                           SupportRule rule = SupportRule::kIsomorphismClass,
                                           const OracleBudget& budget = {}) {
  const std::size_t n = g.order();
  if (n > budget.max_order) throw BudgetError("oracle budget exceeded: |V| = " + std::to_string(n));
  if (n == 0) throw InputError("empty graph");
  // Sybil sets in one orbit of Aut(g) yield the same maximum.
  std::vector<VertexMapping> autos;
  try {
    autos = enumerate_automorphisms(g, 20000);
  } catch (const BudgetError&) {
    autos.clear();
  }
  auto is_canonical = [&](const std::vector<VertexId>& s) {
    std::vector<VertexId> img(s.size());
    for (const VertexMapping& a : autos) {
      for (std::size_t i = 0; i < s.size(); ++i) img[i] = a(s[i]);
      std::sort(img.begin(), img.end());
      if (img < s) return false;
    }
    return true;
  };
  MaxAttackSuccess best;
  const std::size_t max_sybils = std::min({l, n - 1, budget.max_domain - 1});
  for (std::size_t sl = 0; sl <= max_sybils; ++sl) {
    std::vector<int> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + sl, 1);
    do {
      std::vector<VertexId> s;
      for (VertexId v = 0; v < n; ++v) {
        if (pick[v]) s.push_back(v);
      }
      if (!is_canonical(s)) continue;
      std::vector<VertexId> rest;
      std::vector<Fingerprint> fp;
      for (VertexId v = 0; v < n; ++v) {
        if (pick[v]) continue;
        Fingerprint f = 0;
        for (std::size_t j = 0; j < sl; ++j) f |= Fingerprint{g.has_edge(v, s[j])} << j;
        if (sl > 0 && f == 0) continue;
        rest.push_back(v);
        fp.push_back(f);
      }
      const std::size_t max_victims = std::min(rest.size(), budget.max_domain - sl);
      for (std::size_t il = 1; il <= max_victims; ++il) {
        std::vector<int> take(rest.size(), 0);
        std::fill(take.begin(), take.begin() + il, 1);
        do {
          std::vector<VertexId> victims;
          std::vector<Fingerprint> seen;
          bool distinct = true;
          for (std::size_t i = 0; i < rest.size() && distinct; ++i) {
            if (!take[i]) continue;
            distinct = std::find(seen.begin(), seen.end(), fp[i]) == seen.end();
            seen.push_back(fp[i]);
            victims.push_back(rest[i]);
          }
          if (!distinct) continue;
          const InducedSubgraph k = adversary_knowledge(g, VertexSet(s), VertexSet(victims));
          std::vector<VertexId> ls, lv, truth;
          for (VertexId i = 0; i < k.to_parent.size(); ++i) {
            if (std::binary_search(s.begin(), s.end(), k.to_parent[i])) {
              ls.push_back(i);
            } else {
              lv.push_back(i);
              truth.push_back(k.to_parent[i]);
            }
          }
          const auto p = victim_probabilities(g, k.graph, VertexSet(ls), VertexSet(lv), truth, rule, budget);
          for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] > best.probability) best = {p[i], VertexSet(s), VertexSet(victims), truth[i]};
          }
        } while (std::prev_permutation(take.begin(), take.end()));
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return best;
}

}  // namespace ksym
