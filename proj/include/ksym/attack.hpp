#pragma once

// Active attack game: the adversary plants sybils wired to victims, the
// defender publishes a pseudonymised (and possibly anonymised) graph, and
// the adversary searches it for the sybil pattern and the victims'
// fingerprints.
//
// Re-identification is scored as follows. A candidate placement X is an
// ordered tuple of published vertices standing for s_0..s_{l-1}; its score is
//
//   #{i<j : adj(x_i,x_j) != adj(s_i,s_j)} + w_d * sum_j |deg(x_j) - deg(s_j)|
//
// with degrees taken in the published graph and in the sybil-extended graph
// respectively. Every tuple within theta of the minimum is kept. For each
// kept X, victims are matched to published vertices outside X minimising the
// summed Hamming distance between fingerprints and adjacency-to-X vectors;
// the success rate averages 1/|optimal matchings| over the X whose optimal
// set contains the true matching.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ksym/automorphism.hpp"
#include "ksym/errors.hpp"
#include "ksym/graph.hpp"
#include "ksym/rational.hpp"
#include "ksym/rng.hpp"

namespace ksym {

using BigCount = boost::multiprecision::cpp_int;

/// Bit j set iff the victim is adjacent to sybil s_j.
using Fingerprint = std::uint64_t;

inline constexpr std::size_t kMaxSybils = 30;

struct AttackEnvironment {
  Graph g_original;
  Graph g_plus;
  /// Sybil s_j is the j-th smallest member; always the ids n .. n+l-1.
  VertexSet sybils;
  VertexSet victims;
  /// fingerprints[i] belongs to the i-th smallest victim.
  std::vector<Fingerprint> fingerprints;

  std::size_t l() const { return sybils.size(); }
};

/// Def. 1 knowledge: the subgraph on S u I without victim-victim edges.
/// Local ids follow sorted S u I.
inline InducedSubgraph adversary_knowledge(const Graph& g_plus, const VertexSet& sybils,
                                           const VertexSet& victims) {
  for (VertexId v : victims) {
    if (sybils.contains(v)) throw InputError("vertex " + std::to_string(v) + " is both sybil and victim");
  }
  std::vector<VertexId> members(sybils.begin(), sybils.end());
  members.insert(members.end(), victims.begin(), victims.end());
  InducedSubgraph sub = induced_subgraph(g_plus, VertexSet(std::move(members)));
  std::vector<Edge> kept;
  for (const Edge& e : sub.graph.edges()) {
    if (victims.contains(sub.to_parent[e.u]) && victims.contains(sub.to_parent[e.v])) continue;
    kept.push_back(e);
  }
  sub.graph = Graph(sub.graph.order(), kept);
  return sub;
}

/// Throws std::logic_error when the environment breaks the game's rules.
inline void check_environment(const AttackEnvironment& env) {
  const std::size_t n = env.g_original.order();
  if (env.g_plus.order() != n + env.l()) throw std::logic_error("sybil-extended graph has the wrong order");
  for (const Edge& e : env.g_original.edges()) {
    if (!env.g_plus.has_edge(e.u, e.v)) throw std::logic_error("sybil-extended graph lost an edge");
  }
  for (const Edge& e : env.g_plus.edges()) {
    if (e.v < n && !env.g_original.has_edge(e.u, e.v)) {
      throw std::logic_error("new edge between two original vertices");
    }
    if (e.v >= n && e.u < n && !env.victims.contains(e.u)) {
      throw std::logic_error("sybil adjacent to a non-victim");
    }
  }
  std::set<Fingerprint> seen;
  for (Fingerprint f : env.fingerprints) {
    if (f == 0) throw std::logic_error("empty fingerprint");
    if (!seen.insert(f).second) throw std::logic_error("duplicate fingerprint");
  }
}

/// Appends l sybils (ids n..n+l-1), joins consecutive sybils by a path and
/// every other sybil pair with probability 1/2, and wires each victim to a
/// distinct nonempty random subset of the sybils.
inline AttackEnvironment inject_sybils(const Graph& g, std::size_t l, const VertexSet& victims,
                                       std::uint64_t rng_seed) {
  if (l < 1 || l > kMaxSybils) throw InputError("sybil count must lie in [1," + std::to_string(kMaxSybils) + "]");
  const std::uint64_t patterns = (std::uint64_t{1} << l) - 1;
  if (victims.empty() || victims.size() > patterns) {
    throw InputError(std::to_string(victims.size()) + " victims need between 1 and " +
                     std::to_string(patterns) + " fingerprints");
  }
  const std::size_t n = g.order();
  for (VertexId v : victims) {
    if (v >= n) throw InputError("victim " + std::to_string(v) + " is not a vertex");
  }
  Rng rng(rng_seed);
  GraphBuilder b(n + l);
  for (const Edge& e : g.edges()) b.add_edge(e.u, e.v);
  for (VertexId i = 0; i < l; ++i) {
    for (VertexId j = i + 1; j < l; ++j) {
      if (j == i + 1 || rng.bernoulli(0.5)) b.add_edge(static_cast<VertexId>(n + i), static_cast<VertexId>(n + j));
    }
  }
  AttackEnvironment env;
  std::set<Fingerprint> used;
  for (VertexId v : victims) {
    Fingerprint f;
    do {
      f = 1 + rng.below(patterns);
    } while (!used.insert(f).second);
    env.fingerprints.push_back(f);
    for (std::size_t j = 0; j < l; ++j) {
      if ((f >> j) & 1U) b.add_edge(v, static_cast<VertexId>(n + j));
    }
  }
  std::vector<VertexId> s;
  for (std::size_t j = 0; j < l; ++j) s.push_back(static_cast<VertexId>(n + j));
  env.g_original = g;
  env.g_plus = b.build();
  env.sybils = VertexSet(std::move(s));
  env.victims = victims;
  check_environment(env);
  return env;
}

/// True when no non-trivial permutation of the sybils preserves both their
/// mutual adjacency and their degrees, so the planted pattern has no
/// internal twin.
inline bool has_unique_sybil_structure(const AttackEnvironment& env) {
  const InducedSubgraph s = induced_subgraph(env.g_plus, env.sybils);
  Colouring colours;
  for (VertexId v : env.sybils) colours.push_back(static_cast<std::uint32_t>(env.g_plus.neighbors(v).size()));
  return automorphism_orbits(s.graph, colours).blocks.size() == env.l();
}

/// Uniformly random distinct victims from [0, n).
inline VertexSet pick_victims(std::size_t n, std::size_t count, std::uint64_t rng_seed) {
  if (count > n) throw InputError("more victims than vertices");
  std::vector<VertexId> ids(n);
  for (VertexId v = 0; v < n; ++v) ids[v] = v;
  Rng rng(rng_seed);
  rng.shuffle(std::span<VertexId>(ids));
  ids.resize(count);
  return VertexSet(std::move(ids));
}

/// Default victim count min(floor(n/10), 2^l - 1), at least 1.
inline std::size_t default_victim_count(std::size_t n, std::size_t l) {
  const std::size_t cap = l >= 63 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << l) - 1;
  return std::max<std::size_t>(1, std::min(n / 10, cap));
}

struct Pseudonymization {
  /// phi.image[v] is the published id of v.
  VertexMapping phi;
};

inline std::pair<Graph, Pseudonymization> pseudonymize(const Graph& g, std::uint64_t rng_seed) {
  VertexMapping phi = VertexMapping::identity(g.order());
  Rng rng(rng_seed);
  rng.shuffle(std::span<VertexId>(phi.image));
  Graph out = relabel(g, phi.image);
  return {std::move(out), Pseudonymization{std::move(phi)}};
}

/// What the adversary takes into the re-identification stage.
struct AttackerView {
  /// Sybil-sybil adjacency, s_i s_j for i<j.
  std::vector<std::vector<bool>> sybil_adjacent;
  /// Degree of each sybil in the sybil-extended graph.
  std::vector<std::size_t> sybil_degree;
  std::vector<Fingerprint> fingerprints;

  std::size_t l() const { return sybil_degree.size(); }

  static AttackerView from(const AttackEnvironment& env) {
    AttackerView v;
    const std::size_t l = env.l();
    const auto s = env.sybils.members();
    v.sybil_adjacent.assign(l, std::vector<bool>(l, false));
    for (std::size_t i = 0; i < l; ++i) {
      v.sybil_degree.push_back(env.g_plus.neighbors(s[i]).size());
      for (std::size_t j = 0; j < l; ++j) {
        if (i != j) v.sybil_adjacent[i][j] = env.g_plus.has_edge(s[i], s[j]);
      }
    }
    v.fingerprints = env.fingerprints;
    return v;
  }
};

struct AttackParams {
  /// Candidates within theta of the best score are kept.
  double theta = 0.0;
  /// Weight of the per-sybil degree difference.
  double degree_weight = 1.0;
  /// A vertex may stand for s_j only if deg >= deg(s_j) - degree_slack_below
  /// and, when set, deg <= deg(s_j) + degree_slack_above.
  std::size_t degree_slack_below = 0;
  std::optional<std::size_t> degree_slack_above;
  /// The defender only adds edges, so a placement must contain every
  /// sybil-sybil edge.
  bool additions_only = true;
  std::size_t candidate_cap = 10000;
  std::size_t matching_cap = 10000;
  /// Counting-search nodes per candidate.
  std::uint64_t matching_node_cap = 200'000;
  /// Sybil-search nodes before giving up with a truncated result.
  std::uint64_t node_budget = 200'000'000;
};

struct CandidateOutcome {
  /// |Y_X|, counted only when truth_in (it cannot affect Eq. (2)
  /// otherwise); a lower bound when `truncated`.
  BigCount optimal_matchings = 0;
  bool truth_in = false;
  bool truncated = false;
};

struct ReidentificationResult {
  std::vector<std::vector<VertexId>> candidates;
  double best_score = std::numeric_limits<double>::infinity();
  /// Tied candidates seen, including those past the cap.
  std::uint64_t candidates_seen = 0;
  /// Cheapest fingerprint matching cost per candidate.
  std::vector<std::uint64_t> optimal_cost;
  /// Set when the sybil search hit the candidate cap or its node budget.
  bool truncated = false;
  std::size_t matching_cap = 0;
  std::uint64_t matching_node_cap = 0;
  std::uint64_t nodes = 0;
  /// Published graph and fingerprints, kept to score the ground truth.
  Graph published;
  std::vector<Fingerprint> fingerprints;
};

namespace detail {

class SybilSearch {
 public:
  SybilSearch(const Graph& pub, const AttackerView& view, const AttackParams& p)
      : g_(pub), view_(view), p_(p), l_(view.l()) {
    eligible_.resize(l_);
    min_penalty_.assign(l_ + 1, 0.0);
    for (std::size_t j = 0; j < l_; ++j) {
      const std::size_t want = view.sybil_degree[j];
      const std::size_t lo = want > p.degree_slack_below ? want - p.degree_slack_below : 0;
      double best = std::numeric_limits<double>::infinity();
      for (VertexId v = 0; v < g_.order(); ++v) {
        const std::size_t d = g_.neighbors(v).size();
        if (d < lo) continue;
        if (p.degree_slack_above && d > want + *p.degree_slack_above) continue;
        eligible_[j].push_back(v);
        best = std::min(best, penalty(j, v));
      }
      std::stable_sort(eligible_[j].begin(), eligible_[j].end(),
                       [&](VertexId a, VertexId b) { return penalty(j, a) < penalty(j, b); });
      min_penalty_[j] = best;
    }
    for (std::size_t j = l_; j-- > 0;) min_penalty_[j] += min_penalty_[j + 1];
    used_.assign(g_.order(), 0);
  }

  void run(ReidentificationResult& out) {
    out_ = &out;
    tuple_.clear();
    if (l_ == 0 || std::isinf(min_penalty_[0])) return;
    extend(0, 0.0);
    out.best_score = best_;
  }

 private:
  double penalty(std::size_t j, VertexId v) const {
    const double d = static_cast<double>(g_.neighbors(v).size());
    return p_.degree_weight * std::abs(d - static_cast<double>(view_.sybil_degree[j]));
  }

  double limit() const { return best_ + p_.theta + 1e-9; }

  void extend(std::size_t j, double score) {
    if (j == l_) {
      record(score);
      return;
    }
    // The path edge to the previous sybil is guaranteed when edges are
    // never removed.
    const bool anchored = p_.additions_only && j > 0 && view_.sybil_adjacent[j - 1][j];
    for (VertexId v : eligible_[j]) {
      if (score + penalty(j, v) + min_penalty_[j + 1] > limit()) break;
      if (anchored && !g_.has_edge(tuple_.back(), v)) continue;
      try_vertex(j, v, score);
      if (out_->truncated && exhausted()) return;
    }
  }

  bool exhausted() const { return out_->nodes >= p_.node_budget; }

  void try_vertex(std::size_t j, VertexId v, double score) {
    if (used_[v]) return;
    if (++out_->nodes >= p_.node_budget) {
      out_->truncated = true;
      return;
    }
    double s = score + penalty(j, v);
    for (std::size_t i = 0; i < j; ++i) {
      const bool want = view_.sybil_adjacent[i][j];
      const bool have = g_.has_edge(tuple_[i], v);
      if (want == have) continue;
      if (want && p_.additions_only) return;
      s += 1.0;
    }
    if (s + min_penalty_[j + 1] > limit()) return;
    used_[v] = 1;
    tuple_.push_back(v);
    extend(j + 1, s);
    tuple_.pop_back();
    used_[v] = 0;
  }

  void record(double score) {
    if (score + 1e-9 < best_) {
      best_ = score;
      // Drop kept tuples that are no longer within theta of the best.
      std::vector<std::vector<VertexId>> kept;
      std::vector<double> kept_scores;
      for (std::size_t i = 0; i < out_->candidates.size(); ++i) {
        if (scores_[i] <= limit()) {
          kept.push_back(std::move(out_->candidates[i]));
          kept_scores.push_back(scores_[i]);
        }
      }
      out_->candidates = std::move(kept);
      scores_ = std::move(kept_scores);
      seen_over_cap_ = 0;
      cap_hit_ = false;
    }
    if (cap_hit_ || out_->candidates.size() >= p_.candidate_cap) {
      cap_hit_ = true;
      ++seen_over_cap_;
      return;
    }
    out_->candidates.push_back(tuple_);
    scores_.push_back(score);
  }

 public:
  bool cap_hit() const { return cap_hit_; }
  std::uint64_t over_cap() const { return seen_over_cap_; }

 private:
  const Graph& g_;
  const AttackerView& view_;
  const AttackParams& p_;
  std::size_t l_;
  std::vector<std::vector<VertexId>> eligible_;
  std::vector<double> min_penalty_;
  std::vector<char> used_;
  std::vector<VertexId> tuple_;
  std::vector<double> scores_;
  double best_ = std::numeric_limits<double>::infinity();
  bool cap_hit_ = false;
  std::uint64_t seen_over_cap_ = 0;
  ReidentificationResult* out_ = nullptr;
};

// Victims are matched to groups of published vertices sharing an adjacency
// vector to X; a group with c vertices and u victims already placed offers
// c - u concrete choices. The optimum comes from the Hungarian method over
// group slots; optimal dual potentials then single out the victim-group
// pairs and group loads that every optimal matching must respect, so the
// counting search only walks tight choices.
class FingerprintMatcher {
 public:
  FingerprintMatcher(const Graph& pub, std::span<const VertexId> x, std::span<const Fingerprint> fps)
      : fps_(fps.begin(), fps.end()) {
    std::vector<char> in_x(pub.order(), 0);
    for (VertexId v : x) in_x[v] = 1;
    std::vector<Fingerprint> vec(pub.order(), 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (VertexId w : pub.neighbors(x[j])) vec[w] |= Fingerprint{1} << j;
    }
    std::vector<Fingerprint> keys;
    for (VertexId v = 0; v < pub.order(); ++v) {
      if (!in_x[v]) keys.push_back(vec[v]);
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      pattern_.push_back(keys[i]);
      size_.push_back(j - i);
      i = j;
    }
  }

  std::uint32_t cost(std::size_t victim, std::size_t group) const {
    return static_cast<std::uint32_t>(std::popcount(pattern_[group] ^ fps_[victim]));
  }

  /// Cost of the cheapest injective matching, or nullopt if none exists.
  std::optional<std::uint64_t> optimum() {
    const std::size_t n = fps_.size();
    std::vector<std::size_t> slot_group;
    for (std::size_t g = 0; g < pattern_.size(); ++g)
      for (std::size_t c = 0; c < std::min(size_[g], n); ++c) slot_group.push_back(g);
    const std::size_t m = slot_group.size();
    if (m < n) return std::nullopt;
    group_of_.assign(n, 0);
    load_.assign(pattern_.size(), 0);
    if (n == 0) return 0;

    // Rectangular Hungarian method, rows = victims, columns = slots (1-based).
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0), v(m + 1, 0), minv(m + 1);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (std::size_t i = 1; i <= n; ++i) {
      p[0] = i;
      std::size_t j0 = 0;
      std::fill(minv.begin(), minv.end(), kInf);
      std::fill(used.begin(), used.end(), 0);
      do {
        used[j0] = 1;
        const std::size_t i0 = p[j0];
        std::int64_t delta = kInf;
        std::size_t j1 = 0;
        for (std::size_t j = 1; j <= m; ++j) {
          if (used[j]) continue;
          const std::int64_t cur = cost(i0 - 1, slot_group[j - 1]) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
        for (std::size_t j = 0; j <= m; ++j) {
          if (used[j]) {
            u[p[j]] += delta;
            v[j] -= delta;
          } else {
            minv[j] -= delta;
          }
        }
        j0 = j1;
      } while (p[j0] != 0);
      do {
        const std::size_t j1 = way[j0];
        p[j0] = p[j1];
        j0 = j1;
      } while (j0 != 0);
    }
    std::uint64_t total = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      if (p[j] == 0) continue;
      group_of_[p[j] - 1] = slot_group[j - 1];
      ++load_[slot_group[j - 1]];
      total += cost(p[j] - 1, slot_group[j - 1]);
    }
    optimum_ = total;
    return total;
  }

  /// Number of optimal injective matchings; stops after `cap` victim-to-group
  /// assignments or `node_cap` search nodes and sets `truncated`.
  /// Requires optimum() to have succeeded.
  BigCount count(std::size_t cap, std::uint64_t node_cap, std::uint64_t& nodes, bool& truncated) {
    compute_potentials();
    const std::size_t n = fps_.size();
    const std::size_t groups = pattern_.size();
    allowed_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t g = 0; g < groups; ++g) {
        if (sink_rc_[g] > 0) continue;
        const std::int64_t rc = static_cast<std::int64_t>(cost(i, g)) + dist_[i] - dist_[n + g];
        if (rc < 0) {
          allowed_[i].assign(1, g);
          break;
        }
        if (rc == 0) allowed_[i].push_back(g);
      }
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return allowed_[a].size() < allowed_[b].size(); });
    placed_.assign(groups, 0);
    std::size_t deficit = 0;
    for (std::size_t g = 0; g < groups; ++g)
      if (sink_rc_[g] < 0) deficit += size_[g];
    leaves_ = 0;
    cap_ = cap;
    node_cap_ = node_cap;
    local_nodes_ = 0;
    truncated_ = false;
    BigCount total = 0;
    walk(0, 0, deficit, BigCount(1), total);
    nodes += local_nodes_;
    truncated = truncated || truncated_;
    return total;
  }

 private:
  // Shortest-path potentials on the residual network of the optimal
  // assignment: victims, groups, then a sink.
  void compute_potentials() {
    const std::size_t n = fps_.size();
    const std::size_t groups = pattern_.size();
    const std::size_t sink = n + groups;
    struct Arc {
      std::size_t from, to;
      std::int64_t cost;
    };
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t g = 0; g < groups; ++g) {
        const std::int64_t c = cost(i, g);
        if (group_of_[i] == g) {
          arcs.push_back({n + g, i, -c});
        } else {
          arcs.push_back({i, n + g, c});
        }
      }
    }
    for (std::size_t g = 0; g < groups; ++g) {
      if (load_[g] < size_[g]) arcs.push_back({n + g, sink, 0});
      if (load_[g] > 0) arcs.push_back({sink, n + g, 0});
    }
    dist_.assign(sink + 1, 0);
    for (std::size_t round = 0; round <= sink; ++round) {
      bool changed = false;
      for (const Arc& a : arcs) {
        if (dist_[a.from] + a.cost < dist_[a.to]) {
          dist_[a.to] = dist_[a.from] + a.cost;
          changed = true;
        }
      }
      if (!changed) break;
    }
    sink_rc_.assign(groups, 0);
    for (std::size_t g = 0; g < groups; ++g) sink_rc_[g] = dist_[n + g] - dist_[sink];
  }

  void walk(std::size_t depth, std::uint64_t acc, std::size_t deficit, const BigCount& ways, BigCount& total) {
    const std::size_t n = fps_.size();
    if (depth == n) {
      if (deficit == 0 && acc == optimum_) {
        total += ways;
        if (++leaves_ >= cap_) truncated_ = true;
      }
      return;
    }
    if (deficit > n - depth) return;
    if (++local_nodes_ >= node_cap_) {
      truncated_ = true;
      return;
    }
    const std::size_t i = order_[depth];
    for (std::size_t g : allowed_[i]) {
      if (placed_[g] == size_[g]) continue;
      const BigCount w = ways * (size_[g] - placed_[g]);
      ++placed_[g];
      walk(depth + 1, acc + cost(i, g), sink_rc_[g] < 0 ? deficit - 1 : deficit, w, total);
      --placed_[g];
      if (truncated_) return;
    }
  }

  std::vector<Fingerprint> fps_;
  std::vector<Fingerprint> pattern_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> group_of_;
  std::vector<std::size_t> load_;
  std::vector<std::int64_t> dist_;
  std::vector<std::int64_t> sink_rc_;
  std::vector<std::vector<std::size_t>> allowed_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> placed_;
  std::uint64_t optimum_ = 0;
  std::size_t leaves_ = 0;
  std::size_t cap_ = 0;
  std::uint64_t node_cap_ = 0;
  std::uint64_t local_nodes_ = 0;
  bool truncated_ = false;
};

}  // namespace detail

inline ReidentificationResult reidentify(const Graph& g_pub, const AttackerView& view,
                                         const AttackParams& params = {}) {
  if (view.l() == 0 || view.l() > kMaxSybils) throw InputError("attack needs between 1 and 30 sybils");
  if (g_pub.order() < view.l() + view.fingerprints.size()) {
    throw InputError("published graph is smaller than the attacker subgraph");
  }
  ReidentificationResult res;
  res.matching_cap = params.matching_cap;
  res.matching_node_cap = params.matching_node_cap;
  res.published = g_pub;
  res.fingerprints = view.fingerprints;
  detail::SybilSearch search(g_pub, view, params);
  search.run(res);
  if (search.cap_hit()) res.truncated = true;
  res.candidates_seen = res.candidates.size() + search.over_cap();

  // Candidates with no feasible matching drop out of X.
  std::vector<std::vector<VertexId>> kept;
  for (auto& x : res.candidates) {
    detail::FingerprintMatcher m(g_pub, x, view.fingerprints);
    const auto opt = m.optimum();
    if (!opt) continue;
    kept.push_back(std::move(x));
    res.optimal_cost.push_back(*opt);
  }
  res.candidates = std::move(kept);
  return res;
}

struct MatchingCount {
  /// |Y_X|; a lower bound when truncated.
  BigCount count = 0;
  bool truncated = false;
};

/// Number of cost-minimal victim matchings for candidate `c`.
inline MatchingCount count_optimal_matchings(const ReidentificationResult& res, std::size_t c) {
  detail::FingerprintMatcher m(res.published, res.candidates.at(c), res.fingerprints);
  m.optimum();
  MatchingCount out;
  std::uint64_t nodes = 0;
  out.count = m.count(res.matching_cap, res.matching_node_cap, nodes, out.truncated);
  return out;
}

/// Eq. (2) from per-candidate outcomes: 0 without candidates, otherwise the
/// mean over candidates of 1/|Y_X| when the truth is in Y_X and 0 otherwise.
inline Rational success_rate(std::span<const CandidateOutcome> outcomes) {
  if (outcomes.empty()) return Rational(0);
  Rational sum = 0;
  for (const auto& o : outcomes) {
    if (o.truth_in && o.optimal_matchings > 0) sum += Rational(BigCount(1), o.optimal_matchings);
  }
  return sum / static_cast<long long>(outcomes.size());
}

/// Per-candidate outcomes for the ground-truth matching victim -> phi(victim).
inline std::vector<CandidateOutcome> candidate_outcomes(const ReidentificationResult& res,
                                                        const Pseudonymization& phi, const VertexSet& victims) {
  if (victims.size() != res.fingerprints.size()) throw InputError("victim count does not match fingerprints");
  std::vector<VertexId> truth;
  for (VertexId v : victims) truth.push_back(phi.phi(v));
  std::vector<CandidateOutcome> out;
  for (std::size_t c = 0; c < res.candidates.size(); ++c) {
    const auto& x = res.candidates[c];
    CandidateOutcome o;
    o.truncated = res.truncated;
    bool inside = true;
    std::uint64_t cost = 0;
    for (std::size_t i = 0; i < truth.size() && inside; ++i) {
      if (std::find(x.begin(), x.end(), truth[i]) != x.end()) {
        inside = false;
        break;
      }
      Fingerprint pattern = 0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (res.published.has_edge(x[j], truth[i])) pattern |= Fingerprint{1} << j;
      }
      cost += static_cast<std::uint64_t>(std::popcount(pattern ^ res.fingerprints[i]));
    }
    o.truth_in = inside && cost == res.optimal_cost[c];
    if (o.truth_in) {
      const MatchingCount mc = count_optimal_matchings(res, c);
      o.optimal_matchings = mc.count;
      o.truncated = o.truncated || mc.truncated;
    }
    out.push_back(std::move(o));
  }
  return out;
}

inline Rational success_rate(const ReidentificationResult& res, const Pseudonymization& phi,
                             const VertexSet& victims) {
  const auto outcomes = candidate_outcomes(res, phi, victims);
  return success_rate(std::span<const CandidateOutcome>(outcomes));
}

}  // namespace ksym
