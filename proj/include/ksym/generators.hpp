#pragma once

// Seeded Erdos-Renyi and Barabasi-Albert generators. Output is a pure
// function of the spec (including rng_seed) on every platform.

#include <cstdint>
#include <string>
#include <vector>

#include "ksym/errors.hpp"
#include "ksym/graph.hpp"
#include "ksym/rng.hpp"

namespace ksym {

enum class GeneratorKind { kErdosRenyi, kBarabasiAlbert };

enum class SeedKind { kComplete, kRingLattice, kErHalf };

inline std::string to_string(SeedKind k) {
  switch (k) {
    case SeedKind::kComplete: return "complete";
    case SeedKind::kRingLattice: return "ring_lattice";
    case SeedKind::kErHalf: return "er_half";
  }
  return "?";
}

inline SeedKind seed_kind_from_string(const std::string& s) {
  if (s == "complete") return SeedKind::kComplete;
  if (s == "ring_lattice") return SeedKind::kRingLattice;
  if (s == "er_half") return SeedKind::kErHalf;
  throw InputError("unknown seed kind '" + s + "'");
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kErdosRenyi;
  std::size_t n = 200;
  double density = 0.5;        // ER
  std::size_t m = 5;           // BA: edges per new vertex
  std::size_t seed_order = 50; // BA
  std::size_t growth = 150;    // BA
  std::uint64_t rng_seed = 0;

  static GeneratorSpec erdos_renyi(std::size_t n, double density, std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = GeneratorKind::kErdosRenyi;
    s.n = n;
    s.density = density;
    s.rng_seed = seed;
    return s;
  }

  static GeneratorSpec barabasi_albert(std::size_t seed_order, std::size_t growth, std::size_t m,
                                       std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = GeneratorKind::kBarabasiAlbert;
    s.seed_order = seed_order;
    s.growth = growth;
    s.n = seed_order + growth;
    s.m = m;
    s.rng_seed = seed;
    return s;
  }
};

namespace detail {

inline Graph er_with_rng(std::size_t n, double density, Rng& rng) {
  if (!(density >= 0.0 && density <= 1.0)) {
    throw InputError("density must lie in [0,1], got " + std::to_string(density));
  }
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(density)) edges.push_back({u, v});
    }
  }
  return Graph(n, edges);
}

}  // namespace detail

/// Every pair joined independently with probability spec.density.
inline Graph er_graph(const GeneratorSpec& spec) {
  if (spec.kind != GeneratorKind::kErdosRenyi) throw InputError("er_graph needs an ER spec");
  Rng rng(spec.rng_seed);
  return detail::er_with_rng(spec.n, spec.density, rng);
}

/// Ring lattice on n vertices: each vertex joined to its floor(m/2) nearest
/// neighbours on each side, plus the diametrically opposite vertex when m
/// is odd (exactly m-regular when n is even).
inline Graph ring_lattice(std::size_t n, std::size_t m) {
  if (m >= n) throw InputError("ring lattice degree must be below the order");
  GraphBuilder b(n);
  for (VertexId u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= m / 2; ++j) b.add_edge(u, static_cast<VertexId>((u + j) % n));
    if (m % 2 == 1 && n % 2 == 0) b.add_edge(u, static_cast<VertexId>((u + n / 2) % n));
  }
  return b.build();
}

inline SeedKind pick_seed_kind(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return SeedKind::kComplete;
    case 1: return SeedKind::kRingLattice;
    default: return SeedKind::kErHalf;
  }
}

/// Preferential attachment from the chosen seed: each of spec.growth new
/// vertices joins m distinct existing vertices drawn proportionally to
/// degree (repeated-node list; duplicate draws are redrawn).
inline Graph ba_graph(const GeneratorSpec& spec, SeedKind seed_kind) {
  if (spec.kind != GeneratorKind::kBarabasiAlbert) throw InputError("ba_graph needs a BA spec");
  if (spec.m < 1) throw InputError("BA needs m >= 1");
  if (spec.seed_order < spec.m) throw InputError("BA seed order must be at least m");
  Rng rng(spec.rng_seed);
  const std::size_t n0 = spec.seed_order;
  const std::size_t n = n0 + spec.growth;

  Graph seed;
  switch (seed_kind) {
    case SeedKind::kComplete: {
      std::vector<Edge> e;
      for (VertexId u = 0; u < n0; ++u)
        for (VertexId v = u + 1; v < n0; ++v) e.push_back({u, v});
      seed = Graph(n0, e);
      break;
    }
    case SeedKind::kRingLattice:
      seed = ring_lattice(n0, std::min(spec.m, n0 - 1));
      break;
    case SeedKind::kErHalf:
      seed = detail::er_with_rng(n0, 0.5, rng);
      break;
  }

  GraphBuilder b(n);
  std::vector<VertexId> pool;
  std::vector<std::size_t> deg(n, 0);
  std::size_t active = 0;  // existing vertices with positive degree
  auto connect = [&](VertexId u, VertexId v) {
    b.add_edge(u, v);
    for (VertexId x : {u, v}) {
      pool.push_back(x);
      if (deg[x]++ == 0) ++active;
    }
  };
  for (const Edge& e : seed.edges()) connect(e.u, e.v);

  std::vector<char> chosen(n, 0);
  std::vector<VertexId> targets;
  for (VertexId fresh = static_cast<VertexId>(n0); fresh < n; ++fresh) {
    if (spec.m > fresh) {
      throw InputError("m=" + std::to_string(spec.m) + " exceeds the current order " +
                       std::to_string(fresh));
    }
    targets.clear();
    std::size_t active_chosen = 0;
    while (targets.size() < spec.m) {
      // Degree-proportional while unchosen positive-degree vertices remain;
      // uniform over the rest otherwise (only reachable from sparse seeds).
      const VertexId t = active_chosen < active ? pool[rng.below(pool.size())]
                                                : static_cast<VertexId>(rng.below(fresh));
      if (chosen[t]) continue;
      chosen[t] = 1;
      if (deg[t] > 0) ++active_chosen;
      targets.push_back(t);
    }
    for (VertexId t : targets) chosen[t] = 0;
    for (VertexId t : targets) connect(fresh, t);
  }
  return b.build();
}

}  // namespace ksym
