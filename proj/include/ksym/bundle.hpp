#pragma once

// Environment bundle: the original edge list, the published edge list and a
// JSON sidecar naming them (paths relative to the sidecar) together with
// S, I, fingerprints, the sybil-sybil edges and phi.
//
//   {"original": "original.el", "published": "published.el",
//    "sybils": [..], "victims": [..], "fingerprints": [..],
//    "sybil_edges": [[a, b], ..], "phi": [..], "method": "kmatch", "k": 2}
//
// phi[v] is the published id of vertex v of the anonymised sybil-extended
// graph (dummies included).

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ksym/attack.hpp"
#include "ksym/errors.hpp"
#include "ksym/graph.hpp"
#include "ksym/kmatch.hpp"
#include "ksym/rng.hpp"

namespace ksym {

struct EnvironmentBundle {
  AttackEnvironment env;
  Graph published;
  Pseudonymization phi;
  std::string method = "pseudonym-only";
  std::size_t k = 0;
};

inline nlohmann::json bundle_sidecar(const EnvironmentBundle& b, const std::string& original_name,
                                     const std::string& published_name) {
  const std::size_t n = b.env.g_original.order();
  std::vector<std::array<VertexId, 2>> sybil_edges;
  for (const Edge& e : b.env.g_plus.edges()) {
    if (e.u >= n) sybil_edges.push_back({e.u, e.v});
  }
  return {{"original", original_name},
          {"published", published_name},
          {"sybils", std::vector<VertexId>(b.env.sybils.begin(), b.env.sybils.end())},
          {"victims", std::vector<VertexId>(b.env.victims.begin(), b.env.victims.end())},
          {"fingerprints", b.env.fingerprints},
          {"sybil_edges", sybil_edges},
          {"phi", b.phi.phi.image},
          {"method", b.method},
          {"k", b.k}};
}

/// Plants l sybils and victim_count victims in g, anonymises the result
/// ("kmatch" or "pseudonym-only") and pseudonymises it.
inline EnvironmentBundle plant_and_publish(const Graph& g, std::size_t l, std::size_t victim_count,
                                           const std::string& method, std::size_t k, std::uint64_t seed) {
  EnvironmentBundle b;
  b.method = method;
  b.k = k;
  const VertexSet victims = pick_victims(g.order(), victim_count, derive_seed(seed, 0));
  b.env = inject_sybils(g, l, victims, derive_seed(seed, 1));
  Graph out;
  if (method == "kmatch") {
    out = kmatch(b.env.g_plus, k, derive_seed(seed, 2)).graph_out;
  } else if (method == "pseudonym-only") {
    out = b.env.g_plus;
  } else {
    throw InputError("unknown method '" + method + "'");
  }
  std::tie(b.published, b.phi) = pseudonymize(out, derive_seed(seed, 3));
  return b;
}

/// Writes <dir>/original.el, <dir>/published.el and <dir>/env.json; returns
/// the sidecar path.
inline std::string save_bundle(const EnvironmentBundle& b, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_edge_list(b.env.g_original, (fs::path(dir) / "original.el").string());
  save_edge_list(b.published, (fs::path(dir) / "published.el").string());
  const std::string sidecar = (fs::path(dir) / "env.json").string();
  std::ofstream out(sidecar);
  if (!out) throw InputError("cannot write " + sidecar);
  out << bundle_sidecar(b, "original.el", "published.el").dump(2) << '\n';
  return sidecar;
}

/// Reads and validates a bundle; throws InputError or ParseError.
inline EnvironmentBundle load_bundle(const std::string& sidecar) {
  namespace fs = std::filesystem;
  std::ifstream in(sidecar);
  if (!in) throw InputError("cannot open " + sidecar);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  const fs::path base = fs::path(sidecar).parent_path();
  EnvironmentBundle b;
  try {
    b.env.g_original = load_edge_list((base / j.at("original").get<std::string>()).string());
    b.published = load_edge_list((base / j.at("published").get<std::string>()).string());
    b.env.sybils = VertexSet(j.at("sybils").get<std::vector<VertexId>>());
    b.env.victims = VertexSet(j.at("victims").get<std::vector<VertexId>>());
    b.env.fingerprints = j.at("fingerprints").get<std::vector<Fingerprint>>();
    b.phi.phi.image = j.at("phi").get<std::vector<VertexId>>();
    b.method = j.value("method", b.method);
    b.k = j.value("k", b.k);
    const std::size_t n = b.env.g_original.order();
    const std::size_t l = b.env.sybils.size();
    for (std::size_t j2 = 0; j2 < l; ++j2) {
      if (b.env.sybils.members()[j2] != n + j2) throw InputError("sybils must be the ids n .. n+l-1");
    }
    if (b.env.fingerprints.size() != b.env.victims.size()) throw InputError("one fingerprint per victim required");
    GraphBuilder g(n + l);
    for (const Edge& e : b.env.g_original.edges()) g.add_edge(e.u, e.v);
    for (const auto& e : j.at("sybil_edges")) {
      const VertexId u = e.at(0).get<VertexId>(), v = e.at(1).get<VertexId>();
      if (u < n || v < n || u >= n + l || v >= n + l || u == v) throw InputError("bad sybil edge");
      g.add_edge(u, v);
    }
    for (std::size_t i = 0; i < b.env.victims.size(); ++i) {
      const VertexId victim = b.env.victims.members()[i];
      for (std::size_t s = 0; s < l; ++s) {
        if ((b.env.fingerprints[i] >> s) & 1U) g.add_edge(victim, static_cast<VertexId>(n + s));
      }
    }
    b.env.g_plus = g.build();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad bundle: ") + e.what());
  }
  try {
    check_environment(b.env);
  } catch (const std::logic_error& e) {
    throw InputError(std::string("bad bundle: ") + e.what());
  }
  if (b.phi.phi.size() != b.published.order() || !b.phi.phi.is_bijection()) {
    throw InputError("bad bundle: phi is not a bijection onto the published vertices");
  }
  if (b.published.order() < b.env.g_plus.order()) throw InputError("bad bundle: published graph too small");
  return b;
}

}  // namespace ksym
