#include "ksym/oracle.hpp"

#include <gtest/gtest.h>

#include <set>

#include "ksym/fixtures.hpp"
#include "ksym/generators.hpp"
#include "ksym/kmatch.hpp"
#include "ksym/privacy.hpp"

namespace ksym {
namespace {

constexpr SupportRule kRules[] = {SupportRule::kIsomorphismClass, SupportRule::kLabelled};

// Knowledge graph on local ids 0 (sybil) and 1 (victim) joined by an edge.
Graph single_edge() { return Graph(2, std::vector<Edge>{{0, 1}}); }

TEST(EnumerateMappingsTest, CompleteGraphSingleEdge) {
  for (SupportRule rule : kRules) {
    const auto dist = enumerate_consistent_mappings(fixtures::complete(4), single_edge(), VertexSet{0},
                                                    VertexSet{1}, rule);
    ASSERT_EQ(dist.size(), 12u) << to_string(rule);
    std::set<std::vector<VertexId>> seen;
    for (std::size_t m = 0; m < dist.size(); ++m) {
      EXPECT_EQ(dist.weight(m), Rational(1, 12));
      const auto img = dist.mapping(m);
      EXPECT_NE(img[0], img[1]);
      seen.emplace(img.begin(), img.end());
    }
    EXPECT_EQ(seen.size(), 12u);
  }
}

TEST(EnumerateMappingsTest, CompleteGraphVictimProbability) {
  for (SupportRule rule : kRules) {
    const auto k4 = enumerate_consistent_mappings(fixtures::complete(4), single_edge(), VertexSet{0},
                                                  VertexSet{1}, rule);
    EXPECT_EQ(victim_success_probability(k4, 1, 2), Rational(1, 4));
    const auto k5 = enumerate_consistent_mappings(fixtures::complete(5), single_edge(), VertexSet{0},
                                                  VertexSet{1}, rule);
    EXPECT_EQ(victim_success_probability(k5, 1, 0), Rational(1, 5));
  }
}

struct Instance {
  Graph published;
  Graph knowledge;
  VertexSet sybils;
  VertexSet victims;
  std::vector<VertexId> truth;
};

// Two sybils and up to three victims planted in a small random graph.
Instance planted(std::uint64_t seed, std::size_t n, std::size_t victims, bool anonymise) {
  const Graph g = er_graph(GeneratorSpec::erdos_renyi(n, 0.4, seed));
  const auto env = inject_sybils(g, 2, pick_victims(n, victims, seed), seed);
  Graph out = anonymise ? kmatch(env.g_plus, 2, seed).graph_out : env.g_plus;
  auto [pub, phi] = pseudonymize(out, seed + 99);
  const InducedSubgraph k = adversary_knowledge(env.g_plus, env.sybils, env.victims);
  Instance in{std::move(pub), k.graph, {}, {}, {}};
  std::vector<VertexId> s, v;
  for (VertexId i = 0; i < k.to_parent.size(); ++i) {
    if (env.sybils.contains(k.to_parent[i])) {
      s.push_back(i);
    } else {
      v.push_back(i);
      in.truth.push_back(phi.phi(k.to_parent[i]));
    }
  }
  in.sybils = VertexSet(s);
  in.victims = VertexSet(v);
  return in;
}

TEST(EnumerateMappingsTest, WeightsSumToOneAndAreClassUniform) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = planted(seed, 6, 2, seed % 2 == 1);
    for (SupportRule rule : kRules) {
      const auto dist = enumerate_consistent_mappings(in.published, in.knowledge, in.sybils, in.victims, rule);
      Rational total = 0;
      for (std::size_t m = 0; m < dist.size(); ++m) total += dist.weight(m);
      EXPECT_EQ(total, Rational(1));
      // Mappings sharing a class share a weight; classes hold coloured-isomorphic subgraphs.
      std::vector<std::optional<Graph>> rep(dist.class_weight.size());
      Colouring colours(in.knowledge.order(), 1);
      for (VertexId s : in.sybils) colours[s] = 0;
      for (std::size_t m = 0; m < dist.size(); ++m) {
        EXPECT_EQ(dist.weight(m), dist.class_weight[dist.class_index[m]]);
        const auto img = dist.mapping(m);
        std::vector<Edge> e;
        for (VertexId a = 0; a < img.size(); ++a) {
          for (VertexId b = a + 1; b < img.size(); ++b) {
            if (in.victims.contains(a) && in.victims.contains(b)) continue;
            if (in.published.has_edge(img[a], img[b])) e.push_back({a, b});
          }
        }
        const Graph h(img.size(), e);
        auto& r = rep[dist.class_index[m]];
        if (!r) {
          r = h;
        } else {
          EXPECT_TRUE(find_isomorphism(h, *r, colours, colours).has_value());
        }
        if (rule == SupportRule::kLabelled) {
          EXPECT_EQ(h, in.knowledge);
        } else {
          EXPECT_TRUE(find_isomorphism(h, in.knowledge).has_value());
        }
      }
    }
  }
}

TEST(EnumerateMappingsTest, SupportClosedUnderAutomorphisms) {
  const Graph g = fixtures::incomparability_a();
  const Graph knowledge(3, std::vector<Edge>{{0, 1}, {0, 2}});
  const auto autos = enumerate_automorphisms(g);
  for (SupportRule rule : kRules) {
    const auto dist = enumerate_consistent_mappings(g, knowledge, VertexSet{0}, VertexSet{1, 2}, rule);
    std::set<std::vector<VertexId>> support;
    for (std::size_t m = 0; m < dist.size(); ++m) support.emplace(dist.mapping(m).begin(), dist.mapping(m).end());
    for (const auto& a : autos) {
      for (const auto& img : support) {
        std::vector<VertexId> moved;
        for (VertexId v : img) moved.push_back(a(v));
        EXPECT_TRUE(support.count(moved)) << to_string(rule);
      }
    }
  }
}

TEST(EnumerateMappingsTest, IncomparabilityCTwoSybilPattern) {
  // Sybils v1, v4 with victims v2 (fingerprint 11) and v5 (fingerprint 01).
  const Graph g = fixtures::incomparability_c();
  const InducedSubgraph k = adversary_knowledge(g, VertexSet{0, 3}, VertexSet{1, 4});
  // Local ids follow sorted {0,1,3,4}: 0=v1, 1=v2, 2=v4, 3=v5.
  const VertexSet s{0, 2}, v{1, 3};
  const std::vector<VertexId> truth{1, 4};
  for (SupportRule rule : kRules) {
    const auto dist = enumerate_consistent_mappings(g, k.graph, s, v, rule);
    const auto fast = victim_probabilities(g, k.graph, s, v, truth, rule);
    EXPECT_EQ(victim_success_probability(dist, 1, 1), fast[0]);
    EXPECT_EQ(victim_success_probability(dist, 3, 4), fast[1]);
  }
  EXPECT_EQ(victim_probabilities(g, k.graph, s, v, truth, SupportRule::kLabelled)[1], Rational(3, 4));
  EXPECT_LE(victim_probabilities(g, k.graph, s, v, truth)[1], Rational(1, 2));
}

TEST(VictimProbabilitiesTest, FastPathMatchesExplicitDistribution) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = planted(seed, 7, 1 + seed % 3, seed % 2 == 0);
    for (SupportRule rule : kRules) {
      const auto dist = enumerate_consistent_mappings(in.published, in.knowledge, in.sybils, in.victims, rule);
      const auto fast = victim_probabilities(in.published, in.knowledge, in.sybils, in.victims, in.truth, rule);
      for (std::size_t i = 0; i < in.truth.size(); ++i) {
        EXPECT_EQ(fast[i], victim_success_probability(dist, in.victims.members()[i], in.truth[i]))
            << "seed " << seed << " " << to_string(rule);
      }
    }
  }
}

TEST(VictimProbabilitiesTest, KSymmetricPublicationRespectsBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = planted(seed, 6, 2, true);
    ASSERT_TRUE(is_k_symmetric(in.published, 2));
    for (SupportRule rule : kRules) {
      for (const Rational& p :
           victim_probabilities(in.published, in.knowledge, in.sybils, in.victims, in.truth, rule)) {
        EXPECT_LE(p, Rational(1, 2)) << "seed " << seed << " " << to_string(rule);
      }
    }
  }
}

TEST(VictimProbabilitiesTest, LabelledOracleAgreesWithAttack) {
  // Pseudonym-only publication. The knowledge carries no degrees, so it
  // often embeds at several places. When it embeds only at its true place,
  // every attack candidate whose fingerprints match exactly must put the
  // victims at their true images.
  std::size_t certain = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(6, 0.3, seed));
    const auto env = inject_sybils(g, 4, pick_victims(6, 3, seed), seed);
    if (!has_unique_sybil_structure(env)) continue;
    auto [pub, phi] = pseudonymize(env.g_plus, seed + 5);
    const auto p = victim_probabilities(pub, env, phi.phi.image, SupportRule::kLabelled);
    if (std::any_of(p.begin(), p.end(), [](const Rational& x) { return x != 1; })) continue;
    ++certain;
    const auto res = reidentify(pub, AttackerView::from(env), AttackParams{});
    const auto outcomes = candidate_outcomes(res, phi, env.victims);
    std::size_t exact = 0;
    for (std::size_t c = 0; c < res.candidates.size(); ++c) {
      if (res.optimal_cost[c] != 0) continue;
      ++exact;
      EXPECT_TRUE(outcomes[c].truth_in) << "seed " << seed;
      EXPECT_EQ(outcomes[c].optimal_matchings, 1) << "seed " << seed;
    }
    EXPECT_GE(exact, 1u) << "seed " << seed;
  }
  EXPECT_GE(certain, 30u);
}

TEST(OracleBudgetTest, RefusesLargeInputs) {
  EXPECT_THROW(enumerate_consistent_mappings(Graph(17), single_edge(), VertexSet{0}, VertexSet{1}), BudgetError);
  const Graph big(8);
  EXPECT_THROW(enumerate_consistent_mappings(Graph(10), big, VertexSet{0}, VertexSet{1, 2, 3, 4, 5, 6, 7}),
               BudgetError);
  OracleBudget tiny;
  tiny.max_support = 5;
  EXPECT_THROW(enumerate_consistent_mappings(fixtures::complete(4), single_edge(), VertexSet{0}, VertexSet{1},
                                             SupportRule::kIsomorphismClass, tiny),
               BudgetError);
}

TEST(OracleInputTest, RejectsBadQueries) {
  const auto dist =
      enumerate_consistent_mappings(fixtures::complete(4), single_edge(), VertexSet{0}, VertexSet{1});
  EXPECT_THROW(victim_success_probability(dist, 0, 0), InputError);
  EXPECT_THROW(enumerate_consistent_mappings(fixtures::complete(4), single_edge(), VertexSet{0}, VertexSet{0}),
               InputError);
  EXPECT_THROW(enumerate_consistent_mappings(fixtures::complete(4), Graph(2, std::vector<Edge>{{0, 1}}),
                                             VertexSet{}, VertexSet{0, 1}),
               InputError);
  // A triangle cannot embed in a path.
  EXPECT_THROW(enumerate_consistent_mappings(fixtures::path(4), fixtures::complete(3), VertexSet{0, 1},
                                             VertexSet{2}),
               InputError);
}

TEST(MaxAttackSuccessTest, CompleteGraphs) {
  EXPECT_EQ(max_attack_success(fixtures::complete(4), 1).probability, Rational(1, 4));
  EXPECT_EQ(max_attack_success(fixtures::complete(4), 1, SupportRule::kLabelled).probability, Rational(1, 4));
}

TEST(MaxAttackSuccessTest, VertexTransitiveWithoutSybils) {
  for (const Graph& g : {fixtures::cycle(6), fixtures::complete(5), Graph(4)}) {
    const auto r = max_attack_success(g, 0);
    EXPECT_EQ(r.probability, Rational(1, static_cast<long long>(g.order())));
    EXPECT_TRUE(r.sybils.empty());
  }
}

TEST(MaxAttackSuccessTest, IncomparabilityCTwoSybils) {
  const auto cls = max_attack_success(fixtures::incomparability_c(), 2);
  EXPECT_LE(cls.probability, Rational(1, 2));
  EXPECT_EQ(cls.probability, Rational(3, 8));
  // The labelled rule exceeds the bound: sybils v1, v4 and victims v2, v5.
  const auto lab = max_attack_success(fixtures::incomparability_c(), 2, SupportRule::kLabelled);
  EXPECT_EQ(lab.probability, Rational(3, 4));
  EXPECT_EQ(lab.sybils, (VertexSet{0, 3}));
  EXPECT_EQ(lab.victims, (VertexSet{1, 4}));
}

TEST(MaxAttackSuccessTest, PathWithOneSybil) {
  // Best attack: sybil at an end, victim at the centre. The four ordered
  // adjacent pairs are the guesses; two put the victim at the centre.
  EXPECT_EQ(max_attack_success(fixtures::path(3), 1, SupportRule::kLabelled).probability, Rational(1, 2));
}

}  // namespace
}  // namespace ksym
