#include "ksym/privacy.hpp"

#include <gtest/gtest.h>

#include "ksym/fixtures.hpp"
#include "ksym/generators.hpp"

namespace ksym {
namespace {

using fixtures::automorphism_counterexample;
using fixtures::incomparability_a;
using fixtures::incomparability_b;
using fixtures::incomparability_c;

TEST(MaxKDegreeTest, Examples) {
  EXPECT_EQ(max_k_degree(automorphism_counterexample()), 1u);
  EXPECT_EQ(max_k_degree(fixtures::cycle(6)), 6u);
  EXPECT_EQ(max_k_degree(incomparability_b()), 1u);
}

TEST(MaxKNeighbourhoodTest, Examples) {
  EXPECT_EQ(max_k_neighbourhood(fixtures::complete(5)), 5u);
  EXPECT_EQ(max_k_neighbourhood(automorphism_counterexample()), 1u);
  EXPECT_EQ(max_k_neighbourhood(fixtures::cycle(6)), 6u);
  EXPECT_EQ(max_k_neighbourhood(incomparability_a()), 2u);
}

TEST(MaxKNeighbourhoodTest, CounterexampleCentreIsUnique) {
  const auto classes = neighbourhood_classes(automorphism_counterexample());
  bool found = false;
  for (const auto& c : classes) {
    if (c == std::vector<VertexId>{fixtures::kCounterexampleCentre}) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(KAutomorphismTest, CounterexampleIsTwoAutomorphicButDegreeRevealing) {
  const Graph g = automorphism_counterexample();
  EXPECT_TRUE(is_k_automorphic_def6(g, 2));
  EXPECT_EQ(max_k_degree(g), 1u);
  EXPECT_FALSE(is_k_symmetric(g, 2));
  // The witnessing automorphism swaps the two halves and fixes u.
  const VertexMapping swap{{4, 5, 3, 2, 0, 1, 6}};
  EXPECT_TRUE(is_automorphism(g, swap));
}

TEST(KAutomorphismTest, TriangleRotations) {
  EXPECT_TRUE(is_k_automorphic_def6(fixtures::complete(3), 3));
  EXPECT_FALSE(is_k_automorphic_def6(fixtures::path(4), 3));
  EXPECT_TRUE(is_k_automorphic_def6(fixtures::path(4), 1));
}

TEST(KSymmetryTest, IncomparabilityFixtures) {
  EXPECT_TRUE(is_k_symmetric(incomparability_a(), 2));
  EXPECT_FALSE(is_k_symmetric(incomparability_b(), 2));
  EXPECT_FALSE(is_k_symmetric(incomparability_c(), 2));
}

TEST(KlAnonymityTest, IncomparabilityFixtures) {
  EXPECT_TRUE(is_kl_anonymous(incomparability_b(), 2, 1));
  EXPECT_FALSE(is_kl_anonymous(incomparability_a(), 2, 2));
  EXPECT_FALSE(is_kl_anonymous(incomparability_c(), 2, 2));
  for (std::size_t l = 2; l <= 8; ++l) {
    EXPECT_FALSE(is_kl_anonymous(incomparability_a(), 2, l)) << "l=" << l;
  }
}

TEST(KlAdjacencyAnonymityTest, CompleteGraph) {
  for (std::size_t n = 3; n <= 7; ++n) {
    for (std::size_t l = 1; l + 1 < n; ++l) {
      EXPECT_TRUE(is_kl_adjacency_anonymous(fixtures::complete(n), n - l, l));
      EXPECT_FALSE(is_kl_adjacency_anonymous(fixtures::complete(n), n - l + 1, l));
    }
  }
}

TEST(KlAdjacencyAnonymityTest, Bowtie) {
  EXPECT_TRUE(is_kl_adjacency_anonymous(incomparability_b(), 2, 1));
}

TEST(KlAdjacencyAnonymityTest, StarCentreIsExposedByALeafSybil) {
  const Graph s5 = fixtures::star(5);
  // Only the centre is adjacent to a leaf, so S={leaf} isolates it.
  EXPECT_FALSE(is_kl_adjacency_anonymous(s5, 2, 1));
  const auto report = check_property(s5, Property::klAdjacencyAnonymity, 2, 1);
  ASSERT_TRUE(report.witness.has_value());
  EXPECT_NE(report.witness->find("vertex 0"), std::string::npos);
  // With the centre as the sybil all five leaves look alike.
  detail::KlEvaluator eval(s5, 2, true);
  const std::vector<VertexId> centre{0};
  EXPECT_FALSE(eval.violation(centre).has_value());
}

TEST(KlAnonymityTest, BudgetRefusalNamesTheBudget) {
  EnumerationBudget tiny;
  tiny.max_subsets = 10;
  try {
    is_kl_anonymous(incomparability_a(), 2, 3, tiny);
    FAIL() << "expected BudgetError";
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("max_subsets=10"), std::string::npos);
  }
}

TEST(KlAnonymityTest, MonteCarloFindsViolationOnIncomparabilityA) {
  const auto r = sample_kl(incomparability_a(), 2, 2, false, 2000, 7);
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(r.witness.has_value());
  const auto ok = sample_kl(incomparability_b(), 2, 1, false, 200, 7);
  EXPECT_TRUE(ok.holds);
  EXPECT_EQ(ok.samples, 200u);
}

TEST(PropertyReportTest, WitnessPresentIffViolated) {
  const std::vector<Graph> graphs = {incomparability_a(), incomparability_b(), incomparability_c(),
                                     automorphism_counterexample(), fixtures::complete(4)};
  for (const Graph& g : graphs) {
    for (Property p : {Property::kDegree, Property::kNeighbourhood, Property::kAutomorphismDef6,
                       Property::kSymmetry, Property::klAnonymity,
                       Property::klAdjacencyAnonymity}) {
      for (std::size_t k = 1; k <= 3; ++k) {
        const auto r = check_property(g, p, k, std::size_t{2});
        EXPECT_EQ(r.witness.has_value(), !r.holds);
      }
    }
  }
}

TEST(PropertyReportTest, MonotoneInK) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(8, 0.4, seed));
    for (Property p : {Property::kDegree, Property::kNeighbourhood, Property::kSymmetry,
                       Property::klAnonymity, Property::klAdjacencyAnonymity}) {
      bool previous = true;
      for (std::size_t k = 1; k <= 5; ++k) {
        const bool holds = check_property(g, p, k, std::size_t{2}).holds;
        if (!previous) {
          EXPECT_FALSE(holds);
        }
        previous = holds;
      }
    }
  }
}

TEST(HierarchyTest, SymmetryImpliesNeighbourhoodImpliesDegree) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    const std::size_t n = 3 + rng.below(10);
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(n, 0.1 + 0.8 * rng.unit(), seed));
    const std::size_t sym = automorphism_orbits(g).min_block_size();
    const std::size_t nbr = max_k_neighbourhood(g);
    const std::size_t deg = max_k_degree(g);
    EXPECT_LE(sym, nbr) << "seed " << seed;
    EXPECT_LE(nbr, deg) << "seed " << seed;
  }
}

TEST(HierarchyTest, KlAnonymityMonotoneInLAndImpliesAdjacency) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(9, 0.35, seed));
    for (std::size_t k = 1; k <= 3; ++k) {
      bool previous = true;
      for (std::size_t l = 1; l <= 3; ++l) {
        const bool kl = is_kl_anonymous(g, k, l);
        if (!previous) {
          EXPECT_FALSE(kl);
        }
        previous = kl;
        if (kl) {
          EXPECT_TRUE(is_kl_adjacency_anonymous(g, k, l));
        }
      }
    }
  }
}

}  // namespace
}  // namespace ksym
