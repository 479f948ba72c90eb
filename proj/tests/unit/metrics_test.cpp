#include "ksym/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ksym/attack.hpp"
#include "ksym/fixtures.hpp"
#include "ksym/generators.hpp"
#include "ksym/kmatch.hpp"

namespace ksym {
namespace {

Graph k4_minus_edge() { return Graph(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}); }

TEST(GlobalClusteringTest, Examples) {
  EXPECT_DOUBLE_EQ(global_clustering(fixtures::complete(4)), 1.0);
  EXPECT_DOUBLE_EQ(global_clustering(fixtures::cycle(5)), 0.0);
  EXPECT_DOUBLE_EQ(global_clustering(k4_minus_edge()), 0.75);
  EXPECT_DOUBLE_EQ(global_clustering(Graph(3)), 0.0);
}

TEST(AvgLocalClusteringTest, Examples) {
  EXPECT_DOUBLE_EQ(avg_local_clustering(fixtures::complete(4)), 1.0);
  EXPECT_DOUBLE_EQ(avg_local_clustering(fixtures::star(5)), 0.0);
  EXPECT_NEAR(avg_local_clustering(k4_minus_edge()), 5.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(avg_local_clustering(Graph(0)), 0.0);
}

TEST(DegreeCosineTest, Examples) {
  const Graph g = er_graph(GeneratorSpec::erdos_renyi(30, 0.2, 3));
  EXPECT_NEAR(degree_cosine_similarity(g, g), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(degree_cosine_similarity(fixtures::complete(4), Graph(4)), 0.0);
  EXPECT_NEAR(degree_cosine_similarity(fixtures::cycle(6), fixtures::path(6)), 24.0 / (6.0 * std::sqrt(20.0)),
              1e-12);
  EXPECT_DOUBLE_EQ(degree_cosine_similarity(Graph(0), Graph(0)), 1.0);
}

TEST(DegreeCosineTest, Symmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph a = er_graph(GeneratorSpec::erdos_renyi(25, 0.3, seed));
    const Graph b = er_graph(GeneratorSpec::erdos_renyi(25, 0.5, seed + 100));
    EXPECT_DOUBLE_EQ(degree_cosine_similarity(a, b), degree_cosine_similarity(b, a));
    EXPECT_DOUBLE_EQ(degree_vector_cosine(a, b), degree_vector_cosine(b, a));
  }
}

TEST(DegreeVectorCosineTest, Examples) {
  // Degrees (2,2,2,2,2,2) against (1,2,2,2,2,1).
  EXPECT_NEAR(degree_vector_cosine(fixtures::cycle(6), fixtures::path(6)), 20.0 / (std::sqrt(24.0) * std::sqrt(18.0)),
              1e-12);
  EXPECT_DOUBLE_EQ(degree_vector_cosine(fixtures::complete(4), Graph(4)), 0.0);
  EXPECT_THROW(degree_vector_cosine(Graph(3), Graph(4)), InputError);
}

TEST(TriangleCountTest, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::size_t n = 3 + rng.below(48);
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(n, 0.05 + 0.9 * rng.unit(), seed));
    EXPECT_EQ(triangle_count(g), triangles_bruteforce(g)) << "seed " << seed;
  }
  EXPECT_EQ(triangle_count(fixtures::complete(5)), 10u);
}

TEST(MetricsTest, InvariantUnderRelabelling) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(40, 0.15, seed));
    const Graph h = pseudonymize(g, seed).first;
    EXPECT_NEAR(global_clustering(g), global_clustering(h), 1e-12);
    EXPECT_NEAR(avg_local_clustering(g), avg_local_clustering(h), 1e-12);
    EXPECT_NEAR(degree_cosine_similarity(g, h), 1.0, 1e-12);
  }
}

TEST(MetricsTest, RangesHold) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(30, 0.3, seed));
    const Graph out = kmatch(g, 3, seed).graph_out;
    const auto r = utility_report(g, out);
    for (double x : {r.gcc_before, r.gcc_after, r.avg_lcc_before, r.avg_lcc_after, r.degree_cosine,
                     r.degree_histogram_cosine}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(UtilityReportTest, ExcludesDummies) {
  // Seven vertices padded to eight for k = 2; the report only sees ids 0..6.
  const Graph g = fixtures::path(7);
  const auto res = kmatch(g, 2, 1);
  ASSERT_EQ(res.graph_out.order(), 8u);
  const auto r = utility_report(g, res.graph_out);
  std::size_t real_added = 0;
  for (const Edge& e : res.added_edges) real_added += e.v < 7;
  EXPECT_EQ(r.edges_added, real_added);
  EXPECT_EQ(r.edges_removed, 0u);
  EXPECT_EQ(utility_report(g, g).degree_cosine, 1.0);
  const auto padded = utility_report(g, res.graph_out, true);
  EXPECT_EQ(padded.edges_added, res.added_edges.size());
}

TEST(UtilityReportTest, RejectsShrunkGraph) { EXPECT_THROW(utility_report(Graph(4), Graph(3)), InputError); }

}  // namespace
}  // namespace ksym
