#include "ksym/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "ksym/automorphism.hpp"
#include "ksym/fixtures.hpp"

namespace ksym {
namespace {

TEST(ErGraphTest, DensityExtremes) {
  EXPECT_EQ(er_graph(GeneratorSpec::erdos_renyi(5, 1.0, 3)), fixtures::complete(5));
  const Graph empty = er_graph(GeneratorSpec::erdos_renyi(5, 0.0, 3));
  EXPECT_EQ(empty.order(), 5u);
  EXPECT_EQ(empty.size(), 0u);
}

TEST(ErGraphTest, RejectsInvalidDensity) {
  EXPECT_THROW(er_graph(GeneratorSpec::erdos_renyi(5, 1.5, 0)), InputError);
  EXPECT_THROW(er_graph(GeneratorSpec::erdos_renyi(5, -0.1, 0)), InputError);
}

TEST(ErGraphTest, MeanEdgeCountMatchesBinomialMean) {
  double total = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    total += static_cast<double>(er_graph(GeneratorSpec::erdos_renyi(200, 0.5, derive_seed(1, i))).size());
  }
  EXPECT_NEAR(total / 1000.0, 9950.0, 99.5);
}

TEST(ErGraphTest, DeterministicPerSeed) {
  const auto spec = GeneratorSpec::erdos_renyi(60, 0.3, 42);
  EXPECT_EQ(er_graph(spec), er_graph(spec));
  EXPECT_NE(er_graph(spec), er_graph(GeneratorSpec::erdos_renyi(60, 0.3, 43)));
}

TEST(ErGraphTest, PinnedOutput) {
  // Regression pin for bit-exact reproducibility across platforms.
  EXPECT_EQ(format_edge_list(er_graph(GeneratorSpec::erdos_renyi(6, 0.5, 1))),
            "6\n0 1\n0 2\n0 3\n0 4\n0 5\n1 3\n1 4\n2 4\n3 5\n4 5\n");
}

TEST(RingLatticeTest, RegularForEvenOrder) {
  for (std::size_t m : {2u, 3u, 4u, 5u}) {
    const Graph g = ring_lattice(50, m);
    for (std::size_t d : degrees(g)) EXPECT_EQ(d, m) << "m=" << m;
  }
}

TEST(RingLatticeTest, IsVertexTransitive) {
  EXPECT_EQ(automorphism_orbits(ring_lattice(12, 4)).blocks.size(), 1u);
}

TEST(BaGraphTest, NoGrowthGivesSeed) {
  const Graph g = ba_graph(GeneratorSpec::barabasi_albert(50, 0, 5, 9), SeedKind::kComplete);
  EXPECT_EQ(g, fixtures::complete(50));
}

TEST(BaGraphTest, OrderAndEdgeCount) {
  for (SeedKind kind : {SeedKind::kComplete, SeedKind::kRingLattice, SeedKind::kErHalf}) {
    for (std::size_t m : {5u, 20u, 50u}) {
      const auto spec = GeneratorSpec::barabasi_albert(50, 150, m, 11);
      const Graph seed = ba_graph(GeneratorSpec::barabasi_albert(50, 0, m, 11), kind);
      const Graph g = ba_graph(spec, kind);
      EXPECT_EQ(g.order(), 200u);
      EXPECT_EQ(g.size(), seed.size() + 150 * m) << to_string(kind) << " m=" << m;
    }
  }
}

TEST(BaGraphTest, RejectsBadParameters) {
  EXPECT_THROW(ba_graph(GeneratorSpec::barabasi_albert(50, 10, 0, 1), SeedKind::kComplete), InputError);
  EXPECT_THROW(ba_graph(GeneratorSpec::barabasi_albert(4, 10, 5, 1), SeedKind::kComplete), InputError);
  EXPECT_THROW(ba_graph(GeneratorSpec::erdos_renyi(10, 0.5, 1), SeedKind::kComplete), InputError);
}

TEST(BaGraphTest, DegreeDistributionIsRightSkewed) {
  for (std::size_t m : {5u, 10u}) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const Graph g =
          ba_graph(GeneratorSpec::barabasi_albert(50, 150, m, derive_seed(5, i)), SeedKind::kRingLattice);
      auto d = degrees(g);
      std::sort(d.begin(), d.end());
      const double median = (d[99] + d[100]) / 2.0;
      EXPECT_GT(static_cast<double>(d.back()), 2 * median) << "m=" << m << " i=" << i;
    }
  }
}

TEST(PickSeedKindTest, UniformOverThreeKinds) {
  Rng rng(2024);
  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[static_cast<int>(pick_seed_kind(rng))];
  for (int c : counts) {
    EXPECT_GE(c, 9500);
    EXPECT_LE(c, 10500);
  }
}

TEST(PickSeedKindTest, DeterministicSequence) {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(pick_seed_kind(a), pick_seed_kind(b));
}

TEST(SeedKindTest, NamesRoundTrip) {
  for (SeedKind k : {SeedKind::kComplete, SeedKind::kRingLattice, SeedKind::kErHalf}) {
    EXPECT_EQ(seed_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(seed_kind_from_string("grid"), InputError);
}

}  // namespace
}  // namespace ksym
