#include "ksym/bundle.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ksym/generators.hpp"
#include "ksym/privacy.hpp"

namespace ksym {
namespace {

namespace fs = std::filesystem;

std::string temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ksym_bundle_test" / name;
  fs::remove_all(dir);
  return dir.string();
}

TEST(BundleTest, RoundTrip) {
  for (const char* method : {"pseudonym-only", "kmatch"}) {
    const Graph g = er_graph(GeneratorSpec::erdos_renyi(20, 0.3, 5));
    const auto b = plant_and_publish(g, 4, 3, method, 2, 11);
    const auto sidecar = save_bundle(b, temp_dir(method));
    const auto r = load_bundle(sidecar);
    EXPECT_EQ(r.env.g_original, b.env.g_original);
    EXPECT_EQ(r.env.g_plus, b.env.g_plus);
    EXPECT_EQ(r.env.sybils, b.env.sybils);
    EXPECT_EQ(r.env.victims, b.env.victims);
    EXPECT_EQ(r.env.fingerprints, b.env.fingerprints);
    EXPECT_EQ(r.published, b.published);
    EXPECT_EQ(r.phi.phi.image, b.phi.phi.image);
    EXPECT_EQ(r.method, method);
    EXPECT_EQ(r.k, 2u);
  }
}

TEST(BundleTest, PlantAndPublishIsDeterministic) {
  const Graph g = er_graph(GeneratorSpec::erdos_renyi(20, 0.3, 5));
  const auto a = plant_and_publish(g, 4, 3, "kmatch", 3, 7);
  const auto b = plant_and_publish(g, 4, 3, "kmatch", 3, 7);
  EXPECT_EQ(a.published, b.published);
  EXPECT_EQ(a.phi.phi.image, b.phi.phi.image);
  EXPECT_TRUE(is_k_symmetric(a.published, 3));
  // Padding makes the order a multiple of k.
  EXPECT_EQ(a.published.order() % 3, 0u);
}

TEST(BundleTest, RejectsTamperedSidecar) {
  const Graph g = er_graph(GeneratorSpec::erdos_renyi(15, 0.3, 2));
  const auto b = plant_and_publish(g, 3, 2, "pseudonym-only", 0, 3);
  const auto sidecar = save_bundle(b, temp_dir("tampered"));
  auto j = nlohmann::json::parse(std::ifstream(sidecar));
  const auto write = [&](const nlohmann::json& x) { std::ofstream(sidecar, std::ios::trunc) << x.dump(); };

  auto bad = j;
  bad["phi"][0] = bad["phi"][1];
  write(bad);
  EXPECT_THROW(load_bundle(sidecar), InputError);

  bad = j;
  bad["fingerprints"].push_back(1);
  write(bad);
  EXPECT_THROW(load_bundle(sidecar), InputError);

  bad = j;
  bad["sybil_edges"].push_back({0, 1});
  write(bad);
  EXPECT_THROW(load_bundle(sidecar), InputError);

  bad = j;
  bad.erase("victims");
  write(bad);
  EXPECT_THROW(load_bundle(sidecar), InputError);

  std::ofstream(sidecar, std::ios::trunc) << "{not json";
  EXPECT_THROW(load_bundle(sidecar), ParseError);
  EXPECT_THROW(load_bundle(temp_dir("missing") + "/env.json"), InputError);
}

TEST(BundleTest, UnknownMethod) {
  EXPECT_THROW(plant_and_publish(Graph(10), 2, 1, "magic", 2, 1), InputError);
}

}  // namespace
}  // namespace ksym
