#include "ksym/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace ksym {
namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ksym_experiment_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Drops the trailing ms column so reruns compare equal.
std::vector<std::string> rows_without_ms(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) out.push_back(line.substr(0, line.rfind(',')));
  return out;
}

ExperimentConfig small_config(const std::string& out) {
  ExperimentConfig c;
  c.generators[0].densities = {0.3};
  c.n = 24;
  c.l = 3;
  c.k = {2};
  c.instances = 1;
  c.output = out;
  fs::remove(out);
  fs::remove(c.summary_path());
  return c;
}

TEST(ExperimentConfigTest, Defaults) {
  const ExperimentConfig c;
  EXPECT_EQ(default_densities().size(), 19u);
  EXPECT_DOUBLE_EQ(default_densities().front(), 0.1);
  EXPECT_DOUBLE_EQ(default_densities().back(), 1.0);
  EXPECT_EQ(sybil_count(c, 200), 8u);
  EXPECT_EQ(sybil_count(c, 256), 8u);
  EXPECT_EQ(sybil_count(c, 257), 9u);
  // Desk-scale ER grid: methods x k x densities x instances.
  EXPECT_EQ(c.methods.size() * c.k.size() * expand_cells(c).size() * c.instances, 5700u);
  EXPECT_EQ(c.summary_path(), "results.summary.json");
}

TEST(ExperimentConfigTest, ParsesSchema) {
  const auto c = parse_experiment_config(nlohmann::json::parse(R"({
    "generators": [{"kind": "er", "densities": [0.2, 0.4]}, {"kind": "ba", "m": [5]}],
    "n": 50, "l": "log2", "k": [3], "methods": ["kmatch"], "instances": 4,
    "attack": {"theta": 1, "node_budget": 1000}, "seed": 9, "output": "x.csv", "threads": 2})"));
  EXPECT_EQ(expand_cells(c).size(), 3u);
  EXPECT_EQ(expand_cells(c)[2].n, 200u);
  EXPECT_FALSE(c.l.has_value());
  EXPECT_EQ(sybil_count(c, 50), 6u);
  EXPECT_EQ(c.methods, std::vector<Method>{Method::kKMatch});
  EXPECT_EQ(c.attack.theta, 1.0);
  EXPECT_EQ(c.attack.node_budget, 1000u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(parse_experiment_config(nlohmann::json::parse(R"({"paper_scale": true})")).instances,
            kPaperScaleInstances);
}

TEST(ExperimentConfigTest, RejectsBadConfigs) {
  for (const char* bad : {R"({"colour": 1})", R"({"k": [1]})", R"({"instances": 0})", R"({"l": "ln"})",
                          R"({"methods": ["magic"]})", R"({"attack": {"phi": 2}})", R"({"n": "many"})", "[]"}) {
    EXPECT_THROW(parse_experiment_config(nlohmann::json::parse(bad)), InputError) << bad;
  }
}

TEST(ExperimentTest, OneCellOneKGivesTwoRows) {
  const auto c = small_config(temp_path("two_rows.csv"));
  const auto run = run_experiment(c);
  EXPECT_EQ(run.rows_written, 2u);
  const auto rows = read_csv(c.output);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].at("method"), "pseudonym-only");
  EXPECT_EQ(rows[1].at("method"), "kmatch");
  for (const auto& r : rows) {
    EXPECT_EQ(r.at("error"), "");
    EXPECT_EQ(r.at("kind_param"), "0.3");
    EXPECT_EQ(r.at("l"), "3");
  }
  EXPECT_EQ(slurp(c.output).substr(0, slurp(c.output).find('\n')), kCsvHeader);
  // Pseudonymisation alone leaves the sybil-extended graph intact.
  EXPECT_EQ(rows[0].at("gcc_before"), rows[0].at("gcc_after"));
  EXPECT_EQ(rows[0].at("degree_cosine"), "1");
}

TEST(ExperimentTest, HeaderColumnOrder) {
  EXPECT_STREQ(kCsvHeader,
               "generator,kind_param,n,instance,seed,method,k,l,success_rate,gcc_before,gcc_after,avg_lcc_before,"
               "avg_lcc_after,degree_cosine,cand_count,truncated,error,ms");
}

TEST(ExperimentTest, DeterministicAcrossRunsAndThreads) {
  auto a = small_config(temp_path("det_a.csv"));
  a.k = {2, 3};
  a.instances = 3;
  auto b = a;
  b.output = temp_path("det_b.csv");
  b.threads = 3;
  fs::remove(b.output);
  run_experiment(a);
  run_experiment(b);
  EXPECT_EQ(rows_without_ms(a.output), rows_without_ms(b.output));
  EXPECT_EQ(rows_without_ms(a.output).size(), 13u);
}

TEST(ExperimentTest, ResumesAfterInterruption) {
  auto full = small_config(temp_path("resume_full.csv"));
  full.instances = 3;
  run_experiment(full);
  auto part = full;
  part.output = temp_path("resume_part.csv");
  // Keep header, two complete rows and half of the third.
  const auto lines = rows_without_ms(full.output);
  std::string text = slurp(full.output);
  std::size_t cut = 0;
  for (int i = 0; i < 3; ++i) cut = text.find('\n', cut) + 1;
  text = text.substr(0, cut) + text.substr(cut, 10);
  std::ofstream(part.output, std::ios::binary | std::ios::trunc) << text;
  const auto run = run_experiment(part);
  EXPECT_EQ(run.rows_skipped, 2u);
  EXPECT_EQ(run.rows_written, 4u);
  EXPECT_EQ(rows_without_ms(part.output), lines);
}

TEST(ExperimentTest, FailuresAreRecordedPerRow) {
  auto c = small_config(temp_path("errors.csv"));
  c.victims = 100;  // more than the 7 fingerprints three sybils allow
  const auto run = run_experiment(c);
  EXPECT_EQ(run.rows_written, 2u);
  for (const auto& r : read_csv(c.output)) EXPECT_NE(r.at("error"), "");
  const auto summary = nlohmann::json::parse(slurp(c.summary_path()));
  EXPECT_EQ(summary.at("cells")[0].at("errors"), 1);
}

TEST(ExperimentTest, SummaryHoldsCellMeans) {
  auto c = small_config(temp_path("summary.csv"));
  c.instances = 4;
  run_experiment(c);
  const auto rows = read_csv(c.output);
  const auto summary = nlohmann::json::parse(slurp(c.summary_path()));
  for (const auto& cell : summary.at("cells")) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (r.at("method") != cell.at("method").get<std::string>()) continue;
      sum += std::stod(r.at("success_rate"));
      ++count;
    }
    EXPECT_EQ(cell.at("count"), count);
    EXPECT_NEAR(cell.at("mean_success_rate").get<double>(), sum / static_cast<double>(count), 1e-12);
  }
}

TEST(ExperimentTest, RefusesForeignCsv) {
  auto c = small_config(temp_path("foreign.csv"));
  std::ofstream(c.output) << "a,b,c\n1,2,3\n";
  EXPECT_THROW(run_experiment(c), InputError);
}

TEST(CsvTest, QuotedFieldsRoundTrip) {
  ExperimentRecord r;
  r.generator = "er";
  r.kind_param = "0.5";
  r.error = "bad, \"quoted\" value";
  const auto fields = detail::split_csv_line(format_csv_row(r));
  ASSERT_EQ(fields.size(), 18u);
  EXPECT_EQ(fields[16], r.error);
}

}  // namespace
}  // namespace ksym
