#pragma once

// Desk-scale attacker-defender sweep. For every instance: generate a graph,
// plant sybils, then per method and k anonymise the sybil-extended graph,
// pseudonymise it, run the attack and score it. One CSV row per
// (instance, method, k); a summary JSON holds the per-cell means.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ksym/attack.hpp"
#include "ksym/errors.hpp"
#include "ksym/generators.hpp"
#include "ksym/kmatch.hpp"
#include "ksym/metrics.hpp"
#include "ksym/rng.hpp"

namespace ksym {

enum class Method { kPseudonymOnly, kKMatch };

inline std::string to_string(Method m) { return m == Method::kKMatch ? "kmatch" : "pseudonym-only"; }

inline Method method_from_string(const std::string& s) {
  if (s == "kmatch") return Method::kKMatch;
  if (s == "pseudonym-only") return Method::kPseudonymOnly;
  throw InputError("unknown method '" + s + "'");
}

/// The nineteen enumerated ER densities 0.1, 0.15, ..., 0.95, 1.0.
inline std::vector<double> default_densities() {
  std::vector<double> d;
  for (int i = 2; i <= 20; ++i) d.push_back(i / 20.0);
  return d;
}

inline std::vector<std::size_t> default_ba_ms() {
  std::vector<std::size_t> m;
  for (std::size_t i = 5; i <= 50; i += 5) m.push_back(i);
  return m;
}

struct GeneratorGrid {
  GeneratorKind kind = GeneratorKind::kErdosRenyi;
  std::vector<double> densities = default_densities();
  std::vector<std::size_t> ms = default_ba_ms();
  std::size_t seed_order = 50;
  std::size_t growth = 150;
};

inline constexpr std::size_t kPaperScaleInstances = 10000;

struct ExperimentConfig {
  std::vector<GeneratorGrid> generators = {GeneratorGrid{}};
  /// ER order; BA order is seed_order + growth.
  std::size_t n = 200;
  /// Sybil count; unset means ceil(log2 n).
  std::optional<std::size_t> l;
  std::vector<std::size_t> k = {2, 5, 8};
  std::vector<Method> methods = {Method::kPseudonymOnly, Method::kKMatch};
  std::size_t instances = 50;
  /// Victim count; unset means default_victim_count(n, l).
  std::optional<std::size_t> victims;
  AttackParams attack;
  KMatchOptions kmatch;
  std::uint64_t seed = 1;
  std::string output = "results.csv";
  /// Empty means the output path with ".summary.json" replacing ".csv".
  std::string summary;
  std::size_t threads = 1;

  std::string summary_path() const {
    if (!summary.empty()) return summary;
    std::string s = output;
    if (s.size() >= 4 && s.compare(s.size() - 4, 4, ".csv") == 0) s.resize(s.size() - 4);
    return s + ".summary.json";
  }

  void validate() const {
    if (instances < 1) throw InputError("instances must be >= 1");
    if (methods.empty()) throw InputError("at least one method required");
    if (k.empty()) throw InputError("at least one k required");
    for (std::size_t x : k) {
      if (x < 2) throw InputError("k values must be >= 2");
    }
    if (l && *l < 1) throw InputError("l must be >= 1");
    if (threads < 1) throw InputError("threads must be >= 1");
    if (generators.empty()) throw InputError("at least one generator required");
    for (const auto& g : generators) {
      if (g.kind == GeneratorKind::kErdosRenyi && g.densities.empty()) throw InputError("ER grid needs densities");
      if (g.kind == GeneratorKind::kBarabasiAlbert && g.ms.empty()) throw InputError("BA grid needs m values");
    }
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
      throw InputError("unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace detail

/// Schema (all keys optional):
///   generators: [{kind: "er", densities: [..]} | {kind: "ba", m: [..],
///                seed_order, growth}]
///   n, l (integer or "log2"), k: [..], methods: ["pseudonym-only","kmatch"],
///   instances, paper_scale (bool, sets instances to 10000), victims,
///   attack: {theta, degree_weight, additions_only, candidate_cap,
///            matching_cap, matching_node_cap, node_budget},
///   seed, output, summary, threads
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"generators", "n", "l", "k", "methods", "instances", "paper_scale", "victims", "attack",
                          "seed", "output", "summary", "threads"},
                         "config");
  ExperimentConfig c;
  try {
    if (j.contains("generators")) {
      c.generators.clear();
      for (const auto& g : j.at("generators")) {
        detail::reject_unknown(g, {"kind", "densities", "m", "seed_order", "growth"}, "generator");
        GeneratorGrid grid;
        const std::string kind = g.value("kind", "er");
        if (kind == "er") {
          grid.kind = GeneratorKind::kErdosRenyi;
        } else if (kind == "ba") {
          grid.kind = GeneratorKind::kBarabasiAlbert;
        } else {
          throw InputError("unknown generator kind '" + kind + "'");
        }
        if (g.contains("densities")) grid.densities = g.at("densities").get<std::vector<double>>();
        if (g.contains("m")) grid.ms = g.at("m").get<std::vector<std::size_t>>();
        grid.seed_order = g.value("seed_order", grid.seed_order);
        grid.growth = g.value("growth", grid.growth);
        c.generators.push_back(std::move(grid));
      }
    }
    c.n = j.value("n", c.n);
    if (j.contains("l")) {
      const auto& l = j.at("l");
      if (l.is_string()) {
        if (l.get<std::string>() != "log2") throw InputError("l must be an integer or \"log2\"");
      } else {
        c.l = l.get<std::size_t>();
      }
    }
    if (j.contains("k")) c.k = j.at("k").get<std::vector<std::size_t>>();
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
    }
    c.instances = j.value("instances", c.instances);
    if (j.value("paper_scale", false)) c.instances = kPaperScaleInstances;
    if (j.contains("victims")) c.victims = j.at("victims").get<std::size_t>();
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      detail::reject_unknown(a,
                             {"theta", "degree_weight", "additions_only", "candidate_cap", "matching_cap",
                              "matching_node_cap", "node_budget"},
                             "attack");
      c.attack.theta = a.value("theta", c.attack.theta);
      c.attack.degree_weight = a.value("degree_weight", c.attack.degree_weight);
      c.attack.additions_only = a.value("additions_only", c.attack.additions_only);
      c.attack.candidate_cap = a.value("candidate_cap", c.attack.candidate_cap);
      c.attack.matching_cap = a.value("matching_cap", c.attack.matching_cap);
      c.attack.matching_node_cap = a.value("matching_node_cap", c.attack.matching_node_cap);
      c.attack.node_budget = a.value("node_budget", c.attack.node_budget);
    }
    c.seed = j.value("seed", c.seed);
    c.output = j.value("output", c.output);
    c.summary = j.value("summary", c.summary);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  return parse_experiment_config(j);
}

inline std::size_t sybil_count(const ExperimentConfig& c, std::size_t n) {
  if (c.l) return *c.l;
  std::size_t l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return std::max<std::size_t>(l, 1);
}

inline constexpr const char* kCsvHeader =
    "generator,kind_param,n,instance,seed,method,k,l,success_rate,gcc_before,gcc_after,avg_lcc_before,"
    "avg_lcc_after,degree_cosine,cand_count,truncated,error,ms";

struct ExperimentRecord {
  std::string generator;
  std::string kind_param;
  std::size_t n = 0;
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  Method method = Method::kPseudonymOnly;
  std::size_t k = 0;
  std::size_t l = 0;
  double success_rate = 0;
  UtilityReport utility;
  std::size_t cand_count = 0;
  bool truncated = false;
  std::string error;
  double ms = 0;
};

/// One grid cell: a generator kind with one parameter value.
struct Cell {
  GeneratorKind kind = GeneratorKind::kErdosRenyi;
  double density = 0;
  std::size_t m = 0;
  std::size_t seed_order = 50;
  std::size_t growth = 150;
  std::size_t n = 0;

  std::string generator() const { return kind == GeneratorKind::kErdosRenyi ? "er" : "ba"; }
  std::string kind_param() const;
};

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' || c == '\r' ? ' ' : c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string Cell::kind_param() const {
  return kind == GeneratorKind::kErdosRenyi ? detail::format_double(density) : std::to_string(m);
}

inline std::vector<Cell> expand_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (const auto& g : c.generators) {
    if (g.kind == GeneratorKind::kErdosRenyi) {
      for (double d : g.densities) cells.push_back({g.kind, d, 0, 0, 0, c.n});
    } else {
      for (std::size_t m : g.ms) cells.push_back({g.kind, 0, m, g.seed_order, g.growth, g.seed_order + g.growth});
    }
  }
  return cells;
}

inline std::string format_csv_row(const ExperimentRecord& r) {
  const auto& u = r.utility;
  std::ostringstream o;
  o << r.generator << ',' << r.kind_param << ',' << r.n << ',' << r.instance << ',' << r.seed << ','
    << to_string(r.method) << ',' << r.k << ',' << r.l << ',' << detail::format_double(r.success_rate) << ','
    << detail::format_double(u.gcc_before) << ',' << detail::format_double(u.gcc_after) << ','
    << detail::format_double(u.avg_lcc_before) << ',' << detail::format_double(u.avg_lcc_after) << ','
    << detail::format_double(u.degree_cosine) << ',' << r.cand_count << ',' << (r.truncated ? 1 : 0) << ','
    << detail::csv_field(r.error) << ',' << detail::format_double(std::round(r.ms * 1000) / 1000);
  return o.str();
}

/// Row parsed back from a CSV line; numeric fields as text.
using CsvRow = std::map<std::string, std::string>;

inline std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = detail::split_csv_line(line);
  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    // A torn final line from an interrupted run is dropped.
    if (fields.size() != header.size()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError("expected " + std::to_string(header.size()) + " fields", lineno);
    }
    CsvRow row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Per-instance seed; sub-seeds use derive_seed(instance seed, purpose).
inline std::uint64_t instance_seed(std::uint64_t master, std::size_t cell, std::size_t instance) {
  return derive_seed(derive_seed(master, cell, 0x63656c6c), instance, 0x696e7374);
}

namespace seed_purpose {
inline constexpr std::uint64_t kGraph = 0, kSeedKind = 1, kVictims = 2, kSybils = 3, kPseudonymOnly = 4;
inline std::uint64_t kmatch(std::size_t k) { return 100 + k; }
inline std::uint64_t pseudonym(std::size_t k) { return 200 + k; }
}  // namespace seed_purpose

inline Graph generate_cell_graph(const Cell& cell, std::uint64_t seed) {
  const std::uint64_t gs = derive_seed(seed, seed_purpose::kGraph);
  if (cell.kind == GeneratorKind::kErdosRenyi) return er_graph(GeneratorSpec::erdos_renyi(cell.n, cell.density, gs));
  Rng pick(derive_seed(seed, seed_purpose::kSeedKind));
  return ba_graph(GeneratorSpec::barabasi_albert(cell.seed_order, cell.growth, cell.m, gs), pick_seed_kind(pick));
}

struct AttackScore {
  double success_rate = 0;
  std::size_t cand_count = 0;
  bool truncated = false;
};

inline AttackScore score_attack(const Graph& published, const Pseudonymization& phi, const AttackEnvironment& env,
                                const AttackParams& params) {
  const auto res = reidentify(published, AttackerView::from(env), params);
  const auto outcomes = candidate_outcomes(res, phi, env.victims);
  AttackScore s;
  s.success_rate = to_double(success_rate(outcomes));
  s.cand_count = res.candidates.size();
  s.truncated = res.truncated || std::any_of(outcomes.begin(), outcomes.end(),
                                             [](const CandidateOutcome& o) { return o.truncated; });
  return s;
}

/// Rows of one instance in (method, k) config order. Failures land in the
/// error column of the affected rows.
inline std::vector<ExperimentRecord> run_instance(const ExperimentConfig& c, const Cell& cell, std::size_t cell_index,
                                                  std::size_t instance) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = instance_seed(c.seed, cell_index, instance);
  const std::size_t l = sybil_count(c, cell.n);
  ExperimentRecord base;
  base.generator = cell.generator();
  base.kind_param = cell.kind_param();
  base.n = cell.n;
  base.instance = instance;
  base.seed = seed;
  base.l = l;
  std::vector<ExperimentRecord> rows;
  auto emit_all = [&](const std::string& error) {
    for (Method m : c.methods) {
      for (std::size_t k : c.k) {
        ExperimentRecord r = base;
        r.method = m;
        r.k = k;
        r.error = error;
        rows.push_back(r);
      }
    }
    return rows;
  };
  AttackEnvironment env;
  try {
    const Graph g = generate_cell_graph(cell, seed);
    const std::size_t victim_count = c.victims.value_or(default_victim_count(g.order(), l));
    const VertexSet victims = pick_victims(g.order(), victim_count, derive_seed(seed, seed_purpose::kVictims));
    env = inject_sybils(g, l, victims, derive_seed(seed, seed_purpose::kSybils));
  } catch (const std::exception& e) {
    return emit_all(e.what());
  }
  std::optional<ExperimentRecord> pseudonym_only;
  for (Method m : c.methods) {
    for (std::size_t k : c.k) {
      ExperimentRecord r = base;
      r.method = m;
      r.k = k;
      if (m == Method::kPseudonymOnly && pseudonym_only) {
        r = *pseudonym_only;
        r.k = k;
        rows.push_back(r);
        continue;
      }
      const auto t0 = Clock::now();
      try {
        if (m == Method::kPseudonymOnly) {
          r.utility = utility_report(env.g_plus, env.g_plus);
          const auto [pub, phi] = pseudonymize(env.g_plus, derive_seed(seed, seed_purpose::kPseudonymOnly));
          const AttackScore s = score_attack(pub, phi, env, c.attack);
          r.success_rate = s.success_rate;
          r.cand_count = s.cand_count;
          r.truncated = s.truncated;
        } else {
          const Graph out = kmatch(env.g_plus, k, derive_seed(seed, seed_purpose::kmatch(k)), c.kmatch).graph_out;
          r.utility = utility_report(env.g_plus, out);
          const auto [pub, phi] = pseudonymize(out, derive_seed(seed, seed_purpose::pseudonym(k)));
          const AttackScore s = score_attack(pub, phi, env, c.attack);
          r.success_rate = s.success_rate;
          r.cand_count = s.cand_count;
          r.truncated = s.truncated;
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      r.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      if (m == Method::kPseudonymOnly) pseudonym_only = r;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

struct ExperimentRun {
  std::size_t rows_written = 0;
  std::size_t rows_skipped = 0;
  std::string csv_path;
  std::string summary_path;
};

/// Row key used for resuming: generator, kind_param, instance, method, k.
using RowKey = std::tuple<std::string, std::string, std::string, std::string, std::string>;

inline RowKey row_key(const CsvRow& r) {
  return {r.at("generator"), r.at("kind_param"), r.at("instance"), r.at("method"), r.at("k")};
}

inline RowKey row_key(const ExperimentRecord& r) {
  return {r.generator, r.kind_param, std::to_string(r.instance), to_string(r.method), std::to_string(r.k)};
}

/// Per-cell means over the CSV rows without an error; cells are keyed by
/// generator, kind_param, method and k.
inline nlohmann::json summarise_csv(const std::vector<CsvRow>& rows) {
  struct Acc {
    std::size_t count = 0, errors = 0, truncated = 0;
    std::map<std::string, double> sums;
  };
  static const char* kMeans[] = {"success_rate", "gcc_before", "gcc_after", "avg_lcc_before", "avg_lcc_after",
                                 "degree_cosine", "cand_count", "ms"};
  std::map<std::tuple<std::string, std::string, std::string, std::size_t>, Acc> cells;
  for (const CsvRow& r : rows) {
    auto& a = cells[{r.at("generator"), r.at("kind_param"), r.at("method"), std::stoul(r.at("k"))}];
    if (!r.at("error").empty()) {
      ++a.errors;
      continue;
    }
    ++a.count;
    a.truncated += r.at("truncated") == "1";
    for (const char* f : kMeans) a.sums[f] += std::stod(r.at(f));
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, a] : cells) {
    const auto& [gen, param, method, k] = key;
    nlohmann::json cell = {{"generator", gen}, {"kind_param", param}, {"method", method}, {"k", k},
                           {"count", a.count}, {"errors", a.errors}, {"truncated", a.truncated}};
    for (const char* f : kMeans) {
      cell[std::string("mean_") + f] = a.count ? a.sums.at(f) / static_cast<double>(a.count) : 0.0;
    }
    out.push_back(std::move(cell));
  }
  return out;
}

/// Runs the sweep, appending to config.output. Rows already present (same
/// key) are skipped, so an interrupted run resumes where it stopped. Rows
/// are written in instance order regardless of thread count.
inline ExperimentRun run_experiment(const ExperimentConfig& c,
                                    const std::function<void(const ExperimentRecord&)>& on_row = {}) {
  c.validate();
  ExperimentRun run;
  run.csv_path = c.output;
  run.summary_path = c.summary_path();
  std::set<RowKey> done;
  bool have_header = false;
  {
    std::ifstream probe(c.output);
    std::string first;
    if (probe && std::getline(probe, first)) {
      if (first != kCsvHeader) throw InputError(c.output + " exists with a different header");
      have_header = true;
    }
  }
  if (have_header) {
    for (const CsvRow& r : read_csv(c.output)) done.insert(row_key(r));
    // Drop a torn final line left by a crash.
    std::ifstream in(c.output, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!content.empty() && content.back() != '\n') {
      content.resize(content.rfind('\n') + 1);
      std::ofstream(c.output, std::ios::binary | std::ios::trunc) << content;
    }
  }
  std::ofstream out(c.output, std::ios::app);
  if (!out) throw InputError("cannot write " + c.output);
  if (!have_header) out << kCsvHeader << '\n' << std::flush;

  const auto cells = expand_cells(c);
  struct Job {
    std::size_t cell;
    std::size_t instance;
  };
  std::vector<Job> jobs;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t i = 0; i < c.instances; ++i) {
      bool complete = true;
      for (Method m : c.methods) {
        for (std::size_t k : c.k) {
          ExperimentRecord probe;
          probe.generator = cells[ci].generator();
          probe.kind_param = cells[ci].kind_param();
          probe.instance = i;
          probe.method = m;
          probe.k = k;
          complete = complete && done.count(row_key(probe));
        }
      }
      if (complete) {
        run.rows_skipped += c.methods.size() * c.k.size();
      } else {
        jobs.push_back({ci, i});
      }
    }
  }

  std::mutex mu;
  std::map<std::size_t, std::vector<ExperimentRecord>> pending;
  std::size_t next_to_write = 0;
  std::atomic<std::size_t> next_job{0};
  auto flush_ready = [&] {
    for (auto it = pending.find(next_to_write); it != pending.end(); it = pending.find(next_to_write)) {
      for (const auto& r : it->second) {
        if (done.count(row_key(r))) {
          ++run.rows_skipped;
          continue;
        }
        out << format_csv_row(r) << '\n';
        ++run.rows_written;
        if (on_row) on_row(r);
      }
      out.flush();
      pending.erase(it);
      ++next_to_write;
    }
  };
  auto worker = [&] {
    for (std::size_t j = next_job++; j < jobs.size(); j = next_job++) {
      auto rows = run_instance(c, cells[jobs[j].cell], jobs[j].cell, jobs[j].instance);
      std::lock_guard<std::mutex> lock(mu);
      pending.emplace(j, std::move(rows));
      flush_ready();
    }
  };
  const std::size_t width = std::min(c.threads, std::max<std::size_t>(jobs.size(), 1));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  out.close();

  nlohmann::json summary = {{"csv", c.output},
                            {"master_seed", c.seed},
                            {"instances_per_cell", c.instances},
                            {"cells", summarise_csv(read_csv(c.output))}};
  std::ofstream(run.summary_path) << summary.dump(2) << '\n';
  return run;
}

}  // namespace ksym
