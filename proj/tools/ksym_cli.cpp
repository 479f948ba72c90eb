// ksym: command-line front end.
//
//   ksym generate   --out DIR [--kind er|ba ...]        numbered edge lists + manifest
//   ksym anonymize  --k K --seed S IN OUT [--vat F]     K-Match (or pseudonym-only)
//   ksym check      --property P --k K [--l L] GRAPH    exit 1 when violated
//   ksym attack     --env ENV | --graph G --l L ...     JSON attack result
//   ksym oracle     --env ENV | --graph G --max-l L     exact probabilities
//   ksym experiment --config C                          CSV + summary JSON
//   ksym fixtures   --out DIR                           example graphs + expectations
//
// Exit codes: 0 ok, 1 property violated, 2 usage or input error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksym/attack.hpp"
#include "ksym/bundle.hpp"
#include "ksym/errors.hpp"
#include "ksym/experiment.hpp"
#include "ksym/fixtures.hpp"
#include "ksym/generators.hpp"
#include "ksym/graph.hpp"
#include "ksym/kmatch.hpp"
#include "ksym/oracle.hpp"
#include "ksym/privacy.hpp"
#include "ksym/rational.hpp"
#include "ksym/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;

json report_json(const ksym::PropertyReport& r) {
  json j = {{"property", ksym::to_string(r.property)}, {"k", r.k}, {"holds", r.holds}};
  j["l"] = r.l ? json(*r.l) : json(nullptr);
  j["witness"] = r.witness ? json(*r.witness) : json(nullptr);
  if (r.samples) j["samples"] = *r.samples;
  return j;
}

json rational_json(const ksym::Rational& r) {
  return {{"exact", ksym::to_fraction_string(r)}, {"decimal", ksym::to_double(r)}};
}

ksym::SupportRule rule_from_string(const std::string& s) {
  if (s == "class") return ksym::SupportRule::kIsomorphismClass;
  if (s == "labelled") return ksym::SupportRule::kLabelled;
  throw ksym::InputError("unknown support rule '" + s + "'");
}

// -- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string kind = "er";
  std::size_t n = 200;
  double density = 0.5;
  std::size_t m = 5;
  std::size_t seed_order = 50;
  std::size_t growth = 150;
  std::string seed_kind = "random";
  std::size_t count = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  fs::create_directories(a.out);
  json manifest = json::array();
  for (std::size_t i = 0; i < a.count; ++i) {
    const std::uint64_t s = ksym::derive_seed(a.seed, i);
    char name[32];
    std::snprintf(name, sizeof name, "graph_%04zu.el", i);
    json entry = {{"file", name}, {"kind", a.kind}, {"rng_seed", s}};
    ksym::Graph g;
    if (a.kind == "er") {
      g = ksym::er_graph(ksym::GeneratorSpec::erdos_renyi(a.n, a.density, s));
      entry["n"] = a.n;
      entry["density"] = a.density;
    } else if (a.kind == "ba") {
      ksym::Rng pick(ksym::derive_seed(s, 1));
      const ksym::SeedKind sk =
          a.seed_kind == "random" ? ksym::pick_seed_kind(pick) : ksym::seed_kind_from_string(a.seed_kind);
      g = ksym::ba_graph(ksym::GeneratorSpec::barabasi_albert(a.seed_order, a.growth, a.m, s), sk);
      entry["n"] = a.seed_order + a.growth;
      entry["m"] = a.m;
      entry["seed_order"] = a.seed_order;
      entry["growth"] = a.growth;
      entry["seed_kind"] = ksym::to_string(sk);
    } else {
      throw ksym::InputError("unknown generator kind '" + a.kind + "'");
    }
    ksym::save_edge_list(g, (fs::path(a.out) / name).string());
    manifest.push_back(entry);
  }
  std::ofstream((fs::path(a.out) / "manifest.json").string()) << manifest.dump(2) << '\n';
  std::cout << json{{"written", a.count}, {"dir", a.out}}.dump() << '\n';
  return kExitOk;
}

// -- anonymize --------------------------------------------------------------

struct AnonymizeArgs {
  std::string method = "kmatch";
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::string in;
  std::string out;
  std::string vat;
};

int run_anonymize(const AnonymizeArgs& a) {
  const ksym::Graph g = ksym::load_edge_list(a.in);
  json summary = {{"method", a.method}, {"n_in", g.order()}};
  if (a.method == "kmatch") {
    const auto res = ksym::kmatch(g, a.k, a.seed);
    ksym::save_edge_list(res.graph_out, a.out);
    summary["k"] = a.k;
    summary["n_out"] = res.graph_out.order();
    summary["added_edges"] = res.added_edges.size();
    if (!a.vat.empty()) {
      json vat = {{"k", res.vat.k}, {"rows", res.vat.rows}, {"dummies", res.vat.dummies}};
      std::ofstream(a.vat) << vat.dump(2) << '\n';
    }
  } else if (a.method == "pseudonym-only") {
    const auto [pub, phi] = ksym::pseudonymize(g, a.seed);
    ksym::save_edge_list(pub, a.out);
    summary["n_out"] = pub.order();
    summary["added_edges"] = 0;
  } else {
    throw ksym::InputError("unknown method '" + a.method + "'");
  }
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

// -- check ------------------------------------------------------------------

struct CheckArgs {
  std::string property;
  std::size_t k = 2;
  std::optional<std::size_t> l;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  std::string graph;
};

int run_check(const CheckArgs& a) {
  const ksym::Graph g = ksym::load_edge_list(a.graph);
  const ksym::Property p = ksym::property_from_string(a.property);
  ksym::PropertyReport r;
  if (a.samples > 0) {
    if (p != ksym::Property::klAnonymity && p != ksym::Property::klAdjacencyAnonymity) {
      throw ksym::InputError("--samples applies to kl properties only");
    }
    if (!a.l) throw ksym::InputError(a.property + " needs --l");
    r = ksym::sample_kl(g, a.k, *a.l, p == ksym::Property::klAdjacencyAnonymity, a.samples, a.seed);
  } else {
    r = ksym::check_property(g, p, a.k, a.l);
  }
  std::cout << report_json(r).dump() << '\n';
  return r.holds ? kExitOk : kExitViolated;
}

// -- attack -----------------------------------------------------------------

struct AttackArgs {
  std::string env;
  std::string graph;
  std::size_t l = 0;
  std::optional<std::size_t> victims;
  std::string method = "kmatch";
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::string write_env;
  ksym::AttackParams params;
  bool allow_removals = false;
};

ksym::EnvironmentBundle bundle_from_args(const std::string& env, const std::string& graph, std::size_t l,
                                         std::optional<std::size_t> victims, const std::string& method,
                                         std::size_t k, std::uint64_t seed, const std::string& write_env) {
  if (!env.empty()) {
    if (!graph.empty()) throw ksym::InputError("give either --env or --graph");
    return ksym::load_bundle(env);
  }
  if (graph.empty()) throw ksym::InputError("give --env or --graph");
  if (l == 0) throw ksym::InputError("--graph needs --l");
  const ksym::Graph g = ksym::load_edge_list(graph);
  auto b = ksym::plant_and_publish(g, l, victims.value_or(ksym::default_victim_count(g.order(), l)), method, k,
                                   seed);
  if (!write_env.empty()) ksym::save_bundle(b, write_env);
  return b;
}

int run_attack(AttackArgs a) {
  a.params.additions_only = !a.allow_removals;
  const auto b = bundle_from_args(a.env, a.graph, a.l, a.victims, a.method, a.k, a.seed, a.write_env);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = ksym::reidentify(b.published, ksym::AttackerView::from(b.env), a.params);
  const auto outcomes = ksym::candidate_outcomes(res, b.phi, b.env.victims);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  json matchings = json::array();
  bool matching_truncated = false;
  for (const auto& o : outcomes) {
    if (o.truth_in) matchings.push_back(o.optimal_matchings.str());
    matching_truncated = matching_truncated || o.truncated;
  }
  json out = {{"method", b.method},
              {"k", b.k},
              {"l", b.env.l()},
              {"victims", b.env.victims.size()},
              {"candidates", res.candidates.size()},
              {"candidates_seen", res.candidates_seen},
              {"best_score", res.best_score},
              {"optimal_matchings_truth_in", matchings},
              {"success_rate", rational_json(ksym::success_rate(outcomes))},
              {"search_truncated", res.truncated},
              {"matching_truncated", matching_truncated},
              {"search_nodes", res.nodes},
              {"ms", ms}};
  std::cout << out.dump() << '\n';
  return kExitOk;
}

// -- oracle -----------------------------------------------------------------

struct OracleArgs {
  std::string env;
  std::string graph;
  std::optional<std::size_t> max_l;
  std::string rule = "class";
  ksym::OracleBudget budget;
};

int run_oracle(const OracleArgs& a) {
  const ksym::SupportRule rule = rule_from_string(a.rule);
  if (a.max_l) {
    if (a.graph.empty() || !a.env.empty()) throw ksym::InputError("--max-l needs --graph and no --env");
    const auto r = ksym::max_attack_success(ksym::load_edge_list(a.graph), *a.max_l, rule, a.budget);
    json out = {{"rule", ksym::to_string(rule)},
                {"l", *a.max_l},
                {"max_attack_success", rational_json(r.probability)},
                {"witness",
                 {{"sybils", std::vector<ksym::VertexId>(r.sybils.begin(), r.sybils.end())},
                  {"victims", std::vector<ksym::VertexId>(r.victims.begin(), r.victims.end())},
                  {"victim", r.victim}}}};
    std::cout << out.dump() << '\n';
    return kExitOk;
  }
  if (a.env.empty()) throw ksym::InputError("give --env, or --graph with --max-l");
  const auto b = ksym::load_bundle(a.env);
  const auto p = ksym::victim_probabilities(b.published, b.env, b.phi.phi.image, rule, a.budget);
  json victims = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    json v = rational_json(p[i]);
    v["victim"] = b.env.victims.members()[i];
    victims.push_back(v);
  }
  std::cout << json{{"rule", ksym::to_string(rule)}, {"victims", victims}}.dump() << '\n';
  return kExitOk;
}

// -- experiment -------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  bool paper_scale = false;
  std::string output;
  std::optional<std::size_t> threads;
  bool quiet = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  ksym::ExperimentConfig c = ksym::load_experiment_config(a.config);
  if (a.paper_scale) c.instances = ksym::kPaperScaleInstances;
  if (!a.output.empty()) {
    c.output = a.output;
    c.summary.clear();
  }
  if (a.threads) c.threads = *a.threads;
  std::size_t seen = 0;
  const auto run = ksym::run_experiment(c, [&](const ksym::ExperimentRecord& r) {
    if (a.quiet || ++seen % 20 != 0) return;
    std::cerr << "rows " << seen << ": " << r.generator << ' ' << r.kind_param << " instance " << r.instance << '\n';
  });
  std::cout << json{{"csv", run.csv_path},
                    {"summary", run.summary_path},
                    {"rows_written", run.rows_written},
                    {"rows_skipped", run.rows_skipped}}
                   .dump()
            << '\n';
  return kExitOk;
}

// -- fixtures ---------------------------------------------------------------

int run_fixtures(const std::string& out_dir) {
  fs::create_directories(out_dir);
  json expectations = json::array();
  for (const auto& f : ksym::fixtures::named_fixtures()) {
    const std::string file = f.name + ".el";
    ksym::save_edge_list(f.graph, (fs::path(out_dir) / file).string());
    json reports = json::array();
    reports.push_back(report_json(ksym::check_property(f.graph, ksym::Property::kSymmetry, 2)));
    reports.push_back(report_json(ksym::check_property(f.graph, ksym::Property::kAutomorphismDef6, 2)));
    reports.push_back(report_json(ksym::check_property(f.graph, ksym::Property::kDegree, 2)));
    for (std::size_t l : {1, 2}) {
      reports.push_back(report_json(ksym::check_property(f.graph, ksym::Property::klAnonymity, 2, l)));
    }
    expectations.push_back({{"name", f.name},
                            {"file", file},
                            {"max_k_degree", ksym::max_k_degree(f.graph)},
                            {"reports", reports}});
  }
  std::ofstream((fs::path(out_dir) / "expectations.json").string()) << expectations.dump(2) << '\n';
  std::cout << json{{"written", expectations.size()}, {"dir", out_dir}}.dump() << '\n';
  return kExitOk;
}

void add_attack_params(CLI::App* cmd, ksym::AttackParams& p, bool& allow_removals) {
  cmd->add_option("--theta", p.theta, "keep candidates within theta of the best score")->check(CLI::NonNegativeNumber);
  cmd->add_option("--degree-weight", p.degree_weight, "weight of sybil degree differences");
  cmd->add_flag("--allow-removals", allow_removals, "do not require sybil-sybil edges to survive");
  cmd->add_option("--candidate-cap", p.candidate_cap, "stored candidate limit");
  cmd->add_option("--matching-cap", p.matching_cap, "optimal matchings counted per candidate");
  cmd->add_option("--node-budget", p.node_budget, "sybil-search node budget");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph anonymisation lab: K-Match, active attacks, exact oracle"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write seeded random graphs and a manifest");
  generate->add_option("--kind", gen.kind, "er or ba")->check(CLI::IsMember({"er", "ba"}));
  generate->add_option("--n", gen.n, "ER order");
  generate->add_option("--density", gen.density, "ER edge probability");
  generate->add_option("--m", gen.m, "BA edges per new vertex");
  generate->add_option("--seed-order", gen.seed_order, "BA seed graph order");
  generate->add_option("--growth", gen.growth, "BA vertices added");
  generate->add_option("--seed-kind", gen.seed_kind, "complete, ring_lattice, er_half or random")
      ->check(CLI::IsMember({"complete", "ring_lattice", "er_half", "random"}));
  generate->add_option("--count", gen.count, "graphs to write")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "master seed");
  generate->add_option("--out", gen.out, "output directory")->required();

  AnonymizeArgs anon;
  auto* anonymize = app.add_subcommand("anonymize", "publish a graph with K-Match or pseudonyms only");
  anonymize->add_option("--method", anon.method, "kmatch or pseudonym-only")
      ->check(CLI::IsMember({"kmatch", "pseudonym-only"}));
  anonymize->add_option("--k", anon.k, "symmetry level")->check(CLI::Range(2, 1 << 20));
  anonymize->add_option("--seed", anon.seed, "seed");
  anonymize->add_option("in", anon.in, "input edge list")->required();
  anonymize->add_option("out", anon.out, "output edge list")->required();
  anonymize->add_option("--vat", anon.vat, "write the alignment table as JSON");

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "check a privacy property; exit 1 when it fails");
  check->add_option("--property", chk.property,
                    "k-degree, k-neighbourhood, k-automorphism, k-symmetry, kl-anonymity, kl-adjacency-anonymity")
      ->required();
  check->add_option("--k", chk.k, "k")->check(CLI::PositiveNumber);
  check->add_option("--l", chk.l, "sybil budget for kl properties")->check(CLI::PositiveNumber);
  check->add_option("--samples", chk.samples, "Monte-Carlo sybil sets instead of exact enumeration");
  check->add_option("--seed", chk.seed, "Monte-Carlo seed");
  check->add_option("graph", chk.graph, "edge list")->required();

  AttackArgs att;
  auto* attack = app.add_subcommand("attack", "run the re-identification attack on an environment");
  attack->add_option("--env", att.env, "environment sidecar JSON");
  attack->add_option("--graph", att.graph, "plant sybils in this edge list instead");
  attack->add_option("--l", att.l, "sybils to plant");
  attack->add_option("--victims", att.victims, "victims to plant");
  attack->add_option("--method", att.method, "kmatch or pseudonym-only")
      ->check(CLI::IsMember({"kmatch", "pseudonym-only"}));
  attack->add_option("--k", att.k, "symmetry level for kmatch")->check(CLI::Range(2, 1 << 20));
  attack->add_option("--seed", att.seed, "seed");
  attack->add_option("--write-env", att.write_env, "save the planted environment to this directory");
  add_attack_params(attack, att.params, att.allow_removals);

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "exact success probabilities");
  oracle->add_option("--env", orc.env, "environment sidecar JSON");
  oracle->add_option("--graph", orc.graph, "graph for --max-l");
  oracle->add_option("--max-l", orc.max_l, "maximise over attacks with at most this many sybils");
  oracle->add_option("--rule", orc.rule, "class or labelled")->check(CLI::IsMember({"class", "labelled"}));
  oracle->add_option("--max-domain", orc.budget.max_domain, "largest |S u I|");
  oracle->add_option("--max-order", orc.budget.max_order, "largest published graph");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "run a sweep from a JSON config");
  experiment->add_option("--config", exp.config, "config JSON")->required();
  experiment->add_flag("--paper-scale", exp.paper_scale, "10000 instances per cell");
  experiment->add_option("--output", exp.output, "override the CSV path");
  experiment->add_option("--threads", exp.threads, "worker threads")->check(CLI::PositiveNumber);
  experiment->add_flag("--quiet", exp.quiet, "no progress on stderr");

  std::string fixtures_out;
  auto* fixtures = app.add_subcommand("fixtures", "write the example graphs and their property reports");
  fixtures->add_option("--out", fixtures_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*anonymize) return run_anonymize(anon);
    if (*check) return run_check(chk);
    if (*attack) return run_attack(att);
    if (*oracle) return run_oracle(orc);
    if (*experiment) return run_experiment_cmd(exp);
    if (*fixtures) return run_fixtures(fixtures_out);
  } catch (const ksym::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ksym::BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
