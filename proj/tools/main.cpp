#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sortition/adversary.hpp"
#include "sortition/error.hpp"
#include "sortition/model.hpp"
#include "sortition/panels.hpp"
#include "sortition/report.hpp"
#include "sortition/rounding.hpp"
#include "sortition/solver.hpp"

namespace fs = std::filesystem;
using namespace sortition;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Global {
  std::uint64_t seed = 42;
  std::string out = ".";
  std::string format = "json";
};

struct InstanceArgs {
  std::string agents;
  std::string quotas;
  int k = 0;

  void attach(CLI::App* app) {
    app->add_option("--agents", agents, "Agents CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--quotas", quotas, "Quotas CSV")->required()->check(CLI::ExistingFile);
    app->add_option("-k,--k", k, "Panel size")->required();
  }
  Instance load() const { return load_instance(agents, quotas, k); }
};

struct SolveArgs {
  std::string objective = "goldilocks:1";
  std::string backend = "colgen";
  double eps = 1e-8;
  int max_columns = 20000;

  void attach(CLI::App* app, bool with_objective = true) {
    if (with_objective) app->add_option("--objective", objective, "Objective spec");
    app->add_option("--backend", backend, "colgen | brute");
    app->add_option("--eps", eps, "Column generation tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-columns", max_columns, "Column budget")->check(CLI::PositiveNumber);
  }
  SolveConfig config(std::uint64_t seed) const {
    SolveConfig cfg;
    cfg.objective = EqualityObjective::parse(objective);
    cfg.backend = parse_backend(backend);
    cfg.eps_colgen = eps;
    cfg.max_columns = max_columns;
    cfg.seed = seed;
    return cfg;
  }
};

void write_file(const Global& g, const std::string& name, const std::string& text) {
  fs::create_directories(g.out);
  const fs::path path = fs::path(g.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_json(const Global& g, const std::string& name, const nlohmann::ordered_json& j) {
  write_file(g, name, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

bool is_csv(const Global& g) { return g.format == "csv"; }

int finish_solve(const Global& g, const Instance& inst, const SolveResult& r) {
  write_json(g, "result.json", to_json(inst, r));
  if (is_csv(g)) {
    std::ostringstream csv;
    csv << "id,pi\n";
    for (int i = 0; i < inst.n(); ++i) csv << inst.agent(i).id << ',' << format_real(r.pi.pi[i]) << '\n';
    write_file(g, "marginals.csv", csv.str());
  }
  std::cout << r.objective.spec() << ": min " << format_real(r.pi.min()) << " max "
            << format_real(r.pi.max()) << " value " << format_real(r.objective_value) << "\n";
  if (!r.converged) {
    std::cerr << "warning: NONCONVERGED: budget exhausted before the stopping rule; result written\n";
    return kExitDomain;
  }
  return 0;
}

int cmd_validate(const Global& g, const InstanceArgs& ia) {
  const Instance inst = ia.load();
  const InstanceStats s = stats(inst);
  nlohmann::ordered_json j;
  j["n"] = inst.n();
  j["k"] = inst.k();
  j["w_count"] = inst.num_groups();
  j["n_min"] = s.n_min;
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (int grp = 0; grp < inst.num_groups(); ++grp) {
    groups.push_back({{"vector", inst.vector_label(inst.group_vector(grp))},
                      {"count", inst.group_size(grp)}});
  }
  j["groups"] = groups;
  std::vector<std::string> excluded;
  for (int i : structurally_excluded(inst)) excluded.push_back(inst.agent(i).id);
  j["structurally_excluded"] = excluded;
  j["instance_hash"] = hash_hex(instance_hash(inst));
  write_json(g, "validate.json", j);
  std::cout << "valid: n=" << inst.n() << " k=" << inst.k() << " |W|=" << inst.num_groups()
            << " n_min=" << s.n_min << " excluded=" << excluded.size() << "\n";
  return 0;
}

int cmd_legacy(const Global& g, const InstanceArgs& ia, int runs, int restart_limit) {
  const Instance inst = ia.load();
  std::vector<int> hits(inst.n(), 0);
  std::ostringstream csv;
  csv << "run,members\n";
  nlohmann::ordered_json panels = nlohmann::ordered_json::array();
  for (int r = 0; r < runs; ++r) {
    const Panel p = solve_legacy(inst, g.seed + static_cast<std::uint64_t>(r), restart_limit);
    std::vector<std::string> ids;
    for (int i : p.members) {
      ids.push_back(inst.agent(i).id);
      ++hits[i];
    }
    csv << r << ",\"";
    for (size_t t = 0; t < ids.size(); ++t) csv << (t ? "," : "") << ids[t];
    csv << "\"\n";
    panels.push_back(ids);
  }
  nlohmann::ordered_json pi;
  for (int i = 0; i < inst.n(); ++i) pi[inst.agent(i).id] = json_real(static_cast<double>(hits[i]) / runs);
  if (is_csv(g)) {
    write_file(g, "legacy.csv", csv.str());
  } else {
    write_json(g, "legacy.json", {{"runs", runs}, {"seed", g.seed}, {"panels", panels}, {"pi", pi}});
  }
  std::cout << "legacy: " << runs << " panel(s)\n";
  return 0;
}

int cmd_round(const Global& g, const std::string& result_path, int m, int runs,
              const InstanceArgs& ia) {
  const nlohmann::json result = read_json(result_path);
  std::vector<std::vector<std::string>> members;
  std::vector<double> probs;
  std::size_t n = 0;
  std::string hash;
  try {
    for (const auto& pj : result.at("panels")) {
      members.push_back(pj.at("members").get<std::vector<std::string>>());
      probs.push_back(pj.at("prob").get<double>());
    }
    n = result.at("pi").size();
    hash = result.at("instance_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, result_path + ": " + e.what());
  }
  if (static_cast<double>(m) < n * std::sqrt(static_cast<double>(n))) {
    std::cerr << "warning: m = " << m << " is below n*sqrt(n) = "
              << format_real(n * std::sqrt(static_cast<double>(n))) << "\n";
  }
  const std::vector<int> counts = pipage_counts(probs, m, g.seed);
  std::vector<std::vector<std::string>> tickets;
  for (size_t j = 0; j < counts.size(); ++j) {
    for (int c = 0; c < counts[j]; ++c) tickets.push_back(members[j]);
  }
  write_file(g, "lottery.txt", lottery_text(tickets));
  write_json(g, "lottery.json", {{"m", m}, {"instance_hash", hash}, {"seed", g.seed}});
  std::cout << "lottery: " << tickets.size() << " tickets\n";
  if (runs > 1) {
    if (ia.agents.empty()) throw Error(ErrorCode::kDomain, "--runs > 1 needs --agents, --quotas and -k");
    const Instance inst = ia.load();
    if (hash_hex(instance_hash(inst)) != hash) {
      throw Error(ErrorCode::kDomain, "result was computed for a different instance");
    }
    SolveResult r;
    r.distribution = distribution_from_json(inst, result);
    r.pi = marginals(inst, r.distribution);
    const RoundingSummary s = rounding_report(inst, r, m, runs, g.seed);
    if (is_csv(g)) {
      write_file(g, "rounding.csv", rounding_csv(s));
    } else {
      write_json(g, "rounding.json", rounding_json(s));
    }
    std::cout << "rounding: mean min " << format_real(s.mean_min) << " mean max "
              << format_real(s.mean_max) << "\n";
  }
  return 0;
}

struct ManipArgs {
  std::string strategy = "mu";
  int c = 1;
  std::string metric = "all";
  int copies = 1;
  bool lenient = false;
  std::int64_t budget = 200000;
};

int cmd_manip(const Global& g, const InstanceArgs& ia, const SolveArgs& sa, const ManipArgs& ma) {
  if (ma.copies < 1) throw Error(ErrorCode::kDomain, "--copies must be at least 1");
  const Instance inst = duplicate_pool(ia.load(), ma.copies);
  const SolveConfig cfg = sa.config(g.seed);
  std::vector<ManipRow> rows;
  if (ma.strategy == "mu") {
    rows.push_back({worst_mu_manipulator(inst, cfg), 1, ma.copies});
  } else if (ma.strategy == "exhaustive") {
    std::vector<ManipMetric> metrics;
    if (ma.metric == "all") {
      metrics = {ManipMetric::kInt, ManipMetric::kExt, ManipMetric::kComp, ManipMetric::kFairness};
    } else {
      metrics = {parse_metric(ma.metric)};
    }
    ExhaustiveOptions opt;
    opt.strict = !ma.lenient;
    opt.budget = ma.budget;
    for (ManipMetric m : metrics) {
      rows.push_back({manip_metric_exhaustive(inst, cfg, ma.c, m, opt), ma.c, ma.copies});
    }
  } else {
    throw Error(ErrorCode::kDomain, "unknown strategy '" + ma.strategy + "'");
  }
  if (is_csv(g)) {
    write_file(g, "manip.csv", manip_csv(inst, rows));
  } else {
    write_json(g, "manip.json", manip_json(inst, rows));
  }
  for (const auto& row : rows) {
    std::cout << metric_name(row.report.metric) << ": " << format_real(row.report.value) << "\n";
  }
  return 0;
}

int cmd_feature_drop(const Global& g, const InstanceArgs& ia, const SolveArgs& sa, int max_drop,
                     const std::vector<std::string>& objectives) {
  const Instance inst = ia.load();
  const auto rows = feature_drop_sweep(inst, objectives, max_drop, sa.config(g.seed));
  if (is_csv(g)) {
    write_file(g, "feature_drop.csv", drop_rows_csv(rows));
  } else {
    write_json(g, "feature_drop.json", drop_rows_json(rows));
  }
  std::cout << "feature-drop: " << rows.size() << " rows\n";
  return 0;
}

Instance t1_instance() {
  FeatureScheme scheme{{"f"}, {{"0", "1"}}};
  std::vector<Agent> agents{{"a1", {0}}, {"a2", {0}}, {"a3", {1}}, {"a4", {1}}};
  return Instance::create(scheme, agents, 2, {{{1, 1}, {1, 1}}});
}

int cmd_bench(const Global& g, bool timings, int runs) {
  struct Fixture {
    std::string label;
    Instance instance;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({"t1", t1_instance()});
  fixtures.push_back({"e1", make_lb_instance(LbKind::kExample1, {6, 3, 2, 0}).instance});
  fixtures.push_back({"e2", make_lb_instance(LbKind::kExample2, {8, 4, 0, 0}).instance});
  {
    const LbInstance lb = make_lb_instance(LbKind::kThm31, {29, 6, 9, 3});
    fixtures.push_back({"thm31", lb.instance});
    fixtures.push_back({"thm31-manipulated", apply_misreport(lb.instance, lb.misreport).instance});
  }
  {
    const LbInstance lb = make_lb_instance(LbKind::kThm43, {72, 6, 12, 6});
    fixtures.push_back({"thm43-manipulated", apply_misreport(lb.instance, lb.misreport).instance});
  }
  const std::vector<std::string> objectives{"maximin",  "minimax",    "maximin-tb",   "minimax-tb",
                                            "leximin",  "nash",       "goldilocks:1", "goldilocks:auto1",
                                            "linear:1"};
  SolveConfig base;
  base.seed = g.seed;
  std::vector<RunRecord> records;
  for (const auto& fx : fixtures) {
    for (const auto& spec : objectives) {
      SolveConfig cfg = base;
      cfg.objective = EqualityObjective::parse(spec);
      const auto start = std::chrono::steady_clock::now();
      const SolveResult r = solve(fx.instance, cfg);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      records.push_back(make_run_record(fx.label, fx.instance, r, cfg.tau_anon, timings ? ms : 0.0));
    }
  }
  const RatioTable table = table_maxes_mins(fixtures[2].instance, {"goldilocks:1", "nash", "leximin"}, base);

  const Instance& e1 = fixtures[1].instance;
  std::vector<ManipRow> manip;
  ExhaustiveOptions lenient;
  lenient.strict = false;
  SolveConfig mm = base;
  mm.objective = EqualityObjective::maximin();
  for (ManipMetric m : {ManipMetric::kInt, ManipMetric::kExt, ManipMetric::kComp, ManipMetric::kFairness}) {
    manip.push_back({manip_metric_exhaustive(e1, mm, 1, m, lenient), 1, 1});
  }
  manip.push_back({worst_mu_manipulator(e1, mm), 1, 1});

  SolveConfig gold = base;
  gold.objective = EqualityObjective::goldilocks(1.0);
  const RoundingSummary rt1 = rounding_report(fixtures[0].instance, gold, 1000, runs, g.seed);
  const RoundingSummary re2 = rounding_report(fixtures[2].instance, gold, 1000, runs, g.seed);

  if (is_csv(g)) {
    write_file(g, "bench_runs.csv", run_records_csv(records));
    write_file(g, "bench_ratios.csv", ratio_table_csv(table));
    write_file(g, "bench_manip.csv", manip_csv(e1, manip));
    write_file(g, "bench_rounding.csv", rounding_csv(rt1) + rounding_csv(re2).substr(rounding_csv(re2).find('\n') + 1));
  } else {
    nlohmann::ordered_json j;
    j["seed"] = g.seed;
    j["runs"] = run_records_json(records);
    j["ratios"] = ratio_table_json(table);
    j["manip"] = manip_json(e1, manip);
    j["rounding"] = {{{"fixture", "t1"}, {"summary", rounding_json(rt1)}},
                     {{"fixture", "e2"}, {"summary", rounding_json(re2)}}};
    write_json(g, "bench.json", j);
  }
  std::cout << "bench: " << records.size() << " runs\n";
  return 0;
}

int cmd_gen_lb(const Global& g, const std::string& kind, const LbParams& params) {
  const LbInstance lb = make_lb_instance(parse_lb_kind(kind), params);
  write_file(g, "agents.csv", agents_csv(lb.instance));
  write_file(g, "quotas.csv", quotas_csv(lb.instance));
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["k"] = lb.instance.k();
  j["instance"] = to_json(lb.instance);
  j["misreport"] = to_json(lb.instance, lb.misreport);
  write_json(g, "instance.json", j);
  std::cout << kind << ": n=" << lb.instance.n() << " k=" << lb.instance.k() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair sortition panel selection"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  InstanceArgs ia_validate;
  auto* validate = app.add_subcommand("validate", "Check an instance and report its structure");
  ia_validate.attach(validate);

  InstanceArgs ia_select;
  SolveArgs sa_select;
  auto* select = app.add_subcommand("select", "Compute an optimal panel distribution");
  ia_select.attach(select);
  sa_select.attach(select);

  InstanceArgs ia_leximin;
  SolveArgs sa_leximin;
  auto* leximin = app.add_subcommand("leximin", "Compute the leximin panel distribution");
  ia_leximin.attach(leximin);
  sa_leximin.attach(leximin, false);

  InstanceArgs ia_legacy;
  int legacy_runs = 1;
  int restart_limit = 10000;
  auto* legacy = app.add_subcommand("legacy", "Draw panels with the greedy legacy heuristic");
  ia_legacy.attach(legacy);
  legacy->add_option("--runs", legacy_runs, "Panels to draw")->check(CLI::PositiveNumber);
  legacy->add_option("--restart-limit", restart_limit, "Restarts per draw")->check(CLI::PositiveNumber);

  std::string result_path;
  int m = 1000;
  int round_runs = 1;
  InstanceArgs ia_round;
  auto* round = app.add_subcommand("round", "Round a distribution to an m-uniform lottery");
  round->add_option("--result", result_path, "Result JSON from select")->required()->check(CLI::ExistingFile);
  round->add_option("--m", m, "Ticket count")->check(CLI::PositiveNumber);
  round->add_option("--runs", round_runs, "Rounding runs for the deviation summary")->check(CLI::PositiveNumber);
  round->add_option("--agents", ia_round.agents, "Agents CSV (for --runs)")->check(CLI::ExistingFile);
  round->add_option("--quotas", ia_round.quotas, "Quotas CSV (for --runs)")->check(CLI::ExistingFile);
  round->add_option("-k,--k", ia_round.k, "Panel size (for --runs)");

  InstanceArgs ia_manip;
  SolveArgs sa_manip;
  ManipArgs ma;
  auto* manip = app.add_subcommand("manip", "Evaluate manipulation metrics");
  ia_manip.attach(manip);
  sa_manip.attach(manip);
  manip->add_option("--strategy", ma.strategy, "mu | exhaustive")->check(CLI::IsMember({"mu", "exhaustive"}));
  manip->add_option("--c", ma.c, "Coalition size")->check(CLI::NonNegativeNumber);
  manip->add_option("--metric", ma.metric, "int | ext | comp | fairness | all")
      ->check(CLI::IsMember({"int", "ext", "comp", "fairness", "all"}));
  manip->add_option("--copies", ma.copies, "Pool duplication factor")->check(CLI::PositiveNumber);
  manip->add_flag("--lenient", ma.lenient, "Skip the coalition size restriction");
  manip->add_option("--budget", ma.budget, "Misreport enumeration budget")->check(CLI::PositiveNumber);

  InstanceArgs ia_drop;
  SolveArgs sa_drop;
  int max_drop = 1;
  std::vector<std::string> drop_objectives{"goldilocks:1"};
  auto* drop = app.add_subcommand("feature-drop", "Sweep quota removal by feature spread");
  ia_drop.attach(drop);
  sa_drop.attach(drop, false);
  drop->add_option("--max-drop", max_drop, "Largest number of dropped features")->check(CLI::NonNegativeNumber);
  drop->add_option("--objectives", drop_objectives, "Objective specs")->delimiter(',');

  bool timings = false;
  int bench_runs = 200;
  auto* bench = app.add_subcommand("bench", "Run the built-in fixture suite");
  bench->add_flag("--timings", timings, "Record wall-clock times");
  bench->add_option("--runs", bench_runs, "Rounding runs per fixture")->check(CLI::PositiveNumber);

  std::string lb_kind;
  LbParams lb;
  auto* gen = app.add_subcommand("gen-lb", "Generate a constructed instance family member");
  gen->add_option("--kind", lb_kind, "example1 | example2 | thm31 | thm43")
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "thm31", "thm43"}));
  gen->add_option("--n", lb.n, "Pool size")->required();
  gen->add_option("--k", lb.k, "Panel size")->required();
  gen->add_option("--nmin", lb.n_min, "Smallest group size");
  gen->add_option("--c", lb.c, "Coalition size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(g, ia_validate);
    if (*select) {
      const Instance inst = ia_select.load();
      return finish_solve(g, inst, solve(inst, sa_select.config(g.seed)));
    }
    if (*leximin) {
      const Instance inst = ia_leximin.load();
      SolveConfig cfg = sa_leximin.config(g.seed);
      cfg.objective = EqualityObjective::leximin();
      return finish_solve(g, inst, solve(inst, cfg));
    }
    if (*legacy) return cmd_legacy(g, ia_legacy, legacy_runs, restart_limit);
    if (*round) return cmd_round(g, result_path, m, round_runs, ia_round);
    if (*manip) return cmd_manip(g, ia_manip, sa_manip, ma);
    if (*drop) return cmd_feature_drop(g, ia_drop, sa_drop, max_drop, drop_objectives);
    if (*bench) return cmd_bench(g, timings, bench_runs);
    if (*gen) return cmd_gen_lb(g, lb_kind, lb);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: IO: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
