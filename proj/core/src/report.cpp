#include "sortition/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "random.hpp"
#include "sortition/error.hpp"
#include "sortition/objectives.hpp"
#include "sortition/parallel.hpp"
#include "sortition/rounding.hpp"

namespace sortition {

namespace {

void validate(const Instance& instance, const ProbabilityAssignment& pi, double tau_anon) {
  if (std::abs(pi.sum() - instance.k()) > 1e-6) {
    throw Error(ErrorCode::kDomain, "probabilities do not sum to k");
  }
  if (pi.anonymity_gap(instance) > tau_anon + 1e-6) {
    throw Error(ErrorCode::kDomain, "assignment is not anonymous within tau_anon");
  }
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

SolveResult solve_spec(const Instance& instance, const SolveConfig& base, const std::string& spec) {
  SolveConfig cfg = base;
  cfg.objective = EqualityObjective::parse(spec);
  return solve(instance, cfg);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

RunRecord make_run_record(const std::string& label, const Instance& instance,
                          const SolveResult& result, double tau_anon, double wall_ms) {
  validate(instance, result.pi, tau_anon);
  const InstanceStats s = stats(instance);
  RunRecord r;
  r.label = label;
  r.objective = result.objective.spec();
  r.n = instance.n();
  r.k = instance.k();
  r.w_count = instance.num_groups();
  r.n_min = s.n_min;
  r.min = result.pi.min();
  r.max = result.pi.max();
  r.gini = gini(result.pi.pi);
  r.objective_value = result.objective_value;
  r.converged = result.converged;
  r.wall_ms = wall_ms;
  return r;
}

RatioTable table_maxes_mins(const Instance& instance, const std::vector<std::string>& objectives,
                            const SolveConfig& config) {
  std::vector<std::string> specs;
  for (const char* base : {"maximin", "minimax"}) {
    if (std::find(objectives.begin(), objectives.end(), base) == objectives.end()) {
      specs.emplace_back(base);
    }
  }
  specs.insert(specs.end(), objectives.begin(), objectives.end());
  std::vector<SolveResult> results(specs.size());
  parallel_for(static_cast<int>(specs.size()),
               [&](int t) { results[t] = solve_spec(instance, config, specs[t]); });
  RatioTable table;
  for (size_t t = 0; t < specs.size(); ++t) {
    validate(instance, results[t].pi, config.tau_anon);
    if (specs[t] == "maximin") table.min_opt = results[t].pi.min();
    if (specs[t] == "minimax") table.max_opt = results[t].pi.max();
  }
  for (size_t t = 0; t < specs.size(); ++t) {
    RatioRow row;
    row.objective = specs[t];
    row.min = results[t].pi.min();
    row.max = results[t].pi.max();
    std::tie(row.ratio_min, row.ratio_max) =
        approximation_ratios(results[t], table.min_opt, table.max_opt);
    table.rows.push_back(row);
  }
  return table;
}

std::vector<DropRow> feature_drop_sweep(const Instance& instance,
                                        const std::vector<std::string>& objectives, int max_drop,
                                        const SolveConfig& config) {
  if (max_drop < 0 || max_drop > instance.scheme().num_features()) {
    throw Error(ErrorCode::kDomain, "max-drop outside [0, |F|]");
  }
  std::vector<Instance> variants;
  for (int d = 0; d <= max_drop; ++d) variants.push_back(drop_features(instance, d));
  std::vector<std::string> specs{"maximin", "minimax"};
  specs.insert(specs.end(), objectives.begin(), objectives.end());
  const int cells = static_cast<int>(variants.size() * specs.size());
  std::vector<SolveResult> results(cells);
  parallel_for(cells, [&](int t) {
    results[t] = solve_spec(variants[t / specs.size()], config, specs[t % specs.size()]);
  });
  std::vector<DropRow> rows;
  for (int d = 0; d <= max_drop; ++d) {
    const size_t base = d * specs.size();
    const double min_opt = results[base].pi.min();
    const double max_opt = results[base + 1].pi.max();
    for (size_t s = 0; s < specs.size(); ++s) {
      const SolveResult& r = results[base + s];
      validate(variants[d], r.pi, config.tau_anon);
      rows.push_back({d, specs[s], r.pi.min(), r.pi.max(), min_opt, max_opt});
    }
  }
  return rows;
}

RoundingSummary rounding_report(const Instance& instance, const SolveResult& result, int m,
                                int runs, std::uint64_t seed) {
  if (runs < 1) throw Error(ErrorCode::kDomain, "runs must be at least 1");
  if (m < 1) throw Error(ErrorCode::kDomain, "m must be at least 1");
  const int n = instance.n();
  std::vector<std::vector<double>> per_run(runs);
  parallel_for(runs, [&](int r) {
    const UniformLottery lottery = pipage_round(result.distribution, m, rng::derive(seed, r));
    per_run[r] = lottery_marginals(instance, lottery).pi;
  });
  RoundingSummary s;
  s.m = m;
  s.runs = runs;
  s.pi = result.pi.pi;
  std::vector<double> mins;
  std::vector<double> maxs;
  for (const auto& p : per_run) {
    mins.push_back(*std::min_element(p.begin(), p.end()));
    maxs.push_back(*std::max_element(p.begin(), p.end()));
    for (int i = 0; i < n; ++i) s.max_deviation = std::max(s.max_deviation, std::abs(p[i] - s.pi[i]));
  }
  s.mean_min = mean_of(mins);
  s.std_min = sample_std(mins, s.mean_min);
  s.mean_max = mean_of(maxs);
  s.std_max = sample_std(maxs, s.mean_max);
  s.mean_pi.assign(n, 0.0);
  s.std_err.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> xs;
    for (const auto& p : per_run) xs.push_back(p[i]);
    s.mean_pi[i] = mean_of(xs);
    s.std_err[i] = sample_std(xs, s.mean_pi[i]) / std::sqrt(static_cast<double>(runs));
  }
  const int w = instance.num_groups();
  if (w >= 2) {
    std::tie(s.b1, s.b2) = rounding_bounds(instance.k(), w, m);
  } else {
    s.b1 = static_cast<double>(instance.k()) / m;
    s.b2 = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

RoundingSummary rounding_report(const Instance& instance, const SolveConfig& config, int m,
                                int runs, std::uint64_t seed) {
  return rounding_report(instance, solve(instance, config), m, runs, seed);
}

std::string format_real(double x) {
  if (!std::isfinite(x)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  // Avoid "-0.000000" so tiny negative noise diffs cleanly.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

nlohmann::ordered_json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

std::string run_records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "label,objective,n,k,w_count,n_min,min,max,gini,objective_value,converged,wall_ms\n";
  for (const auto& r : records) {
    out << csv_cell(r.label) << ',' << csv_cell(r.objective) << ',' << r.n << ',' << r.k << ','
        << r.w_count << ',' << r.n_min << ',' << format_real(r.min) << ',' << format_real(r.max)
        << ',' << format_real(r.gini) << ',' << format_real(r.objective_value) << ','
        << (r.converged ? "true" : "false") << ',' << format_real(r.wall_ms) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json run_records_json(const std::vector<RunRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["objective"] = r.objective;
    j["n"] = r.n;
    j["k"] = r.k;
    j["w_count"] = r.w_count;
    j["n_min"] = r.n_min;
    j["min"] = json_real(r.min);
    j["max"] = json_real(r.max);
    j["gini"] = json_real(r.gini);
    j["objective_value"] = json_real(r.objective_value);
    j["converged"] = r.converged;
    j["wall_ms"] = json_real(r.wall_ms);
    arr.push_back(j);
  }
  return arr;
}

std::string ratio_table_csv(const RatioTable& table) {
  std::ostringstream out;
  out << "objective,min,max,ratio_min,ratio_max,min_opt,max_opt\n";
  for (const auto& r : table.rows) {
    out << csv_cell(r.objective) << ',' << format_real(r.min) << ',' << format_real(r.max) << ','
        << format_real(r.ratio_min) << ',' << format_real(r.ratio_max) << ','
        << format_real(table.min_opt) << ',' << format_real(table.max_opt) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json ratio_table_json(const RatioTable& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json j;
    j["objective"] = r.objective;
    j["min"] = json_real(r.min);
    j["max"] = json_real(r.max);
    j["ratio_min"] = json_real(r.ratio_min);
    j["ratio_max"] = json_real(r.ratio_max);
    j["min_opt"] = json_real(table.min_opt);
    j["max_opt"] = json_real(table.max_opt);
    arr.push_back(j);
  }
  return arr;
}

std::string drop_rows_csv(const std::vector<DropRow>& rows) {
  std::ostringstream out;
  out << "drops,objective,min,max,min_opt,max_opt\n";
  for (const auto& r : rows) {
    out << r.drops << ',' << csv_cell(r.objective) << ',' << format_real(r.min) << ','
        << format_real(r.max) << ',' << format_real(r.min_opt) << ',' << format_real(r.max_opt)
        << '\n';
  }
  return out.str();
}

nlohmann::ordered_json drop_rows_json(const std::vector<DropRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["drops"] = r.drops;
    j["objective"] = r.objective;
    j["min"] = json_real(r.min);
    j["max"] = json_real(r.max);
    j["min_opt"] = json_real(r.min_opt);
    j["max_opt"] = json_real(r.max_opt);
    arr.push_back(j);
  }
  return arr;
}

std::string rounding_csv(const RoundingSummary& s) {
  std::ostringstream out;
  out << "m,runs,mean_min,std_min,mean_max,std_max,b1,b2,max_deviation\n";
  out << s.m << ',' << s.runs << ',' << format_real(s.mean_min) << ',' << format_real(s.std_min)
      << ',' << format_real(s.mean_max) << ',' << format_real(s.std_max) << ','
      << format_real(s.b1) << ',' << format_real(s.b2) << ',' << format_real(s.max_deviation)
      << '\n';
  return out.str();
}

nlohmann::ordered_json rounding_json(const RoundingSummary& s) {
  nlohmann::ordered_json j;
  j["m"] = s.m;
  j["runs"] = s.runs;
  j["mean_min"] = json_real(s.mean_min);
  j["std_min"] = json_real(s.std_min);
  j["mean_max"] = json_real(s.mean_max);
  j["std_max"] = json_real(s.std_max);
  j["b1"] = json_real(s.b1);
  j["b2"] = json_real(s.b2);
  j["max_deviation"] = json_real(s.max_deviation);
  return j;
}

namespace {

std::pair<std::string, std::string> witness_cells(const Instance& instance, const Misreport& w) {
  std::string ids;
  std::string vecs;
  for (size_t t = 0; t < w.coalition.size(); ++t) {
    const int i = w.coalition[t];
    if (t > 0) {
      ids += ';';
      vecs += ';';
    }
    ids += instance.agent(i).id;
    const auto it = w.reported.find(i);
    vecs += instance.vector_label(it == w.reported.end() ? instance.agent(i).vec : it->second);
  }
  return {ids, vecs};
}

}  // namespace

std::string manip_csv(const Instance& instance, const std::vector<ManipRow>& rows) {
  std::ostringstream out;
  out << "metric,c,search,value,witness_coalition,witness_vectors,copies\n";
  for (const auto& row : rows) {
    const auto [ids, vecs] = witness_cells(instance, row.report.witness);
    out << metric_name(row.report.metric) << ',' << row.c << ',' << search_name(row.report.search)
        << ',' << format_real(row.report.value) << ',' << csv_cell(ids) << ',' << csv_cell(vecs)
        << ',' << row.copies << '\n';
  }
  return out.str();
}

nlohmann::ordered_json manip_json(const Instance& instance, const std::vector<ManipRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    const auto [ids, vecs] = witness_cells(instance, row.report.witness);
    nlohmann::ordered_json j;
    j["metric"] = metric_name(row.report.metric);
    j["c"] = row.c;
    j["search"] = search_name(row.report.search);
    j["value"] = json_real(row.report.value);
    j["witness_coalition"] = ids;
    j["witness_vectors"] = vecs;
    j["copies"] = row.copies;
    j["algorithm"] = row.report.algorithm;
    j["evaluated"] = row.report.evaluated;
    j["skipped"] = row.report.skipped;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace sortition
