#include "sortition/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sortition/error.hpp"
#include "sortition/parallel.hpp"

namespace sortition {

ManipMetric parse_metric(const std::string& name) {
  if (name == "int") return ManipMetric::kInt;
  if (name == "ext") return ManipMetric::kExt;
  if (name == "comp") return ManipMetric::kComp;
  if (name == "fairness") return ManipMetric::kFairness;
  throw Error(ErrorCode::kDomain, "unknown metric '" + name + "'");
}

std::string metric_name(ManipMetric metric) {
  switch (metric) {
    case ManipMetric::kInt: return "int";
    case ManipMetric::kExt: return "ext";
    case ManipMetric::kComp: return "comp";
    case ManipMetric::kFairness: return "fairness";
  }
  return "unknown";
}

std::string search_name(SearchKind search) {
  return search == SearchKind::kExhaustive ? "exhaustive" : "mu";
}

int restriction_limit(const Instance& instance) {
  return std::max(0, stats(instance).n_min - instance.k());
}

ManipulatedInstance apply_misreport(const Instance& instance, const Misreport& misreport,
                                    bool strict) {
  const std::set<int> members(misreport.coalition.begin(), misreport.coalition.end());
  if (members.size() != misreport.coalition.size()) {
    throw Error(ErrorCode::kDomain, "coalition lists an agent twice");
  }
  for (int i : members) {
    if (i < 0 || i >= instance.n()) throw Error(ErrorCode::kDomain, "coalition member out of range");
  }
  if (strict && static_cast<int>(members.size()) > restriction_limit(instance)) {
    throw Error(ErrorCode::kRestrictionViolation,
                "coalition of " + std::to_string(members.size()) + " exceeds max{0, n_min - k} = " +
                    std::to_string(restriction_limit(instance)));
  }
  std::vector<Agent> agents = instance.agents();
  bool changed = false;
  for (const auto& [i, vec] : misreport.reported) {
    if (!members.count(i)) throw Error(ErrorCode::kDomain, "only coalition members may misreport");
    const auto& scheme = instance.scheme();
    if (static_cast<int>(vec.size()) != scheme.num_features()) {
      throw Error(ErrorCode::kInadmissibleValue, "reported vector has wrong length");
    }
    for (int f = 0; f < scheme.num_features(); ++f) {
      if (vec[f] < 0 || vec[f] >= static_cast<int>(scheme.values[f].size())) {
        throw Error(ErrorCode::kInadmissibleValue, "reported value out of range");
      }
    }
    changed = changed || agents[i].vec != vec;
    agents[i].vec = vec;
  }
  ManipulatedInstance out{instance, {}, {}};
  if (changed) {
    out.instance = Instance::create(instance.scheme(), std::move(agents), instance.k(), instance.quotas());
  }
  std::vector<int> kept;
  out.instance = strip_self_excluders(out.instance, misreport.coalition, &kept);
  out.origin = kept;
  for (int i = 0, j = 0; i < instance.n(); ++i) {
    if (j < static_cast<int>(kept.size()) && kept[j] == i) {
      ++j;
    } else {
      out.removed.push_back(i);
    }
  }
  return out;
}

FeatureVector mu_vector(const Instance& instance) {
  const InstanceStats s = stats(instance);
  const auto& scheme = instance.scheme();
  FeatureVector out(scheme.num_features(), 0);
  for (int f = 0; f < scheme.num_features(); ++f) {
    int best = -1;
    for (int v = 0; v < static_cast<int>(scheme.values[f].size()); ++v) {
      const Quota& q = instance.quota(f, v);
      const int count = s.value_counts[f][v];
      if (count == 0) {
        if (q.lower == 0 && q.upper == instance.k()) continue;
        throw Error(ErrorCode::kZeroShare, "no pool member has " + scheme.features[f] + "=" +
                                               scheme.values[f][v]);
      }
      if (best < 0) {
        best = v;
        continue;
      }
      // (l+u)/count compared exactly; the 1/2 and 1/n factors cancel.
      const Quota& qb = instance.quota(f, best);
      const long long lhs = static_cast<long long>(q.lower + q.upper) * s.value_counts[f][best];
      const long long rhs = static_cast<long long>(qb.lower + qb.upper) * count;
      if (lhs > rhs) best = v;
    }
    out[f] = std::max(best, 0);
  }
  return out;
}

namespace {

struct Outcome {
  bool skipped = false;
  double int_gain = 0.0;
  double ext_loss = 0.0;
  double comp = 0.0;
  double fairness = 0.0;
};

Outcome evaluate_misreport(const Instance& truthful, const std::vector<double>& pi,
                           const Misreport& mis, const SolveConfig& cfg) {
  Outcome out;
  bool identity = true;
  for (const auto& [i, vec] : mis.reported) identity = identity && truthful.agent(i).vec == vec;
  if (identity) {
    out.fairness = *std::min_element(pi.begin(), pi.end());
    return out;
  }
  std::optional<ManipulatedInstance> mi;
  std::vector<double> tilde(truthful.n(), 0.0);
  try {
    mi = apply_misreport(truthful, mis, false);
    const SolveResult r = solve(mi->instance, cfg);
    for (size_t j = 0; j < mi->origin.size(); ++j) tilde[mi->origin[j]] = r.pi.pi[j];
    out.fairness = r.pi.min();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoncoalitionExclusion || e.code() == ErrorCode::kDomain ||
        e.code() == ErrorCode::kNoValidPanel || e.code() == ErrorCode::kStructuralExclusion) {
      out.skipped = true;
      out.fairness = 0.0;
      return out;
    }
    throw;
  }
  const std::set<int> members(mis.coalition.begin(), mis.coalition.end());
  out.int_gain = -std::numeric_limits<double>::infinity();
  out.ext_loss = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < truthful.n(); ++i) {
    if (members.count(i)) {
      out.int_gain = std::max(out.int_gain, tilde[i] - pi[i]);
    } else {
      out.ext_loss = std::max(out.ext_loss, pi[i] - tilde[i]);
    }
  }
  const auto& scheme = truthful.scheme();
  out.comp = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < scheme.num_features(); ++f) {
    std::vector<double> diff(scheme.values[f].size(), 0.0);
    for (int i = 0; i < truthful.n(); ++i) diff[truthful.agent(i).vec[f]] += tilde[i] - pi[i];
    for (double d : diff) out.comp = std::max(out.comp, d);
  }
  return out;
}

double metric_value(const Outcome& o, ManipMetric metric) {
  switch (metric) {
    case ManipMetric::kInt: return o.int_gain;
    case ManipMetric::kExt: return o.ext_loss;
    case ManipMetric::kComp: return o.comp;
    case ManipMetric::kFairness: return o.fairness;
  }
  return 0.0;
}

std::vector<FeatureVector> all_vectors(const FeatureScheme& scheme) {
  std::vector<FeatureVector> out{FeatureVector(scheme.num_features(), 0)};
  for (int f = scheme.num_features() - 1; f >= 0; --f) {
    std::vector<FeatureVector> next;
    for (int v = 0; v < static_cast<int>(scheme.values[f].size()); ++v) {
      for (const auto& base : out) {
        FeatureVector w = base;
        w[f] = v;
        next.push_back(w);
      }
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double multichoose(int options, int picks) {
  double out = 1.0;
  for (int i = 1; i <= picks; ++i) out = out * (options + picks - i) / i;
  return std::round(out);
}

}  // namespace

ManipReport worst_mu_manipulator(const Instance& instance, const SolveConfig& config) {
  ManipReport report;
  report.metric = ManipMetric::kInt;
  report.search = SearchKind::kMu;
  report.algorithm = config.objective.spec();
  const FeatureVector mu = mu_vector(instance);
  const SolveResult truthful = solve(instance, config);
  std::vector<int> candidates;
  for (int g = 0; g < instance.num_groups(); ++g) {
    if (instance.group_vector(g) != mu) candidates.push_back(instance.group_members(g).front());
  }
  std::vector<Outcome> outcomes(candidates.size());
  parallel_for(static_cast<int>(candidates.size()), [&](int t) {
    const int i = candidates[t];
    outcomes[t] = evaluate_misreport(instance, truthful.pi.pi, Misreport{{i}, {{i, mu}}}, config);
  });
  report.value = 0.0;
  for (size_t t = 0; t < candidates.size(); ++t) {
    ++report.evaluated;
    if (outcomes[t].skipped) {
      ++report.skipped;
      continue;
    }
    if (outcomes[t].int_gain > report.value) {
      report.value = outcomes[t].int_gain;
      report.witness = Misreport{{candidates[t]}, {{candidates[t], mu}}};
    }
  }
  return report;
}

ManipReport manip_metric_exhaustive(const Instance& instance, const SolveConfig& config, int c,
                                    ManipMetric metric, const ExhaustiveOptions& options) {
  ManipReport report;
  report.metric = metric;
  report.search = SearchKind::kExhaustive;
  report.algorithm = config.objective.spec();
  if (c < 0 || c >= instance.n()) throw Error(ErrorCode::kDomain, "coalition size out of range");
  if (options.strict && c > restriction_limit(instance)) {
    throw Error(ErrorCode::kRestrictionViolation,
                "c=" + std::to_string(c) + " exceeds max{0, n_min - k} = " +
                    std::to_string(restriction_limit(instance)));
  }
  if (metric == ManipMetric::kFairness && !structurally_excluded(instance).empty()) {
    report.value = 0.0;
    return report;
  }

  const int groups = instance.num_groups();
  const std::vector<FeatureVector> space =
      options.report_space ? *options.report_space : all_vectors(instance.scheme());
  // Report options per group: truthful first, then the space in order.
  std::vector<std::vector<FeatureVector>> choices(groups);
  for (int g = 0; g < groups; ++g) {
    choices[g].push_back(instance.group_vector(g));
    for (const auto& w : space) {
      if (std::find(choices[g].begin(), choices[g].end(), w) == choices[g].end()) {
        choices[g].push_back(w);
      }
    }
  }

  // Coalitions as seat counts per group; members are the first agents of each group.
  std::vector<std::vector<int>> coalitions;
  std::vector<int> take(groups, 0);
  auto gen = [&](auto&& self, int g, int left) -> void {
    if (g == groups) {
      if (left == 0) coalitions.push_back(take);
      return;
    }
    for (int x = 0; x <= std::min(left, instance.group_size(g)); ++x) {
      take[g] = x;
      self(self, g + 1, left - x);
    }
    take[g] = 0;
  };
  gen(gen, 0, c);
  double total = 0.0;
  for (const auto& co : coalitions) {
    double count = 1.0;
    for (int g = 0; g < groups; ++g) count *= multichoose(static_cast<int>(choices[g].size()), co[g]);
    total += count;
  }
  if (total > static_cast<double>(options.budget)) {
    throw Error(ErrorCode::kBudgetExceeded, std::to_string(static_cast<long long>(total)) +
                                                " misreports exceed the budget of " +
                                                std::to_string(options.budget));
  }

  std::vector<Misreport> all;
  for (const auto& co : coalitions) {
    Misreport base;
    std::vector<std::pair<int, int>> slots;  // (agent, group)
    for (int g = 0; g < groups; ++g) {
      for (int x = 0; x < co[g]; ++x) {
        const int agent = instance.group_members(g)[x];
        base.coalition.push_back(agent);
        slots.emplace_back(agent, g);
      }
    }
    std::sort(base.coalition.begin(), base.coalition.end());
    // Non-decreasing report indices among members of one group.
    std::vector<int> pick(slots.size(), 0);
    auto rec = [&](auto&& self, size_t s) -> void {
      if (s == slots.size()) {
        Misreport m = base;
        for (size_t t = 0; t < slots.size(); ++t) {
          m.reported[slots[t].first] = choices[slots[t].second][pick[t]];
        }
        all.push_back(std::move(m));
        return;
      }
      const int g = slots[s].second;
      const int start = (s > 0 && slots[s - 1].second == g) ? pick[s - 1] : 0;
      for (int r = start; r < static_cast<int>(choices[g].size()); ++r) {
        pick[s] = r;
        self(self, s + 1);
      }
    };
    rec(rec, 0);
  }

  const SolveResult truthful = solve(instance, config);
  std::vector<Outcome> outcomes(all.size());
  parallel_for(static_cast<int>(all.size()), [&](int t) {
    outcomes[t] = evaluate_misreport(instance, truthful.pi.pi, all[t], config);
  });

  const bool minimize = metric == ManipMetric::kFairness;
  bool have = false;
  for (size_t t = 0; t < all.size(); ++t) {
    ++report.evaluated;
    const Outcome& o = outcomes[t];
    if (o.skipped) {
      ++report.skipped;
      if (!minimize) continue;
    }
    const double v = metric_value(o, metric);
    if (!have || (minimize ? v < report.value : v > report.value)) {
      report.value = v;
      report.witness = all[t];
      have = true;
    }
  }
  return report;
}

std::vector<double> feature_spreads(const Instance& instance) {
  const InstanceStats s = stats(instance);
  const auto& scheme = instance.scheme();
  std::vector<double> out;
  for (int f = 0; f < scheme.num_features(); ++f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < static_cast<int>(scheme.values[f].size()); ++v) {
      if (s.value_counts[f][v] == 0) continue;
      const Quota& q = instance.quota(f, v);
      const double r = (q.lower + q.upper) / 2.0 / s.share[f][v];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.push_back(std::isfinite(lo) ? hi - lo : 0.0);
  }
  return out;
}

Instance drop_features(const Instance& instance, int count) {
  const int nf = instance.scheme().num_features();
  if (count < 0 || count > nf) throw Error(ErrorCode::kDomain, "drop count outside [0, |F|]");
  if (count == 0) return instance;
  const auto spread = feature_spreads(instance);
  std::vector<int> order(nf);
  for (int f = 0; f < nf; ++f) order[f] = f;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return spread[a] > spread[b]; });
  QuotaTable quotas = instance.quotas();
  for (int t = 0; t < count; ++t) {
    for (auto& q : quotas[order[t]]) q = {0, instance.k()};
  }
  return Instance::create(instance.scheme(), instance.agents(), instance.k(), std::move(quotas));
}

LbKind parse_lb_kind(const std::string& name) {
  if (name == "example1") return LbKind::kExample1;
  if (name == "example2") return LbKind::kExample2;
  if (name == "thm31") return LbKind::kThm31;
  if (name == "thm43") return LbKind::kThm43;
  throw Error(ErrorCode::kDomain, "unknown instance family '" + name + "'");
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kDomain, "parameter range: " + what);
}

Quota exact(int x) { return {x, x}; }

}  // namespace

LbInstance make_lb_instance(LbKind kind, const LbParams& p) {
  std::vector<Agent> agents;
  auto add = [&](int count, const FeatureVector& vec) {
    for (int t = 0; t < count; ++t) {
      agents.push_back({"a" + std::to_string(agents.size() + 1), vec});
    }
  };
  switch (kind) {
    case LbKind::kExample1: {
      require(p.k >= 2 && p.n_min >= 1 && p.n_min <= p.n - p.k + 1 && p.n > p.k,
              "example1 needs k >= 2, 1 <= n_min <= n - k + 1");
      // Value order (1, 0) so the MU tie on the balanced fixture resolves to 1.
      FeatureScheme scheme{{"f"}, {{"1", "0"}}};
      add(p.n_min, {0});
      add(p.n - p.n_min, {1});
      QuotaTable quotas{{exact(1), exact(p.k - 1)}};
      Instance inst = Instance::create(scheme, agents, p.k, quotas);
      const int mover = p.n_min;  // first f=0 agent reports f=1
      return {inst, Misreport{{mover}, {{mover, {0}}}}};
    }
    case LbKind::kExample2: {
      require(p.n >= 8 && p.n % 4 == 0 && p.k >= 4 && p.k % 2 == 0 && p.k <= p.n / 2 + 1,
              "example2 needs n divisible by 4, even k in [4, n/2 + 1]");
      FeatureScheme scheme{{"f1", "f2"}, {{"0", "1"}, {"0", "1"}}};
      add(p.n / 4, {0, 0});
      add(p.n / 2 - 1, {1, 0});
      add(1, {0, 1});
      add(p.n / 4, {1, 1});
      QuotaTable quotas{{exact(p.k / 2), exact(p.k / 2)}, {exact(p.k / 2), exact(p.k / 2)}};
      return {Instance::create(scheme, agents, p.k, quotas), Misreport{}};
    }
    case LbKind::kThm31:
    case LbKind::kThm43: {
      const bool thm31 = kind == LbKind::kThm31;
      require(p.k % 2 == 0 && p.k >= 6, "k must be even and >= 6");
      require((p.n - p.n_min) % 2 == 0, "n - n_min must be even");
      if (thm31) {
        require(p.k <= p.n_min - 3, "k <= n_min - 3");
        require(p.n_min <= (p.n - p.n_min) / 2, "n_min <= (n - n_min) / 2");
        require(p.c >= 3 && p.c <= p.n_min - p.k, "c in {3, ..., n_min - k}");
      } else {
        require(p.k <= p.n_min - 5, "k <= n_min - 5");
        require(p.n_min <= p.n / p.k, "n_min <= floor(n / k)");
        require(p.c >= 5 && p.c <= p.n_min - p.k, "c in {5, ..., n_min - k}");
      }
      FeatureScheme scheme{{"f1", "f2", "f3"}, {{"0", "1"}, {"0", "1"}, {"0", "1"}}};
      const int side = (p.n - p.n_min) / 2;
      add(side, {0, 0, 0});
      add(side, {1, 1, 0});
      add(p.n_min, {1, 1, 1});
      const int h = p.k / 2;
      QuotaTable quotas{{exact(h - 1), exact(h + 1)},
                        {exact(h - 1), exact(h + 1)},
                        {exact(p.k - 2), exact(2)}};
      Instance inst = Instance::create(scheme, agents, p.k, quotas);
      const int first111 = 2 * side;
      Misreport mis;
      if (thm31) {
        for (int t = 0; t < p.c; ++t) mis.coalition.push_back(first111 + t);
        mis.reported[first111] = {1, 1, 1};
        mis.reported[first111 + 1] = {0, 1, 0};
        for (int t = 2; t < p.c; ++t) mis.reported[first111 + t] = {1, 0, 0};
      } else {
        const int i = 0;             // 000 -> 111
        const int i_prime = side;    // 110 -> 010
        mis.coalition = {i, i_prime};
        mis.reported[i] = {1, 1, 1};
        mis.reported[i_prime] = {0, 1, 0};
        for (int t = 0; t < p.c - 2; ++t) {
          const int q = first111 + t;
          mis.coalition.push_back(q);
          if (t == 0) {
            mis.reported[q] = {0, 0, 0};
          } else if (t == 1) {
            mis.reported[q] = {1, 1, 0};
          } else {
            mis.reported[q] = {1, 0, 0};
          }
        }
        std::sort(mis.coalition.begin(), mis.coalition.end());
      }
      return {inst, mis};
    }
  }
  throw Error(ErrorCode::kDomain, "unknown instance family");
}

nlohmann::ordered_json to_json(const Instance& instance, const Misreport& misreport) {
  nlohmann::ordered_json j;
  std::vector<std::string> ids;
  for (int i : misreport.coalition) ids.push_back(instance.agent(i).id);
  j["coalition"] = ids;
  nlohmann::ordered_json rep = nlohmann::ordered_json::object();
  for (const auto& [i, vec] : misreport.reported) rep[instance.agent(i).id] = instance.vector_label(vec);
  j["reported"] = rep;
  return j;
}

nlohmann::ordered_json to_json(const Instance& instance, const ManipReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = metric_name(report.metric);
  j["value"] = report.value;
  j["search"] = search_name(report.search);
  j["algorithm"] = report.algorithm;
  j["witness"] = to_json(instance, report.witness);
  j["evaluated"] = report.evaluated;
  j["skipped"] = report.skipped;
  return j;
}

}  // namespace sortition
