#include "sortition/panels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "sortition/error.hpp"

namespace sortition {

double ProbabilityAssignment::min() const {
  return pi.empty() ? 0.0 : *std::min_element(pi.begin(), pi.end());
}

double ProbabilityAssignment::max() const {
  return pi.empty() ? 0.0 : *std::max_element(pi.begin(), pi.end());
}

double ProbabilityAssignment::sum() const { return std::accumulate(pi.begin(), pi.end(), 0.0); }

std::vector<double> ProbabilityAssignment::group_probabilities(const Instance& instance) const {
  std::vector<double> out(instance.num_groups(), 0.0);
  for (int g = 0; g < instance.num_groups(); ++g) {
    for (int i : instance.group_members(g)) out[g] += pi[i];
    out[g] /= instance.group_size(g);
  }
  return out;
}

double ProbabilityAssignment::anonymity_gap(const Instance& instance) const {
  double gap = 0.0;
  for (int g = 0; g < instance.num_groups(); ++g) {
    double lo = 1e300;
    double hi = -1e300;
    for (int i : instance.group_members(g)) {
      lo = std::min(lo, pi[i]);
      hi = std::max(hi, pi[i]);
    }
    gap = std::max(gap, hi - lo);
  }
  return gap;
}

namespace {

bool counts_satisfy_quotas(const Instance& instance, const std::vector<std::vector<int>>& cnt) {
  for (int f = 0; f < instance.scheme().num_features(); ++f) {
    for (size_t v = 0; v < cnt[f].size(); ++v) {
      const Quota& q = instance.quota(f, static_cast<int>(v));
      if (cnt[f][v] < q.lower || cnt[f][v] > q.upper) return false;
    }
  }
  return true;
}

std::vector<std::vector<int>> zero_counts(const Instance& instance) {
  std::vector<std::vector<int>> cnt;
  for (const auto& vals : instance.scheme().values) cnt.emplace_back(vals.size(), 0);
  return cnt;
}

// Depth-first search over seat counts per group with propagation on per-(f,v) totals.
class CompositionSearch {
 public:
  explicit CompositionSearch(const Instance& instance)
      : inst_(instance), groups_(instance.num_groups()), cur_(zero_counts(instance)) {
    const int nf = instance.scheme().num_features();
    cap_.assign(groups_ + 1, 0);
    cap_fv_.assign(groups_ + 1, zero_counts(instance));
    for (int g = groups_ - 1; g >= 0; --g) {
      cap_[g] = cap_[g + 1] + instance.group_size(g);
      cap_fv_[g] = cap_fv_[g + 1];
      for (int f = 0; f < nf; ++f) cap_fv_[g][f][instance.group_vector(g)[f]] += instance.group_size(g);
    }
    counts_.assign(groups_, 0);
  }

  template <typename Visit>
  void enumerate(Visit&& visit) {
    if (feasible(0, inst_.k())) enumerate_from(0, inst_.k(), visit);
  }

  std::optional<CompositionChoice> maximize(const std::vector<std::vector<double>>& seat_weights) {
    prefix_.assign(groups_, {});
    for (int g = 0; g < groups_; ++g) {
      prefix_[g].assign(seat_weights[g].size() + 1, 0.0);
      for (size_t x = 0; x < seat_weights[g].size(); ++x) {
        prefix_[g][x + 1] = prefix_[g][x] + seat_weights[g][x];
      }
    }
    suffix_best_.assign(groups_ + 1, {0.0});
    std::vector<double> pool;
    for (int g = groups_ - 1; g >= 0; --g) {
      pool.insert(pool.end(), seat_weights[g].begin(), seat_weights[g].end());
      std::vector<double> sorted = pool;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      auto& best = suffix_best_[g];
      best.assign(sorted.size() + 1, 0.0);
      for (size_t r = 0; r < sorted.size(); ++r) best[r + 1] = best[r] + sorted[r];
    }
    have_best_ = false;
    if (feasible(0, inst_.k())) maximize_from(0, inst_.k(), 0.0);
    if (!have_best_) return std::nullopt;
    return CompositionChoice{best_counts_, best_value_};
  }

 private:
  bool feasible(int g, int seats) const {
    if (seats > cap_[g]) return false;
    const auto& scheme = inst_.scheme();
    for (int f = 0; f < scheme.num_features(); ++f) {
      int need = 0;
      int room = 0;
      for (size_t v = 0; v < scheme.values[f].size(); ++v) {
        const Quota& q = inst_.quota(f, static_cast<int>(v));
        const int c = cur_[f][v];
        if (c > q.upper) return false;
        const int avail = std::min(cap_fv_[g][f][v], seats);
        if (c + avail < q.lower) return false;
        need += std::max(0, q.lower - c);
        room += std::min(q.upper - c, avail);
      }
      if (need > seats || room < seats) return false;
    }
    return true;
  }

  int upper_choice(int g, int seats) const {
    int hi = std::min(inst_.group_size(g), seats);
    const auto& vec = inst_.group_vector(g);
    for (int f = 0; f < inst_.scheme().num_features(); ++f) {
      hi = std::min(hi, inst_.quota(f, vec[f]).upper - cur_[f][vec[f]]);
    }
    return hi;
  }

  void apply(int g, int x) {
    counts_[g] += x;
    const auto& vec = inst_.group_vector(g);
    for (int f = 0; f < inst_.scheme().num_features(); ++f) cur_[f][vec[f]] += x;
  }

  template <typename Visit>
  void enumerate_from(int g, int seats, Visit& visit) {
    if (g == groups_) {
      visit(counts_);
      return;
    }
    const int lo = std::max(0, seats - cap_[g + 1]);
    const int hi = upper_choice(g, seats);
    for (int x = lo; x <= hi; ++x) {
      apply(g, x);
      if (feasible(g + 1, seats - x)) enumerate_from(g + 1, seats - x, visit);
      apply(g, -x);
    }
  }

  double tolerance() const { return 1e-12 * std::max(1.0, std::fabs(best_value_)); }

  void maximize_from(int g, int seats, double value) {
    if (have_best_ && value + suffix_best_[g][seats] <= best_value_ + tolerance()) return;
    if (g == groups_) {
      best_value_ = value;
      best_counts_ = counts_;
      have_best_ = true;
      return;
    }
    const int lo = std::max(0, seats - cap_[g + 1]);
    const int hi = upper_choice(g, seats);
    for (int x = lo; x <= hi; ++x) {
      apply(g, x);
      if (feasible(g + 1, seats - x)) maximize_from(g + 1, seats - x, value + prefix_[g][x]);
      apply(g, -x);
    }
  }

  const Instance& inst_;
  int groups_;
  std::vector<int> cap_;
  std::vector<std::vector<std::vector<int>>> cap_fv_;
  std::vector<std::vector<int>> cur_;
  Composition counts_;
  std::vector<std::vector<double>> prefix_;
  std::vector<std::vector<double>> suffix_best_;
  bool have_best_ = false;
  double best_value_ = 0.0;
  Composition best_counts_;
};

double binomial(int n, int r) {
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return std::round(out);
}

// Calls visit for every r-subset of items in lexicographic order.
template <typename Visit>
void for_each_subset(const std::vector<int>& items, int r, Visit&& visit) {
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> chosen(r);
  const int n = static_cast<int>(items.size());
  while (true) {
    for (int j = 0; j < r; ++j) chosen[j] = items[idx[j]];
    visit(chosen);
    int j = r - 1;
    while (j >= 0 && idx[j] == n - r + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (int t = j + 1; t < r; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace

bool is_valid_panel(const Instance& instance, const Panel& panel) {
  if (static_cast<int>(panel.members.size()) != instance.k()) return false;
  std::set<int> seen;
  auto cnt = zero_counts(instance);
  for (int i : panel.members) {
    if (i < 0 || i >= instance.n() || !seen.insert(i).second) return false;
    const auto& vec = instance.agent(i).vec;
    for (size_t f = 0; f < vec.size(); ++f) ++cnt[f][vec[f]];
  }
  return counts_satisfy_quotas(instance, cnt);
}

bool is_valid_composition(const Instance& instance, const Composition& counts) {
  if (static_cast<int>(counts.size()) != instance.num_groups()) return false;
  auto cnt = zero_counts(instance);
  int total = 0;
  for (int g = 0; g < instance.num_groups(); ++g) {
    if (counts[g] < 0 || counts[g] > instance.group_size(g)) return false;
    total += counts[g];
    const auto& vec = instance.group_vector(g);
    for (size_t f = 0; f < vec.size(); ++f) cnt[f][vec[f]] += counts[g];
  }
  return total == instance.k() && counts_satisfy_quotas(instance, cnt);
}

Composition composition_of(const Instance& instance, const Panel& panel) {
  Composition counts(instance.num_groups(), 0);
  for (int i : panel.members) ++counts[instance.group_of(i)];
  return counts;
}

ProbabilityAssignment marginals(const Instance& instance, const PanelDistribution& dist) {
  ProbabilityAssignment out;
  out.pi.assign(instance.n(), 0.0);
  for (const auto& [panel, prob] : dist.support) {
    if (!is_valid_panel(instance, panel)) {
      throw Error(ErrorCode::kInvalidPanel, "support holds an invalid panel");
    }
    for (int i : panel.members) out.pi[i] += prob;
  }
  return out;
}

std::vector<double> group_marginals(const Instance& instance, const CompositionDistribution& dist) {
  std::vector<double> p(instance.num_groups(), 0.0);
  for (const auto& [counts, prob] : dist.support) {
    for (int g = 0; g < instance.num_groups(); ++g) p[g] += prob * counts[g];
  }
  for (int g = 0; g < instance.num_groups(); ++g) p[g] /= instance.group_size(g);
  return p;
}

std::vector<Composition> enumerate_compositions(const Instance& instance, std::int64_t cap) {
  std::vector<Composition> out;
  CompositionSearch search(instance);
  bool exceeded = false;
  search.enumerate([&](const Composition& c) {
    if (exceeded) return;
    if (static_cast<std::int64_t>(out.size()) >= cap) {
      exceeded = true;
      return;
    }
    out.push_back(c);
  });
  if (exceeded) {
    throw Error(ErrorCode::kCapExceeded, "more than " + std::to_string(cap) + " compositions");
  }
  return out;
}

std::vector<Panel> enumerate_panels(const Instance& instance, std::int64_t cap) {
  const auto comps = enumerate_compositions(instance, cap);
  double total = 0.0;
  for (const auto& c : comps) {
    double count = 1.0;
    for (int g = 0; g < instance.num_groups(); ++g) count *= binomial(instance.group_size(g), c[g]);
    total += count;
  }
  if (total > static_cast<double>(cap)) {
    throw Error(ErrorCode::kCapExceeded, "more than " + std::to_string(cap) + " valid panels");
  }
  std::vector<Panel> out;
  out.reserve(static_cast<size_t>(total));
  for (const auto& c : comps) {
    std::vector<int> partial;
    auto expand = [&](auto&& self, int g) -> void {
      if (g == instance.num_groups()) {
        Panel p{partial};
        std::sort(p.members.begin(), p.members.end());
        out.push_back(std::move(p));
        return;
      }
      if (c[g] == 0) {
        self(self, g + 1);
        return;
      }
      for_each_subset(instance.group_members(g), c[g], [&](const std::vector<int>& chosen) {
        const size_t mark = partial.size();
        partial.insert(partial.end(), chosen.begin(), chosen.end());
        self(self, g + 1);
        partial.resize(mark);
      });
    };
    expand(expand, 0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<CompositionChoice> best_composition(
    const Instance& instance, const std::vector<std::vector<double>>& seat_weights) {
  CompositionSearch search(instance);
  return search.maximize(seat_weights);
}

std::optional<CompositionChoice> composition_oracle(const Instance& instance,
                                                    const std::vector<double>& group_weights) {
  std::vector<std::vector<double>> seats(instance.num_groups());
  for (int g = 0; g < instance.num_groups(); ++g) seats[g].assign(instance.group_size(g), group_weights[g]);
  return best_composition(instance, seats);
}

std::optional<Panel> panel_oracle(const Instance& instance, const std::vector<double>& weights) {
  std::vector<std::vector<int>> order(instance.num_groups());
  std::vector<std::vector<double>> seats(instance.num_groups());
  for (int g = 0; g < instance.num_groups(); ++g) {
    order[g] = instance.group_members(g);
    std::sort(order[g].begin(), order[g].end(), [&](int a, int b) {
      if (weights[a] != weights[b]) return weights[a] > weights[b];
      return instance.agent(a).id < instance.agent(b).id;
    });
    for (int i : order[g]) seats[g].push_back(weights[i]);
  }
  auto choice = best_composition(instance, seats);
  if (!choice) return std::nullopt;
  Panel panel;
  for (int g = 0; g < instance.num_groups(); ++g) {
    for (int x = 0; x < choice->counts[g]; ++x) panel.members.push_back(order[g][x]);
  }
  std::sort(panel.members.begin(), panel.members.end());
  return panel;
}

std::vector<int> structurally_excluded(const Instance& instance) {
  std::vector<int> out;
  const int groups = instance.num_groups();
  for (int g = 0; g < groups; ++g) {
    std::vector<double> w(groups, 0.0);
    w[g] = 1.0;
    auto choice = composition_oracle(instance, w);
    if (!choice || choice->counts[g] == 0) {
      out.insert(out.end(), instance.group_members(g).begin(), instance.group_members(g).end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Instance strip_self_excluders(const Instance& manipulated, const std::vector<int>& coalition,
                              std::vector<int>* kept) {
  const auto excluded = structurally_excluded(manipulated);
  const std::set<int> members(coalition.begin(), coalition.end());
  for (int i : excluded) {
    if (!members.count(i)) {
      throw Error(ErrorCode::kNoncoalitionExclusion,
                  "truthful agent '" + manipulated.agent(i).id + "' is structurally excluded");
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < manipulated.n(); ++i) {
    if (!std::binary_search(excluded.begin(), excluded.end(), i)) keep.push_back(i);
  }
  if (kept) *kept = keep;
  if (excluded.empty()) return manipulated;
  std::vector<Agent> agents;
  for (int i : keep) agents.push_back(manipulated.agent(i));
  return Instance::create(manipulated.scheme(), std::move(agents), manipulated.k(),
                          manipulated.quotas());
}

PanelDistribution expand_composition_distribution(const Instance& instance,
                                                  const CompositionDistribution& dist) {
  std::map<Panel, double> merged;
  const int groups = instance.num_groups();
  for (const auto& [counts, prob] : dist.support) {
    if (!is_valid_composition(instance, counts)) {
      throw Error(ErrorCode::kInvalidPanel, "composition is not valid for the pool");
    }
    if (prob <= 0.0) continue;
    // Group g cycles through cycle[g] blocks of counts[g] consecutive members.
    std::vector<std::int64_t> cycle(groups, 1);
    for (int g = 0; g < groups; ++g) {
      const int x = counts[g];
      const int ng = instance.group_size(g);
      if (x > 0 && x < ng) cycle[g] = ng / std::gcd(ng, x);
    }
    // Breakpoints j / cycle[g] on [0, 1), as exact fractions.
    std::vector<std::pair<std::int64_t, std::int64_t>> cuts;
    for (int g = 0; g < groups; ++g) {
      for (std::int64_t j = 0; j < cycle[g]; ++j) cuts.emplace_back(j, cycle[g]);
    }
    auto less = [](const auto& a, const auto& b) { return a.first * b.second < b.first * a.second; };
    auto same = [](const auto& a, const auto& b) { return a.first * b.second == b.first * a.second; };
    std::sort(cuts.begin(), cuts.end(), less);
    cuts.erase(std::unique(cuts.begin(), cuts.end(), same), cuts.end());
    for (size_t c = 0; c < cuts.size(); ++c) {
      const double start = static_cast<double>(cuts[c].first) / cuts[c].second;
      const double end =
          c + 1 < cuts.size() ? static_cast<double>(cuts[c + 1].first) / cuts[c + 1].second : 1.0;
      Panel panel;
      for (int g = 0; g < groups; ++g) {
        const int x = counts[g];
        if (x == 0) continue;
        const auto& members = instance.group_members(g);
        const int ng = static_cast<int>(members.size());
        // Block index floor(start * cycle[g]) computed exactly.
        const std::int64_t block = cuts[c].first * cycle[g] / cuts[c].second;
        for (int s = 0; s < x; ++s) {
          panel.members.push_back(members[(block * x + s) % ng]);
        }
      }
      std::sort(panel.members.begin(), panel.members.end());
      merged[panel] += prob * (end - start);
    }
  }
  PanelDistribution out;
  for (auto& [panel, prob] : merged) out.support.emplace_back(panel, prob);
  return out;
}

CompositionDistribution compositions_of(const Instance& instance, const PanelDistribution& dist) {
  std::map<Composition, double> merged;
  for (const auto& [panel, prob] : dist.support) merged[composition_of(instance, panel)] += prob;
  CompositionDistribution out;
  for (auto& [c, prob] : merged) out.support.emplace_back(c, prob);
  return out;
}

nlohmann::ordered_json to_json(const Instance& instance, const PanelDistribution& dist) {
  auto panels = nlohmann::ordered_json::array();
  for (const auto& [panel, prob] : dist.support) {
    nlohmann::ordered_json pj;
    std::vector<std::string> ids;
    for (int i : panel.members) ids.push_back(instance.agent(i).id);
    pj["members"] = ids;
    pj["prob"] = prob;
    panels.push_back(pj);
  }
  nlohmann::ordered_json j;
  j["panels"] = panels;
  return j;
}

PanelDistribution distribution_from_json(const Instance& instance, const nlohmann::json& j) {
  PanelDistribution dist;
  try {
    for (const auto& pj : j.at("panels")) {
      Panel panel;
      for (const auto& id : pj.at("members")) {
        const int i = instance.agent_index(id.get<std::string>());
        if (i < 0) throw Error(ErrorCode::kInvalidPanel, "unknown agent '" + id.get<std::string>() + "'");
        panel.members.push_back(i);
      }
      std::sort(panel.members.begin(), panel.members.end());
      if (!is_valid_panel(instance, panel)) throw Error(ErrorCode::kInvalidPanel, "invalid panel in file");
      dist.support.emplace_back(std::move(panel), pj.at("prob").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("distribution json: ") + e.what());
  }
  return dist;
}

}  // namespace sortition
