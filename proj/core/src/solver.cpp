#include "sortition/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "random.hpp"
#include "sortition/error.hpp"
#include "sortition/lp.hpp"

namespace sortition {

Backend parse_backend(const std::string& name) {
  if (name == "brute") return Backend::kBrute;
  if (name == "colgen") return Backend::kColgen;
  throw Error(ErrorCode::kDomain, "unknown backend '" + name + "'");
}

std::string backend_name(Backend backend) {
  return backend == Backend::kBrute ? "brute" : "colgen";
}

namespace {

// Sparse (unit, seats) pairs sorted by unit.
using Column = std::vector<std::pair<int, int>>;

// Units are agents (brute) or vector groups (colgen). Columns are panels or
// compositions expressed as seat counts per unit.
class ColumnModel {
 public:
  static ColumnModel brute(const Instance& inst, std::int64_t cap) {
    ColumnModel m(inst, true);
    for (const Panel& p : enumerate_panels(inst, cap)) {
      Column c;
      for (int i : p.members) c.emplace_back(i, 1);
      m.add(c);
    }
    return m;
  }

  static ColumnModel groups(const Instance& inst) {
    ColumnModel m(inst, false);
    for (int g = 0; g < inst.num_groups(); ++g) {
      std::vector<double> w(inst.num_groups(), 0.0);
      w[g] = 1.0;
      if (auto choice = composition_oracle(inst, w)) m.add(from_counts(choice->counts));
    }
    return m;
  }

  int units() const { return static_cast<int>(sizes_.size()); }
  double size(int u) const { return sizes_[u]; }
  bool complete() const { return agent_level_; }
  bool agent_level() const { return agent_level_; }
  const std::vector<Column>& columns() const { return columns_; }

  int add(const Column& c) {
    auto [it, fresh] = index_.emplace(c, static_cast<int>(columns_.size()));
    if (fresh) columns_.push_back(c);
    return it->second;
  }

  int find(const Column& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? -1 : it->second;
  }

  static double score(const Column& c, const std::vector<double>& eta) {
    double s = 0.0;
    for (const auto& [u, a] : c) s += a * eta[u];
    return s;
  }

  // Best column over the whole column space for per-seat unit weights.
  std::pair<Column, double> price(const std::vector<double>& eta) const {
    if (agent_level_) {
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < columns_.size(); ++j) {
        const double s = score(columns_[j], eta);
        if (s > best_score) {
          best_score = s;
          best = static_cast<int>(j);
        }
      }
      return {columns_[best], best_score};
    }
    auto choice = composition_oracle(*inst_, eta);
    Column c = from_counts(choice->counts);
    return {c, score(c, eta)};
  }

  // Column containing unit u, for a strictly positive starting point.
  int covering_column(int u) const {
    for (size_t j = 0; j < columns_.size(); ++j) {
      for (const auto& [v, a] : columns_[j]) {
        if (v == u && a > 0) return static_cast<int>(j);
      }
    }
    return -1;
  }

 private:
  ColumnModel(const Instance& inst, bool agent_level) : inst_(&inst), agent_level_(agent_level) {
    if (agent_level) {
      sizes_.assign(inst.n(), 1.0);
    } else {
      for (int g = 0; g < inst.num_groups(); ++g) sizes_.push_back(inst.group_size(g));
    }
  }

  static Column from_counts(const Composition& counts) {
    Column c;
    for (size_t g = 0; g < counts.size(); ++g) {
      if (counts[g] > 0) c.emplace_back(static_cast<int>(g), counts[g]);
    }
    return c;
  }

  const Instance* inst_;
  bool agent_level_;
  std::vector<double> sizes_;
  std::vector<Column> columns_;
  std::map<Column, int> index_;
};

enum class Bound { kNone, kVar, kConst };

struct UnitBound {
  Bound lo = Bound::kNone;
  double lo_val = 0.0;
  Bound up = Bound::kNone;
  double up_val = 0.0;
};

// minimize cost_s * s + cost_t * t over q in the column simplex with
// per-unit bounds p_u >= t | lo_val and p_u <= s | up_val.
struct MasterSpec {
  std::vector<UnitBound> bounds;
  double cost_t = 0.0;
  double cost_s = 0.0;
};

struct MasterOutcome {
  bool feasible = false;
  bool converged = false;
  std::vector<double> q;  // aligned with model columns at solve time
  std::vector<double> p;  // per unit
  double t = 0.0;
  double s = 0.0;
  double value = 0.0;
  std::vector<double> y_lo;
  double gap = 0.0;
  int lp_solves = 0;
};

std::vector<double> unit_probabilities(const ColumnModel& model, const std::vector<double>& q) {
  std::vector<double> p(model.units(), 0.0);
  for (size_t j = 0; j < q.size(); ++j) {
    if (q[j] == 0.0) continue;
    for (const auto& [u, a] : model.columns()[j]) p[u] += q[j] * a;
  }
  for (int u = 0; u < model.units(); ++u) p[u] /= model.size(u);
  return p;
}

MasterOutcome run_master(ColumnModel& model, const MasterSpec& spec, const SolveConfig& cfg) {
  MasterOutcome out;
  const int units = model.units();
  while (true) {
    const auto& cols = model.columns();
    const int nc = static_cast<int>(cols.size());
    lp::Problem prob;
    for (int j = 0; j < nc; ++j) prob.add_var(0.0);
    bool has_t = false;
    bool has_s = false;
    for (const auto& b : spec.bounds) {
      has_t = has_t || b.lo == Bound::kVar;
      has_s = has_s || b.up == Bound::kVar;
    }
    const int t_var = has_t ? prob.add_var(spec.cost_t) : -1;
    const int s_var = has_s ? prob.add_var(spec.cost_s) : -1;

    std::vector<std::vector<std::pair<int, double>>> unit_coeffs(units);
    for (int j = 0; j < nc; ++j) {
      for (const auto& [u, a] : cols[j]) unit_coeffs[u].emplace_back(j, a / model.size(u));
    }
    std::vector<std::pair<int, double>> ones;
    for (int j = 0; j < nc; ++j) ones.emplace_back(j, 1.0);
    prob.add_row(ones, lp::Sense::kEq, 1.0);
    std::vector<int> lo_row(units, -1);
    std::vector<int> up_row(units, -1);
    for (int u = 0; u < units; ++u) {
      const UnitBound& b = spec.bounds[u];
      if (b.lo != Bound::kNone) {
        auto coeffs = unit_coeffs[u];
        if (b.lo == Bound::kVar) coeffs.emplace_back(t_var, -1.0);
        lo_row[u] = prob.add_row(coeffs, lp::Sense::kGe, b.lo == Bound::kVar ? 0.0 : b.lo_val);
      }
      if (b.up != Bound::kNone) {
        auto coeffs = unit_coeffs[u];
        if (b.up == Bound::kVar) coeffs.emplace_back(s_var, -1.0);
        up_row[u] = prob.add_row(coeffs, lp::Sense::kLe, b.up == Bound::kVar ? 0.0 : b.up_val);
      }
    }

    const lp::Solution sol = lp::solve(prob);
    ++out.lp_solves;
    if (sol.status != lp::Status::kOptimal) {
      out.feasible = false;
      return out;
    }
    out.feasible = true;
    out.q.assign(sol.x.begin(), sol.x.begin() + nc);
    out.t = has_t ? sol.x[t_var] : 0.0;
    out.s = has_s ? sol.x[s_var] : 0.0;
    out.value = sol.objective;
    out.p = unit_probabilities(model, out.q);
    out.y_lo.assign(units, 0.0);
    std::vector<double> eta(units, 0.0);
    for (int u = 0; u < units; ++u) {
      double y = 0.0;
      if (lo_row[u] >= 0) {
        out.y_lo[u] = sol.duals[lo_row[u]];
        y += sol.duals[lo_row[u]];
      }
      if (up_row[u] >= 0) y += sol.duals[up_row[u]];
      eta[u] = y / model.size(u);
    }
    if (model.complete()) {
      out.converged = true;
      out.gap = 0.0;
      return out;
    }
    double best_in = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < nc; ++j) {
      if (out.q[j] > 1e-12) best_in = std::max(best_in, ColumnModel::score(cols[j], eta));
    }
    auto [col, best_out] = model.price(eta);
    out.gap = std::max(0.0, best_out - best_in);
    if (best_out <= best_in + cfg.eps_colgen || model.find(col) >= 0) {
      out.converged = true;
      return out;
    }
    if (nc >= cfg.max_columns || out.lp_solves >= cfg.max_iterations) {
      out.converged = false;
      return out;
    }
    model.add(col);
  }
}

MasterSpec uniform_spec(int units, UnitBound b, double cost_t, double cost_s) {
  return MasterSpec{std::vector<UnitBound>(units, b), cost_t, cost_s};
}

struct Engine {
  const Instance& inst;
  const SolveConfig& cfg;
  ColumnModel model;
  int iterations = 0;

  MasterOutcome master(const MasterSpec& spec) {
    MasterOutcome out = run_master(model, spec, cfg);
    iterations += out.lp_solves;
    return out;
  }

  MasterOutcome maximin() {
    return master(uniform_spec(model.units(), {Bound::kVar, 0, Bound::kNone, 0}, -1.0, 0.0));
  }
  MasterOutcome minimax() {
    return master(uniform_spec(model.units(), {Bound::kNone, 0, Bound::kVar, 0}, 0.0, 1.0));
  }
  MasterOutcome minimax_with_floor(double floor) {
    return master(uniform_spec(model.units(), {Bound::kConst, floor, Bound::kVar, 0}, 0.0, 1.0));
  }
  MasterOutcome maximin_with_ceiling(double ceiling) {
    return master(uniform_spec(model.units(), {Bound::kVar, 0, Bound::kConst, ceiling}, -1.0, 0.0));
  }
  MasterOutcome linear(double gamma) {
    return master(uniform_spec(model.units(), {Bound::kVar, 0, Bound::kVar, 0}, -gamma, 1.0));
  }

  MasterOutcome goldilocks(double gamma) {
    const double kn = static_cast<double>(inst.k()) / inst.n();
    MasterOutcome top = maximin();
    if (!top.feasible || !top.converged) return top;
    const double t_max = top.t;
    MasterOutcome best;
    double best_f = std::numeric_limits<double>::infinity();
    bool all_converged = true;
    auto eval = [&](double tau) {
      MasterOutcome o = minimax_with_floor(tau);
      if (!o.feasible) return std::numeric_limits<double>::infinity();
      all_converged = all_converged && o.converged;
      const double f = o.s / kn + gamma * kn / tau;
      if (f < best_f) {
        best_f = f;
        best = o;
      }
      return f;
    };
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0;
    double b = t_max;
    eval(t_max);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    for (int it = 0; it < 200 && b - a > 1e-12 * t_max; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = eval(d);
      }
    }
    best.converged = best.converged && all_converged;
    return best;
  }

  struct FwOutcome {
    std::vector<double> q;
    bool converged = false;
    double gap = 0.0;
  };

  // Pairwise Frank-Wolfe on sum_u n_u log p_u with exact line search.
  FwOutcome nash() {
    const int units = model.units();
    double total = 0.0;
    for (int u = 0; u < units; ++u) total += model.size(u);
    std::map<int, double> active;
    std::set<int> start;
    for (int u = 0; u < units; ++u) start.insert(model.covering_column(u));
    for (int j : start) active[j] = 1.0 / static_cast<double>(start.size());

    auto recompute = [&]() {
      std::vector<double> p(units, 0.0);
      for (const auto& [j, w] : active) {
        for (const auto& [u, a] : model.columns()[j]) p[u] += w * a;
      }
      for (int u = 0; u < units; ++u) p[u] /= model.size(u);
      return p;
    };
    std::vector<double> p = recompute();
    FwOutcome out;
    const double tol = std::max(cfg.eps_colgen, 1e-13) * total;
    std::vector<double> eta(units);
    for (int it = 0; it < cfg.max_iterations; ++it) {
      ++iterations;
      if (it % 64 == 63) p = recompute();
      for (int u = 0; u < units; ++u) eta[u] = 1.0 / p[u];
      auto [col, best_out] = model.price(eta);
      out.gap = best_out - total;
      if (out.gap <= tol) {
        out.converged = true;
        break;
      }
      if (static_cast<int>(model.columns().size()) >= cfg.max_columns && model.find(col) < 0) break;
      const int fw = model.add(col);
      int away = -1;
      double away_score = std::numeric_limits<double>::infinity();
      for (const auto& [j, w] : active) {
        const double s = ColumnModel::score(model.columns()[j], eta);
        if (s < away_score) {
          away_score = s;
          away = j;
        }
      }
      if (away == fw) {
        out.converged = true;
        break;
      }
      // Direction in unit-probability space.
      std::vector<double> dp(units, 0.0);
      for (const auto& [u, a] : model.columns()[fw]) dp[u] += a / model.size(u);
      for (const auto& [u, a] : model.columns()[away]) dp[u] -= a / model.size(u);
      const double lambda_max = active[away];
      auto slope = [&](double lambda) {
        double s = 0.0;
        for (int u = 0; u < units; ++u) {
          if (dp[u] != 0.0) s += model.size(u) * dp[u] / (p[u] + lambda * dp[u]);
        }
        return s;
      };
      double lambda = lambda_max;
      bool interior = true;
      for (int u = 0; u < units; ++u) {
        if (dp[u] < 0.0 && p[u] + lambda_max * dp[u] <= 1e-300) interior = false;
      }
      if (!interior || slope(lambda_max) < 0.0) {
        double lo = 0.0;
        double hi = lambda_max;
        for (int b = 0; b < 200 && hi - lo > 1e-17; ++b) {
          const double mid = 0.5 * (lo + hi);
          const double sl = slope(mid);
          if (sl > 0.0) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        lambda = 0.5 * (lo + hi);
      }
      if (lambda <= 0.0) {
        out.converged = out.gap <= 1e3 * tol;
        break;
      }
      for (int u = 0; u < units; ++u) p[u] += lambda * dp[u];
      active[fw] += lambda;
      if (lambda >= lambda_max) {
        active.erase(away);
      } else {
        active[away] -= lambda;
      }
    }
    out.q.assign(model.columns().size(), 0.0);
    for (const auto& [j, w] : active) out.q[j] = w;
    return out;
  }

  MasterOutcome leximin() {
    const int units = model.units();
    std::vector<std::optional<double>> frozen(units);
    MasterOutcome last;
    bool all_converged = true;
    int remaining = units;
    while (remaining > 0) {
      MasterSpec spec{std::vector<UnitBound>(units), -1.0, 0.0};
      for (int u = 0; u < units; ++u) {
        if (frozen[u]) {
          spec.bounds[u] = {Bound::kConst, *frozen[u] - cfg.eps_master, Bound::kNone, 0};
        } else {
          spec.bounds[u] = {Bound::kVar, 0, Bound::kNone, 0};
        }
      }
      last = master(spec);
      if (!last.feasible) return last;
      all_converged = all_converged && last.converged;
      std::vector<int> fresh;
      for (int u = 0; u < units; ++u) {
        if (!frozen[u] && last.y_lo[u] > 1e-9) fresh.push_back(u);
      }
      if (fresh.empty()) {
        for (int u = 0; u < units; ++u) {
          if (!frozen[u] && last.p[u] <= last.t + 1e-7) fresh.push_back(u);
        }
      }
      if (fresh.empty()) break;
      for (int u : fresh) frozen[u] = last.t;
      remaining -= static_cast<int>(fresh.size());
    }
    last.converged = last.converged && all_converged;
    return last;
  }

  CompositionDistribution compositions(const std::vector<double>& q) const {
    double mass = 0.0;
    for (double w : q) mass += std::max(w, 0.0);
    std::map<Composition, double> merged;
    for (size_t j = 0; j < q.size(); ++j) {
      if (q[j] <= 1e-12 * mass) continue;
      Composition c(inst.num_groups(), 0);
      for (const auto& [u, a] : model.columns()[j]) {
        c[model.agent_level() ? inst.group_of(u) : u] += a;
      }
      merged[c] += q[j];
    }
    double kept = 0.0;
    for (const auto& [c, w] : merged) kept += w;
    CompositionDistribution out;
    for (auto& [c, w] : merged) out.support.emplace_back(c, w / kept);
    return out;
  }
};

SolveResult finish(const Instance& inst, const CompositionDistribution& comps,
                   const EqualityObjective& obj, double gamma) {
  SolveResult r;
  r.compositions = comps;
  r.distribution = expand_composition_distribution(inst, comps);
  r.pi = marginals(inst, r.distribution);
  r.group_pi = r.pi.group_probabilities(inst);
  r.objective = obj;
  r.gamma = gamma;
  EqualityObjective resolved = obj;
  resolved.gamma = gamma;
  r.objective_value = evaluate(resolved, r.pi.pi, inst.k(), inst.n());
  return r;
}

void check_solvable(const Instance& inst) {
  if (!composition_oracle(inst, std::vector<double>(inst.num_groups(), 0.0))) {
    throw Error(ErrorCode::kNoValidPanel, "no valid panel exists");
  }
  const auto excluded = structurally_excluded(inst);
  if (!excluded.empty()) {
    throw Error(ErrorCode::kStructuralExclusion,
                std::to_string(excluded.size()) + " agent(s) lie on no valid panel, e.g. '" +
                    inst.agent(excluded.front()).id + "'");
  }
}

ColumnModel make_model(const Instance& inst, const SolveConfig& cfg) {
  return cfg.backend == Backend::kBrute ? ColumnModel::brute(inst, cfg.brute_cap)
                                        : ColumnModel::groups(inst);
}

double resolve_gamma(const Instance& inst, const SolveConfig& cfg) {
  const EqualityObjective& obj = cfg.objective;
  if (obj.kind != ObjectiveKind::kGoldilocks) return obj.gamma;
  if (obj.gamma_rule == GammaRule::kSelectionBias) return gamma_selection_bias(inst);
  if (obj.gamma_rule == GammaRule::kBalanced) {
    SolveConfig sub = cfg;
    sub.objective = EqualityObjective::maximin();
    const double min_opt = solve(inst, sub).pi.min();
    sub.objective = EqualityObjective::minimax();
    const double max_opt = solve(inst, sub).pi.max();
    return gamma_balanced(min_opt, max_opt, inst.n(), inst.k());
  }
  return obj.gamma;
}

}  // namespace

SolveResult solve(const Instance& inst, const SolveConfig& cfg) {
  if (cfg.objective.kind == ObjectiveKind::kLeximin) return solve_leximin(inst, cfg);
  check_solvable(inst);
  const EqualityObjective& obj = cfg.objective;
  const double gamma = resolve_gamma(inst, cfg);
  if (inst.num_groups() == 1) {
    SolveResult r = finish(inst, {{{Composition{inst.k()}, 1.0}}}, obj, gamma);
    r.converged = true;
    r.certificate = 0.0;
    return r;
  }

  Engine eng{inst, cfg, make_model(inst, cfg)};
  std::vector<double> q;
  bool converged = false;
  double gap = 0.0;
  auto take = [&](const MasterOutcome& o) {
    if (!o.feasible) throw Error(ErrorCode::kNoValidPanel, "master problem infeasible");
    q = o.q;
    converged = o.converged;
    gap = o.gap;
  };
  const bool tb = obj.tie_break == TieBreak::kOppositeExtreme;
  switch (obj.kind) {
    case ObjectiveKind::kMaximin: {
      MasterOutcome o = eng.maximin();
      if (tb && o.feasible) {
        // Fix the minimum, then minimize the maximum.
        MasterOutcome second = eng.minimax_with_floor(o.t - cfg.eps_master);
        second.converged = second.converged && o.converged;
        o = second;
      }
      take(o);
      break;
    }
    case ObjectiveKind::kMinimax: {
      MasterOutcome o = eng.minimax();
      if (tb && o.feasible) {
        MasterOutcome second = eng.maximin_with_ceiling(o.s + cfg.eps_master);
        second.converged = second.converged && o.converged;
        o = second;
      }
      take(o);
      break;
    }
    case ObjectiveKind::kLinear:
      take(eng.linear(gamma));
      break;
    case ObjectiveKind::kGoldilocks:
      take(gamma == 0.0 ? eng.minimax() : eng.goldilocks(gamma));
      break;
    case ObjectiveKind::kNash: {
      auto fw = eng.nash();
      q = fw.q;
      converged = fw.converged;
      gap = fw.gap;
      break;
    }
    case ObjectiveKind::kLeximin:
      break;
  }
  SolveResult r = finish(inst, eng.compositions(q), obj, gamma);
  r.iterations = eng.iterations;
  r.columns = static_cast<int>(eng.model.columns().size());
  r.converged = converged;
  r.certificate = gap;
  return r;
}

SolveResult solve_leximin(const Instance& inst, SolveConfig cfg) {
  check_solvable(inst);
  cfg.objective = EqualityObjective::leximin();
  if (inst.num_groups() == 1) {
    SolveResult r = finish(inst, {{{Composition{inst.k()}, 1.0}}}, cfg.objective, 0.0);
    r.converged = true;
    r.certificate = 0.0;
    return r;
  }
  Engine eng{inst, cfg, make_model(inst, cfg)};
  MasterOutcome o = eng.leximin();
  if (!o.feasible) throw Error(ErrorCode::kNoValidPanel, "leximin round infeasible");
  SolveResult r = finish(inst, eng.compositions(o.q), cfg.objective, 0.0);
  r.iterations = eng.iterations;
  r.columns = static_cast<int>(eng.model.columns().size());
  r.converged = o.converged;
  r.certificate = o.gap;
  return r;
}

Panel solve_legacy(const Instance& inst, std::uint64_t seed, int restart_limit) {
  const auto& scheme = inst.scheme();
  const int nf = scheme.num_features();
  for (int attempt = 0; attempt < restart_limit; ++attempt) {
    std::mt19937_64 gen(rng::derive(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::vector<int>> cnt;
    for (const auto& vals : scheme.values) cnt.emplace_back(vals.size(), 0);
    std::vector<bool> taken(inst.n(), false);
    Panel panel;
    bool failed = false;
    for (int step = 0; step < inst.k() && !failed; ++step) {
      std::vector<int> candidates;
      for (int i = 0; i < inst.n(); ++i) {
        if (taken[i]) continue;
        bool fits = true;
        for (int f = 0; f < nf && fits; ++f) {
          const int v = inst.agent(i).vec[f];
          fits = cnt[f][v] < inst.quota(f, v).upper;
        }
        if (fits) candidates.push_back(i);
      }
      if (candidates.empty()) {
        failed = true;
        break;
      }
      std::vector<std::vector<int>> left;
      for (const auto& vals : scheme.values) left.emplace_back(vals.size(), 0);
      for (int i : candidates) {
        for (int f = 0; f < nf; ++f) ++left[f][inst.agent(i).vec[f]];
      }
      int best_f = -1;
      int best_v = -1;
      double best_ratio = 0.0;
      for (int f = 0; f < nf && !failed; ++f) {
        for (size_t v = 0; v < scheme.values[f].size(); ++v) {
          const int need = inst.quota(f, static_cast<int>(v)).lower - cnt[f][v];
          if (need <= 0) continue;
          if (left[f][v] == 0) {
            failed = true;
            break;
          }
          const double ratio = static_cast<double>(need) / left[f][v];
          if (ratio > best_ratio) {
            best_ratio = ratio;
            best_f = f;
            best_v = static_cast<int>(v);
          }
        }
      }
      if (failed) break;
      std::vector<int> pool;
      for (int i : candidates) {
        if (best_f < 0 || inst.agent(i).vec[best_f] == best_v) pool.push_back(i);
      }
      const int pick = pool[rng::uniform_index(gen, pool.size())];
      taken[pick] = true;
      panel.members.push_back(pick);
      for (int f = 0; f < nf; ++f) ++cnt[f][inst.agent(pick).vec[f]];
    }
    if (failed) continue;
    std::sort(panel.members.begin(), panel.members.end());
    if (is_valid_panel(inst, panel)) return panel;
  }
  throw Error(ErrorCode::kRestartLimit,
              "no valid panel after " + std::to_string(restart_limit) + " restarts");
}

std::pair<double, double> approximation_ratios(const SolveResult& result, double min_opt,
                                               double max_opt) {
  const double lo = min_opt > 0.0 ? result.pi.min() / min_opt : std::nan("");
  const double hi = max_opt > 0.0 ? result.pi.max() / max_opt : std::nan("");
  return {lo, hi};
}

double optimal_deviation(const Instance& inst, const SolveConfig& cfg) {
  check_solvable(inst);
  const double kn = static_cast<double>(inst.k()) / inst.n();
  if (inst.num_groups() == 1) return 1.0;
  Engine eng{inst, cfg, make_model(inst, cfg)};
  const MasterOutcome top = eng.maximin();
  const double t_max = top.t;
  auto sides = [&](double tau) {
    const MasterOutcome o = eng.minimax_with_floor(tau);
    return std::pair<double, double>{kn / tau, o.s / kn};
  };
  auto [a0, b0] = sides(t_max);
  double best = std::max(a0, b0);
  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 100 && hi - lo > 1e-14 * t_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto [a, b] = sides(mid);
    best = std::min(best, std::max(a, b));
    if (a > b) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

nlohmann::ordered_json to_json(const Instance& inst, const SolveResult& result) {
  nlohmann::ordered_json j;
  j["objective"] = result.objective.spec();
  j["gamma"] = result.gamma;
  j["value"] = result.objective_value;
  j["converged"] = result.converged;
  nlohmann::ordered_json pi;
  for (int i = 0; i < inst.n(); ++i) pi[inst.agent(i).id] = result.pi.pi[i];
  j["pi"] = pi;
  j["panels"] = to_json(inst, result.distribution)["panels"];
  j["iterations"] = result.iterations;
  j["columns"] = result.columns;
  if (result.certificate) j["certificate"] = *result.certificate;
  j["instance_hash"] = hash_hex(instance_hash(inst));
  return j;
}

}  // namespace sortition
