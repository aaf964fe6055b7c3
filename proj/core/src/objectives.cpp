#include "sortition/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "sortition/error.hpp"

namespace sortition {

namespace {

double parse_gamma(const std::string& text, const std::string& spec) {
  try {
    size_t used = 0;
    const double g = std::stod(text, &used);
    if (used != text.size() || !(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument(text);
    return g;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kDomain, "bad gamma in objective '" + spec + "'");
  }
}

std::string format_gamma(double g) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", g);
  std::string s = buf;
  // Shortest round-trip form.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, g);
    if (std::stod(buf) == g) return buf;
  }
  return s;
}

}  // namespace

EqualityObjective EqualityObjective::parse(const std::string& spec) {
  if (spec == "maximin") return maximin();
  if (spec == "minimax") return minimax();
  if (spec == "maximin-tb") return {ObjectiveKind::kMaximin, 0.0, TieBreak::kOppositeExtreme};
  if (spec == "minimax-tb") return {ObjectiveKind::kMinimax, 0.0, TieBreak::kOppositeExtreme};
  if (spec == "leximin") return leximin();
  if (spec == "nash") return nash();
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string head = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (head == "goldilocks") {
      if (arg == "auto1") return {ObjectiveKind::kGoldilocks, 0.0, TieBreak::kNone, GammaRule::kBalanced};
      if (arg == "auto2") {
        return {ObjectiveKind::kGoldilocks, 0.0, TieBreak::kNone, GammaRule::kSelectionBias};
      }
      return goldilocks(parse_gamma(arg, spec));
    }
    if (head == "linear") return linear(parse_gamma(arg, spec));
  }
  throw Error(ErrorCode::kDomain, "unknown objective '" + spec + "'");
}

std::string EqualityObjective::spec() const {
  const bool tb = tie_break == TieBreak::kOppositeExtreme;
  switch (kind) {
    case ObjectiveKind::kMaximin: return tb ? "maximin-tb" : "maximin";
    case ObjectiveKind::kMinimax: return tb ? "minimax-tb" : "minimax";
    case ObjectiveKind::kNash: return "nash";
    case ObjectiveKind::kLeximin: return "leximin";
    case ObjectiveKind::kGoldilocks:
      if (gamma_rule == GammaRule::kBalanced) return "goldilocks:auto1";
      if (gamma_rule == GammaRule::kSelectionBias) return "goldilocks:auto2";
      return "goldilocks:" + format_gamma(gamma);
    case ObjectiveKind::kLinear: return "linear:" + format_gamma(gamma);
  }
  return "unknown";
}

double evaluate(const EqualityObjective& obj, const std::vector<double>& pi, int k, int n) {
  const double lo = *std::min_element(pi.begin(), pi.end());
  const double hi = *std::max_element(pi.begin(), pi.end());
  const double kn = static_cast<double>(k) / n;
  switch (obj.kind) {
    case ObjectiveKind::kMaximin:
    case ObjectiveKind::kLeximin:
      return -lo;
    case ObjectiveKind::kMinimax:
      return hi;
    case ObjectiveKind::kNash: {
      if (lo <= 0.0) return 0.0;
      double s = 0.0;
      for (double p : pi) s += std::log(p);
      return -std::exp(s / static_cast<double>(pi.size()));
    }
    case ObjectiveKind::kGoldilocks: {
      const double head = hi / kn;
      if (obj.gamma == 0.0) return head;
      if (lo <= 0.0) return std::numeric_limits<double>::infinity();
      return head + obj.gamma * kn / lo;
    }
    case ObjectiveKind::kLinear:
      return hi - obj.gamma * lo;
  }
  return 0.0;
}

std::vector<double> subgradient(const EqualityObjective& obj, const std::vector<double>& pi, int k,
                                int n) {
  constexpr double kTieTol = 1e-7;
  const double lo = *std::min_element(pi.begin(), pi.end());
  const double hi = *std::max_element(pi.begin(), pi.end());
  const double kn = static_cast<double>(k) / n;
  std::vector<double> at_max;
  std::vector<double> at_min;
  for (double p : pi) {
    at_max.push_back(std::fabs(p - hi) <= kTieTol ? 1.0 : 0.0);
    at_min.push_back(std::fabs(p - lo) <= kTieTol ? 1.0 : 0.0);
  }
  const double n_max = std::accumulate(at_max.begin(), at_max.end(), 0.0);
  const double n_min = std::accumulate(at_min.begin(), at_min.end(), 0.0);
  std::vector<double> g(pi.size(), 0.0);
  for (size_t i = 0; i < pi.size(); ++i) {
    const double dmax = at_max[i] / n_max;
    const double dmin = at_min[i] / n_min;
    switch (obj.kind) {
      case ObjectiveKind::kMaximin:
      case ObjectiveKind::kLeximin:
        g[i] = -dmin;
        break;
      case ObjectiveKind::kMinimax:
        g[i] = dmax;
        break;
      case ObjectiveKind::kNash:
        g[i] = pi[i] > 0.0 ? -1.0 / pi[i] : -std::numeric_limits<double>::infinity();
        break;
      case ObjectiveKind::kGoldilocks:
        g[i] = dmax / kn - (obj.gamma == 0.0 ? 0.0 : obj.gamma * kn / (lo * lo) * dmin);
        break;
      case ObjectiveKind::kLinear:
        g[i] = dmax - obj.gamma * dmin;
        break;
    }
  }
  return g;
}

double gamma_star(double z, int n_min, int c, int n, int k) {
  if (c < 0 || c >= n_min) throw Error(ErrorCode::kDomain, "gamma_star needs 0 <= c < n_min");
  if (!(z > 0.0) || z > 1.0 / n + 1e-15) throw Error(ErrorCode::kDomain, "gamma_star needs z in (0, 1/n]");
  if (k <= 0 || n <= 0) throw Error(ErrorCode::kDomain, "gamma_star needs positive n, k");
  const double ratio = static_cast<double>(n) / k;
  return z * std::max(1.0 / (n_min - c), c * z) * ratio * ratio;
}

double gamma_balanced(double min_opt, double max_opt, int n, int k) {
  const double ratio = static_cast<double>(n) / k;
  return ratio * ratio * max_opt * min_opt;
}

double gamma_selection_bias(const Instance& instance) {
  const InstanceStats s = stats(instance);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const auto& scheme = instance.scheme();
  for (int f = 0; f < scheme.num_features(); ++f) {
    for (size_t v = 0; v < scheme.values[f].size(); ++v) {
      const Quota& q = instance.quota(f, static_cast<int>(v));
      if (q.lower == 0 && q.upper == instance.k()) continue;
      if (s.value_counts[f][v] == 0) {
        throw Error(ErrorCode::kZeroShare, "no pool member has " + scheme.features[f] + "=" +
                                               scheme.values[f][v]);
      }
      const double r = (q.lower + q.upper) / 2.0 / (instance.k() * s.share[f][v]);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  if (!std::isfinite(lo)) return 1.0;
  return lo * hi;
}

double gini(const std::vector<double>& pi) {
  double total = 0.0;
  for (double p : pi) total += p;
  if (total <= 0.0) throw Error(ErrorCode::kDomain, "gini of an all-zero vector");
  // sum_{i,j} |a_i - a_j| = 2 sum_i (2i - n + 1) a_(i) over sorted values.
  std::vector<double> sorted = pi;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double acc = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) acc += (2.0 * i - n + 1.0) * sorted[i];
  return 2.0 * acc / (2.0 * total * total);
}

}  // namespace sortition
