#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sortition/model.hpp"
#include "sortition/solver.hpp"

namespace sortition {

// Coalition members (agent indices) and the vectors they report. Members missing
// from `reported` report truthfully.
struct Misreport {
  std::vector<int> coalition;
  std::map<int, FeatureVector> reported;
};

enum class ManipMetric { kInt, kExt, kComp, kFairness };
enum class SearchKind { kExhaustive, kMu };

ManipMetric parse_metric(const std::string& name);
std::string metric_name(ManipMetric metric);
std::string search_name(SearchKind search);

struct ManipReport {
  ManipMetric metric = ManipMetric::kInt;
  double value = 0.0;
  Misreport witness;
  std::string algorithm;
  SearchKind search = SearchKind::kExhaustive;
  int evaluated = 0;
  // Misreports dropped because they excluded a truthful agent (non-strict mode).
  int skipped = 0;
};

struct ManipulatedInstance {
  Instance instance;
  // origin[j] = truthful index of manipulated agent j.
  std::vector<int> origin;
  // Coalition members removed as self-excluders (truthful indices).
  std::vector<int> removed;
};

// max{0, n_min - k}: the largest coalition the size restriction admits.
int restriction_limit(const Instance& instance);

// Throws NONCOALITION_EXCLUSION; in strict mode also RESTRICTION_VIOLATION.
ManipulatedInstance apply_misreport(const Instance& instance, const Misreport& misreport,
                                    bool strict = false);

// Per feature, the value maximizing ((l + u) / 2) / share; ties go to value order.
// Throws ZERO_SHARE for a quota-constrained value nobody holds.
FeatureVector mu_vector(const Instance& instance);

// Re-solves with each single agent reporting the MU vector; value is the largest
// own-probability gain, clamped at 0. One agent per vector group is tried.
ManipReport worst_mu_manipulator(const Instance& instance, const SolveConfig& config);

struct ExhaustiveOptions {
  bool strict = true;
  std::int64_t budget = 200000;
  // Report vectors to try besides the truthful one; all of FV when empty.
  std::optional<std::vector<FeatureVector>> report_space;
};

// Exact worst case over coalitions of size c (canonicalized by vector group) and
// reported vectors. FAIRNESS is a minimum; the others are maxima.
ManipReport manip_metric_exhaustive(const Instance& instance, const SolveConfig& config, int c,
                                    ManipMetric metric, const ExhaustiveOptions& options = {});

// Delta^f = max_v r - min_v r with r = ((l + u) / 2) / share over held values.
std::vector<double> feature_spreads(const Instance& instance);
// Replaces the quotas of the `count` highest-spread features by (0, k).
Instance drop_features(const Instance& instance, int count);

enum class LbKind { kExample1, kExample2, kThm31, kThm43 };
LbKind parse_lb_kind(const std::string& name);

struct LbParams {
  int n = 0;
  int k = 0;
  int n_min = 0;
  int c = 0;
};

struct LbInstance {
  Instance instance;
  Misreport misreport;
};

// EXAMPLE1 (n, k, n_min), EXAMPLE2 (n, k), THM31 / THM43 (n, k, n_min, c).
LbInstance make_lb_instance(LbKind kind, const LbParams& params);

nlohmann::ordered_json to_json(const Instance& instance, const Misreport& misreport);
nlohmann::ordered_json to_json(const Instance& instance, const ManipReport& report);

}  // namespace sortition
