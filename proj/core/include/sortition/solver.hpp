#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <json.hpp>

#include "sortition/model.hpp"
#include "sortition/objectives.hpp"
#include "sortition/panels.hpp"

namespace sortition {

// BRUTE optimizes per agent over every enumerated panel; COLGEN optimizes per
// vector group over compositions generated by the panel oracle.
enum class Backend { kBrute, kColgen };

Backend parse_backend(const std::string& name);
std::string backend_name(Backend backend);

struct SolveConfig {
  Backend backend = Backend::kColgen;
  EqualityObjective objective;
  double eps_master = 1e-8;
  // Column generation stops once the best outside column beats the best support
  // column by at most this much in the pricing score.
  double eps_colgen = 1e-8;
  double tau_anon = 0.01;
  int max_columns = 20000;
  int max_iterations = 200000;
  std::int64_t brute_cap = 200000;
  std::uint64_t seed = 42;
};

struct SolveResult {
  PanelDistribution distribution;
  ProbabilityAssignment pi;
  CompositionDistribution compositions;
  // Probability per instance group.
  std::vector<double> group_pi;
  EqualityObjective objective;
  // Gamma actually used (resolved for auto rules).
  double gamma = 0.0;
  double objective_value = 0.0;
  int iterations = 0;
  int columns = 0;
  bool converged = false;
  std::optional<double> certificate;
};

// Throws STRUCTURAL_EXCLUSION, NO_VALID_PANEL, CAP_EXCEEDED (brute). A budget
// overrun returns converged == false instead of throwing.
SolveResult solve(const Instance& instance, const SolveConfig& config);
SolveResult solve_leximin(const Instance& instance, SolveConfig config);

// Greedy quota-desperation heuristic. Throws RESTART_LIMIT.
Panel solve_legacy(const Instance& instance, std::uint64_t seed, int restart_limit = 10000);

// (min / min_opt, max / max_opt); the first entry is NaN when min_opt is 0.
std::pair<double, double> approximation_ratios(const SolveResult& result, double min_opt,
                                               double max_opt);

// delta(I): smallest achievable max{(k/n)/min, max/(k/n)}, by bisection on the
// probability floor with inner floor-constrained minimax solves.
double optimal_deviation(const Instance& instance, const SolveConfig& config);

nlohmann::ordered_json to_json(const Instance& instance, const SolveResult& result);

}  // namespace sortition
