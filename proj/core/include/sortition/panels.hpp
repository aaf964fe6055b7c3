#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sortition/model.hpp"

namespace sortition {

// Sorted agent indices.
struct Panel {
  std::vector<int> members;

  auto operator<=>(const Panel&) const = default;
  bool operator==(const Panel&) const = default;
};

struct PanelDistribution {
  std::vector<std::pair<Panel, double>> support;
};

// Seat counts per instance group (Instance::group_vector order), summing to k.
using Composition = std::vector<int>;

struct CompositionDistribution {
  std::vector<std::pair<Composition, double>> support;
};

// Selection probability per agent index.
struct ProbabilityAssignment {
  std::vector<double> pi;

  double min() const;
  double max() const;
  double sum() const;
  // Mean probability within each group.
  std::vector<double> group_probabilities(const Instance& instance) const;
  // Largest within-group spread.
  double anonymity_gap(const Instance& instance) const;
};

bool is_valid_panel(const Instance& instance, const Panel& panel);
bool is_valid_composition(const Instance& instance, const Composition& counts);
Composition composition_of(const Instance& instance, const Panel& panel);

// Throws INVALID_PANEL if the support holds an invalid panel.
ProbabilityAssignment marginals(const Instance& instance, const PanelDistribution& dist);
// p_w = t_w / n_w per group.
std::vector<double> group_marginals(const Instance& instance, const CompositionDistribution& dist);

// All valid compositions in lexicographic order. Throws CAP_EXCEEDED.
std::vector<Composition> enumerate_compositions(const Instance& instance,
                                                std::int64_t cap = 1'000'000);
// All valid panels in lexicographic order. Throws CAP_EXCEEDED.
std::vector<Panel> enumerate_panels(const Instance& instance, std::int64_t cap = 1'000'000);

struct CompositionChoice {
  Composition counts;
  double weight = 0.0;
};

// Maximizes sum_g sum of the top counts[g] entries of seat_weights[g], where each
// seat_weights[g] is sorted descending and has group_size(g) entries. Ties resolve
// to the lexicographically smallest composition.
std::optional<CompositionChoice> best_composition(
    const Instance& instance, const std::vector<std::vector<double>>& seat_weights);
// Same, with one constant weight per seat of each group.
std::optional<CompositionChoice> composition_oracle(const Instance& instance,
                                                    const std::vector<double>& group_weights);
// Max-weight valid panel for per-agent weights; ties to smallest agent ids.
std::optional<Panel> panel_oracle(const Instance& instance, const std::vector<double>& weights);

// Agents on no valid panel, ascending.
std::vector<int> structurally_excluded(const Instance& instance);

// Removes excluded coalition members. Throws NONCOALITION_EXCLUSION if any excluded
// agent is outside the coalition. kept receives the surviving original indices.
Instance strip_self_excluders(const Instance& manipulated, const std::vector<int>& coalition,
                              std::vector<int>* kept = nullptr);

// Round-robin seat filling per group, coupled across groups by quantile so the
// support stays small; marginals equal t_w / n_w exactly.
PanelDistribution expand_composition_distribution(const Instance& instance,
                                                  const CompositionDistribution& dist);
CompositionDistribution compositions_of(const Instance& instance, const PanelDistribution& dist);

nlohmann::ordered_json to_json(const Instance& instance, const PanelDistribution& dist);
PanelDistribution distribution_from_json(const Instance& instance, const nlohmann::json& j);

}  // namespace sortition
