#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sortition/model.hpp"
#include "sortition/panels.hpp"

namespace sortition {

// m equally likely tickets, duplicates allowed.
struct UniformLottery {
  int m = 0;
  std::vector<Panel> tickets;
};

struct PipageTrace {
  int steps = 0;
};

// Scales the distribution by m and pairs the two lowest-indexed fractional
// entries until all are integral. Preserves every d_K in expectation.
UniformLottery pipage_round(const PanelDistribution& dist, int m, std::uint64_t seed,
                            PipageTrace* trace = nullptr);

// Integer ticket counts per support entry, before expansion into tickets.
std::vector<int> pipage_counts(const std::vector<double>& probs, int m, std::uint64_t seed,
                               int* steps = nullptr);

// (k/m, (sqrt(0.5 (1 + ln2 / ln|W|)) sqrt(|W| ln|W|) + 1) / m).
std::pair<double, double> rounding_bounds(int k, int w_count, int m);

ProbabilityAssignment lottery_marginals(const Instance& instance, const UniformLottery& lottery);
bool is_valid_lottery(const Instance& instance, const UniformLottery& lottery);

// One line per ticket: zero-padded 0-based number, a tab, comma-separated ids.
std::string lottery_text(const std::vector<std::vector<std::string>>& tickets);

}  // namespace sortition
