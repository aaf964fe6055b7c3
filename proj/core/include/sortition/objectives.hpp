#pragma once

#include <string>
#include <vector>

#include "sortition/model.hpp"

namespace sortition {

enum class ObjectiveKind { kMaximin, kMinimax, kNash, kLeximin, kGoldilocks, kLinear };
enum class TieBreak { kNone, kOppositeExtreme };
// How GOLDILOCKS gamma is chosen: given, minimax/maximin-balanced, or selection-bias-balanced.
enum class GammaRule { kFixed, kBalanced, kSelectionBias };

struct EqualityObjective {
  ObjectiveKind kind = ObjectiveKind::kMaximin;
  double gamma = 0.0;
  TieBreak tie_break = TieBreak::kNone;
  GammaRule gamma_rule = GammaRule::kFixed;

  static EqualityObjective maximin() { return {ObjectiveKind::kMaximin}; }
  static EqualityObjective minimax() { return {ObjectiveKind::kMinimax}; }
  static EqualityObjective nash() { return {ObjectiveKind::kNash}; }
  static EqualityObjective leximin() { return {ObjectiveKind::kLeximin}; }
  static EqualityObjective goldilocks(double g) { return {ObjectiveKind::kGoldilocks, g}; }
  static EqualityObjective linear(double g) { return {ObjectiveKind::kLinear, g}; }

  // Grammar: maximin | minimax | maximin-tb | minimax-tb | leximin | nash |
  // goldilocks:<gamma> | goldilocks:auto1 | goldilocks:auto2 | linear:<gamma>.
  static EqualityObjective parse(const std::string& spec);
  std::string spec() const;
};

// Lower is more equal. NASH is -(prod pi)^(1/n); GOLDILOCKS is +inf when min is 0
// (the gamma term is dropped when gamma is 0); LEXIMIN reports -min.
double evaluate(const EqualityObjective& obj, const std::vector<double>& pi, int k, int n);

// A subgradient of evaluate with respect to pi. Extremal agents share the max/min
// terms equally; ties are detected with tolerance 1e-7. NASH returns the gradient of
// -sum log pi.
std::vector<double> subgradient(const EqualityObjective& obj, const std::vector<double>& pi, int k,
                                int n);

double gamma_star(double z, int n_min, int c, int n, int k);
// gamma_1 = (n/k)^2 * max_opt * min_opt.
double gamma_balanced(double min_opt, double max_opt, int n, int k);
// gamma_2 = min r * max r over quota-constrained (f, v), r = ((l + u) / 2) / (k * share).
double gamma_selection_bias(const Instance& instance);

// sum_{i,j} |pi_i - pi_j| / (2 (sum pi)^2).
double gini(const std::vector<double>& pi);

}  // namespace sortition
