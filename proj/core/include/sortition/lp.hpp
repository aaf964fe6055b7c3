#pragma once

#include <utility>
#include <vector>

namespace sortition::lp {

enum class Sense { kLe, kGe, kEq };
enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

// minimize cost.x subject to rows, x >= 0.
struct Problem {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Sense sense = Sense::kLe;
    double rhs = 0.0;
  };

  std::vector<double> cost;
  std::vector<Row> rows;

  int add_var(double c) {
    cost.push_back(c);
    return static_cast<int>(cost.size()) - 1;
  }
  int add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs) {
    rows.push_back({std::move(coeffs), sense, rhs});
    return static_cast<int>(rows.size()) - 1;
  }
  int num_vars() const { return static_cast<int>(cost.size()); }
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-11;
  int max_iterations = 200000;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 64;
};

struct Solution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  // d(objective)/d(rhs_i): >= 0 on kGe rows, <= 0 on kLe rows.
  std::vector<double> duals;
  int iterations = 0;
};

// Dense two-phase primal simplex.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace sortition::lp
