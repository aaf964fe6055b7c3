#include "sortition/lp.hpp"

#include <cmath>
#include <limits>

namespace sortition::lp {
namespace {

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_(static_cast<size_t>(rows) * (cols + 1), 0.0) {}

  double& at(int i, int j) { return a_[static_cast<size_t>(i) * (n_ + 1) + j]; }
  double& rhs(int i) { return at(i, n_); }

  void pivot(int r, int c, std::vector<double>& reduced, double& value) {
    const double p = at(r, c);
    double* row = &at(r, 0);
    for (int j = 0; j <= n_; ++j) row[j] /= p;
    row[c] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* other = &at(i, 0);
      const double factor = other[c];
      if (factor == 0.0) continue;
      for (int j = 0; j <= n_; ++j) other[j] -= factor * row[j];
      other[c] = 0.0;
    }
    const double factor = reduced[c];
    if (factor != 0.0) {
      for (int j = 0; j < n_; ++j) reduced[j] -= factor * row[j];
      value += factor * row[n_];
      reduced[c] = 0.0;
    }
  }

  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  int m_;
  int n_;
  std::vector<double> a_;
};

struct Runner {
  Tableau& t;
  std::vector<int>& basis;
  const std::vector<bool>& barred;
  const Options& opt;
  int iterations = 0;

  // Returns kOptimal, kUnbounded or kIterationLimit.
  Status run(std::vector<double>& reduced, double& value) {
    int degenerate = 0;
    bool bland = false;
    while (true) {
      if (iterations >= opt.max_iterations) return Status::kIterationLimit;
      int enter = -1;
      double best = -opt.optimality_tol;
      for (int j = 0; j < t.cols(); ++j) {
        if (barred[j]) continue;
        if (reduced[j] < best) {
          enter = j;
          if (bland) break;
          best = reduced[j];
        }
      }
      if (enter < 0) return Status::kOptimal;
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      double leave_piv = 0.0;
      for (int i = 0; i < t.rows(); ++i) {
        const double a = t.at(i, enter);
        if (a <= opt.pivot_tol) continue;
        const double r = std::max(t.rhs(i), 0.0) / a;
        bool take = false;
        if (r < ratio - 1e-12) {
          take = true;
        } else if (r <= ratio + 1e-12 && leave >= 0) {
          take = bland ? basis[i] < basis[leave] : a > leave_piv;
        }
        if (take) {
          leave = i;
          ratio = std::min(r, ratio);
          leave_piv = a;
        }
      }
      if (leave < 0) return Status::kUnbounded;
      if (ratio <= 1e-12) {
        if (++degenerate > opt.degenerate_switch) bland = true;
      } else {
        degenerate = 0;
      }
      t.pivot(leave, enter, reduced, value);
      basis[leave] = enter;
      ++iterations;
    }
  }
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  const int n = problem.num_vars();
  const int m = static_cast<int>(problem.rows.size());

  // Column layout: structural | one slack/surplus per inequality row | one artificial per
  // kGe/kEq row (after normalizing rhs >= 0).
  std::vector<double> flip(m, 1.0);
  std::vector<Sense> sense(m);
  for (int i = 0; i < m; ++i) {
    sense[i] = problem.rows[i].sense;
    if (problem.rows[i].rhs < 0) {
      flip[i] = -1.0;
      if (sense[i] == Sense::kLe) sense[i] = Sense::kGe;
      else if (sense[i] == Sense::kGe) sense[i] = Sense::kLe;
    }
  }
  std::vector<int> slack_col(m, -1);
  std::vector<int> art_col(m, -1);
  int cols = n;
  for (int i = 0; i < m; ++i) {
    if (sense[i] != Sense::kEq) slack_col[i] = cols++;
  }
  for (int i = 0; i < m; ++i) {
    if (sense[i] != Sense::kLe) art_col[i] = cols++;
  }

  Tableau t(m, cols);
  std::vector<int> basis(m);
  std::vector<int> identity(m);
  std::vector<bool> is_art(cols, false);
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, a] : problem.rows[i].coeffs) t.at(i, j) += flip[i] * a;
    t.rhs(i) = flip[i] * problem.rows[i].rhs;
    if (sense[i] == Sense::kLe) {
      t.at(i, slack_col[i]) = 1.0;
      basis[i] = slack_col[i];
      identity[i] = slack_col[i];
    } else {
      if (sense[i] == Sense::kGe) t.at(i, slack_col[i]) = -1.0;
      t.at(i, art_col[i]) = 1.0;
      basis[i] = art_col[i];
      identity[i] = art_col[i];
      is_art[art_col[i]] = true;
    }
  }

  Solution sol;
  std::vector<bool> none_barred(cols, false);
  Runner runner{t, basis, none_barred, options};

  // Phase 1: minimize the sum of artificials.
  bool any_art = false;
  for (int j = 0; j < cols; ++j) any_art = any_art || is_art[j];
  if (any_art) {
    std::vector<double> reduced(cols, 0.0);
    double value = 0.0;
    for (int j = 0; j < cols; ++j) reduced[j] = is_art[j] ? 1.0 : 0.0;
    for (int i = 0; i < m; ++i) {
      if (!is_art[basis[i]]) continue;
      for (int j = 0; j < cols; ++j) reduced[j] -= t.at(i, j);
      value -= t.rhs(i);
    }
    Status st = runner.run(reduced, value);
    if (st == Status::kIterationLimit) {
      sol.status = st;
      sol.iterations = runner.iterations;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      if (is_art[basis[i]]) infeas += std::max(t.rhs(i), 0.0);
    }
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::fabs(problem.rows[i].rhs));
    if (infeas > options.feasibility_tol * scale) {
      sol.status = Status::kInfeasible;
      sol.iterations = runner.iterations;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (!is_art[basis[i]]) continue;
      int best = -1;
      double best_abs = 1e-9;
      for (int j = 0; j < cols; ++j) {
        if (is_art[j]) continue;
        if (std::fabs(t.at(i, j)) > best_abs) {
          best = j;
          best_abs = std::fabs(t.at(i, j));
        }
      }
      if (best >= 0) {
        t.pivot(i, best, reduced, value);
        basis[i] = best;
      }
    }
  }

  // Phase 2.
  std::vector<double> cost(cols, 0.0);
  for (int j = 0; j < n; ++j) cost[j] = problem.cost[j];
  std::vector<double> reduced = cost;
  double value = 0.0;
  for (int i = 0; i < m; ++i) {
    const double cb = cost[basis[i]];
    if (cb == 0.0) continue;
    for (int j = 0; j < cols; ++j) reduced[j] -= cb * t.at(i, j);
    value -= cb * t.rhs(i);
  }
  Runner phase2{t, basis, is_art, options, runner.iterations};
  const Status st = phase2.run(reduced, value);
  sol.iterations = phase2.iterations;
  sol.status = st;
  if (st != Status::kOptimal) return sol;

  sol.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = std::max(t.rhs(i), 0.0);
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += problem.cost[j] * sol.x[j];
  sol.duals.assign(m, 0.0);
  for (int i = 0; i < m; ++i) sol.duals[i] = -reduced[identity[i]] * flip[i];
  return sol;
}

}  // namespace sortition::lp
