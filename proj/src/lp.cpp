// Copyright 2026 The uowsn-loc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uowsn/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uowsn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-8;

enum class VarStatus { kBasic, kAtLower, kAtUpper };

// Full-tableau bounded-variable simplex core. Columns 0..n-1 are structural,
// n..n+m-1 slacks, n+m.. artificials (phase 1 only).
class Tableau {
 public:
  explicit Tableau(const LpProblem& p)
      : n_(p.num_vars), m_(static_cast<int>(p.rows.size())) {
    ncols_ = n_ + m_;
    lower_ = p.lower;
    upper_ = p.upper;
    lower_.resize(ncols_, 0.0);
    upper_.resize(ncols_, kInf);  // slack in [0, inf)
    tab_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : p.rows[i].terms) tab(i, j) += a;
      tab(i, n_ + i) = 1.0;
    }

    // Start with structurals at their lower bound and slacks basic.
    status_.assign(ncols_, VarStatus::kAtLower);
    basis_.resize(m_);
    beta_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      status_[n_ + i] = VarStatus::kBasic;
      double act = 0.0;
      for (const auto& [j, a] : p.rows[i].terms) act += a * lower_[j];
      beta_[i] = p.rows[i].rhs - act;
    }
  }

  // Adds an artificial column for every row whose slack starts negative;
  // returns how many were added.
  int add_artificials() {
    int added = 0;
    for (int i = 0; i < m_; ++i)
      if (beta_[i] < -kFeasTol) ++added;
    if (added == 0) return 0;
    const int old_cols = ncols_;
    ncols_ += added;
    std::vector<double> grown(static_cast<std::size_t>(m_) * ncols_, 0.0);
    for (int i = 0; i < m_; ++i)
      std::copy_n(&tab_[static_cast<std::size_t>(i) * old_cols], old_cols,
                  &grown[static_cast<std::size_t>(i) * ncols_]);
    tab_ = std::move(grown);
    lower_.resize(ncols_, 0.0);
    upper_.resize(ncols_, kInf);
    status_.resize(ncols_, VarStatus::kAtLower);
    first_artificial_ = old_cols;
    int col = old_cols;
    for (int i = 0; i < m_; ++i) {
      if (beta_[i] < -kFeasTol) {
        tab(i, col) = -1.0;  // artificial = slack deficit, nonnegative
        status_[basis_[i]] = VarStatus::kAtLower;  // slack leaves at 0
        basis_[i] = col;
        status_[col] = VarStatus::kBasic;
        beta_[i] = -beta_[i];
        ++col;
      }
    }
    return added;
  }

  // Objective -sum(artificials); reduced costs from scratch.
  void load_phase1_objective() {
    cost_.assign(ncols_, 0.0);
    for (int j = std::max(first_artificial_, 0); j < ncols_; ++j)
      cost_[j] = first_artificial_ >= 0 ? -1.0 : 0.0;
    refresh_reduced();
  }

  // Original (maximization) objective over structural columns.
  void load_objective(const std::vector<double>& c) {
    cost_.assign(ncols_, 0.0);
    std::copy(c.begin(), c.end(), cost_.begin());
    refresh_reduced();
  }

  // Maximizes the loaded objective. Returns false on iteration limit.
  bool optimize(bool exclude_artificials) {
    const long max_iters = 200L * (m_ + ncols_) + 2000;
    int stall = 0;
    double last_obj = objective_value();
    for (long iter = 0; iter < max_iters; ++iter) {
      const bool bland = stall > 2 * (m_ + ncols_);
      const int q = pick_entering(exclude_artificials, bland);
      if (q < 0) return true;  // optimal
      if (!step(q, bland)) return true;  // blocked degenerate step
      const double obj = objective_value();
      stall = (obj > last_obj + 1e-12 * (1.0 + std::abs(last_obj))) ? 0 : stall + 1;
      last_obj = obj;
    }
    return false;
  }

  double objective_value() const {
    double z = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      if (cost_[j] == 0.0 || status_[j] == VarStatus::kBasic) continue;
      z += cost_[j] * (status_[j] == VarStatus::kAtUpper ? upper_[j] : lower_[j]);
    }
    for (int i = 0; i < m_; ++i) z += cost_[basis_[i]] * beta_[i];
    return z;
  }

  std::vector<double> structural_values() const {
    std::vector<double> val(ncols_);
    for (int j = 0; j < ncols_; ++j)
      val[j] = status_[j] == VarStatus::kAtUpper ? upper_[j] : lower_[j];
    for (int i = 0; i < m_; ++i) val[basis_[i]] = beta_[i];
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j) x[j] = std::clamp(val[j], lower_[j], upper_[j]);
    return x;
  }

  double artificial_sum() const {
    if (first_artificial_ < 0) return 0.0;
    double s = 0.0;
    for (int j = first_artificial_; j < ncols_; ++j) s += value_of(j);
    return s;
  }

  // Locks artificials at zero so phase 2 cannot regrow them.
  void freeze_artificials() {
    if (first_artificial_ < 0) return;
    for (int j = first_artificial_; j < ncols_; ++j) upper_[j] = 0.0;
  }

  bool has_artificials() const { return first_artificial_ >= 0; }

 private:
  double& tab(int i, int j) {
    return tab_[static_cast<std::size_t>(i) * ncols_ + j];
  }
  double tab(int i, int j) const {
    return tab_[static_cast<std::size_t>(i) * ncols_ + j];
  }

  double value_of(int j) const {
    switch (status_[j]) {
      case VarStatus::kAtLower: return lower_[j];
      case VarStatus::kAtUpper: return upper_[j];
      case VarStatus::kBasic: break;
    }
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == j) return beta_[i];
    return 0.0;
  }

  void refresh_reduced() {
    d_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[static_cast<std::size_t>(i) * ncols_];
      for (int j = 0; j < ncols_; ++j) d_[j] -= cb * row[j];
    }
  }

  int pick_entering(bool exclude_artificials, bool bland) const {
    const int limit =
        exclude_artificials && first_artificial_ >= 0 ? first_artificial_ : ncols_;
    int best = -1;
    double best_score = kCostTol;
    for (int j = 0; j < limit; ++j) {
      if (status_[j] == VarStatus::kBasic) continue;
      if (upper_[j] - lower_[j] <= 0.0) continue;  // fixed variable
      const double dj = d_[j];
      const bool improving =
          (status_[j] == VarStatus::kAtLower && dj > kCostTol) ||
          (status_[j] == VarStatus::kAtUpper && dj < -kCostTol);
      if (!improving) continue;
      if (bland) return j;
      if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = j;
      }
    }
    return best;
  }

  // Moves entering variable q toward its improving direction.
  bool step(int q, bool bland) {
    const double dir = status_[q] == VarStatus::kAtLower ? 1.0 : -1.0;
    double t_max = upper_[q] - lower_[q];  // bound-to-bound flip distance
    int leave_row = -1;
    double leave_bound = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double coef = dir * tab(i, q);
      if (std::abs(coef) < kPivotTol) continue;
      const int k = basis_[i];
      double limit, bound;
      if (coef > 0.0) {  // basic k decreases toward its lower bound
        limit = (beta_[i] - lower_[k]) / coef;
        bound = lower_[k];
      } else {  // basic k increases toward its upper bound
        if (upper_[k] == kInf) continue;
        limit = (upper_[k] - beta_[i]) / (-coef);
        bound = upper_[k];
      }
      if (limit < 0.0) limit = 0.0;
      bool better;
      if (leave_row < 0) {
        better = limit < t_max - 1e-12;
      } else if (limit < t_max - 1e-12) {
        better = true;
      } else if (limit <= t_max + 1e-12) {
        better = bland ? basis_[i] < basis_[leave_row]
                       : std::abs(tab(i, q)) > std::abs(tab(leave_row, q));
      } else {
        better = false;
      }
      if (better) {
        t_max = std::min(t_max, std::max(limit, 0.0));
        leave_row = i;
        leave_bound = bound;
      }
    }

    if (leave_row < 0 && t_max >= kInf)
      throw std::runtime_error("lp: objective unbounded");

    if (leave_row < 0) {
      // Bound flip.
      if (t_max <= 0.0) return false;
      for (int i = 0; i < m_; ++i) beta_[i] -= dir * tab(i, q) * t_max;
      status_[q] = status_[q] == VarStatus::kAtLower ? VarStatus::kAtUpper
                                                     : VarStatus::kAtLower;
      return true;
    }

    const double enter_val =
        (status_[q] == VarStatus::kAtLower ? lower_[q] : upper_[q]) +
        dir * t_max;
    for (int i = 0; i < m_; ++i) beta_[i] -= dir * tab(i, q) * t_max;

    // Pivot on (leave_row, q).
    const int k = basis_[leave_row];
    status_[k] =
        leave_bound == lower_[k] ? VarStatus::kAtLower : VarStatus::kAtUpper;
    double* prow = &tab_[static_cast<std::size_t>(leave_row) * ncols_];
    const double inv = 1.0 / prow[q];
    for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == leave_row) continue;
      const double f = tab(i, q);
      if (f == 0.0) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * ncols_];
      for (int j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = d_[q];
    if (fd != 0.0) {
      for (int j = 0; j < ncols_; ++j) d_[j] -= fd * prow[j];
      d_[q] = 0.0;
    }
    basis_[leave_row] = q;
    status_[q] = VarStatus::kBasic;
    beta_[leave_row] = enter_val;
    return true;
  }

  int n_, m_, ncols_;
  int first_artificial_ = -1;
  std::vector<double> tab_, beta_, lower_, upper_, d_, cost_;
  std::vector<VarStatus> status_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  if (static_cast<int>(problem.objective.size()) != problem.num_vars ||
      static_cast<int>(problem.lower.size()) != problem.num_vars ||
      static_cast<int>(problem.upper.size()) != problem.num_vars)
    throw std::invalid_argument("lp: inconsistent problem dimensions");
  for (int j = 0; j < problem.num_vars; ++j) {
    if (!(problem.lower[j] <= problem.upper[j]))
      throw std::invalid_argument("lp: empty variable bound interval");
    if (!std::isfinite(problem.lower[j]) || !std::isfinite(problem.upper[j]))
      throw std::invalid_argument("lp: variable bounds must be finite");
  }
  for (const auto& row : problem.rows)
    for (const auto& [j, a] : row.terms) {
      if (j < 0 || j >= problem.num_vars)
        throw std::invalid_argument("lp: row references unknown variable");
      (void)a;
    }

  Tableau tab(problem);

  if (tab.add_artificials() > 0) {
    tab.load_phase1_objective();
    if (!tab.optimize(/*exclude_artificials=*/false))
      return {LpStatus::kIterationLimit, 0.0, {}};
    if (tab.artificial_sum() > kFeasTol) return {LpStatus::kInfeasible, 0.0, {}};
    tab.freeze_artificials();
  }

  tab.load_objective(problem.objective);
  if (!tab.optimize(/*exclude_artificials=*/true))
    return {LpStatus::kIterationLimit, 0.0, {}};

  LpSolution sol;
  sol.status = LpStatus::kOptimal;
  sol.x = tab.structural_values();
  sol.objective = 0.0;
  for (int j = 0; j < problem.num_vars; ++j)
    sol.objective += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace uowsn
