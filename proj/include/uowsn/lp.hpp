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

#ifndef UOWSN_LP_HPP
#define UOWSN_LP_HPP

#include <utility>
#include <vector>

namespace uowsn {

/// Dense linear program:  maximize c.x  s.t.  a_i.x <= b_i,  l <= x <= u.
/// All variable bounds must be finite.
struct LpProblem {
  struct Row {
    std::vector<std::pair<int, double>> terms;  ///< (variable, coefficient)
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> objective;  ///< length num_vars
  std::vector<double> lower;      ///< length num_vars
  std::vector<double> upper;      ///< length num_vars
  std::vector<Row> rows;
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Two-phase primal simplex with bounded variables (full tableau).
/// Dantzig pricing with a Bland fallback against cycling. Intended for the
/// small dense problems this project produces (up to a few thousand
/// variables); no effort is made to exploit sparsity.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace uowsn

#endif  // UOWSN_LP_HPP
