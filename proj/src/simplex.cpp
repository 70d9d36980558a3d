// Copyright 2026 The dpshape Authors
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

#include "dpshape/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpshape::lp {

namespace {

constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

class Tableau {
 public:
  Tableau(const LinearProgram& lp) {
    const std::size_t n = lp.objective.size();
    const std::size_t m_ub = lp.a_ub.size();
    const std::size_t m_eq = lp.a_eq.size();
    rows_ = m_ub + m_eq;
    structural_ = n;
    slack_begin_ = n;
    art_begin_ = n + m_ub;
    cols_ = art_begin_ + rows_ + 1;  // worst case: one artificial per row

    table_.assign(rows_, std::vector<double>(cols_, 0.0));
    basis_.assign(rows_, -1);

    std::size_t art_count = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const bool is_ub = r < m_ub;
      const auto& coeffs = is_ub ? lp.a_ub[r] : lp.a_eq[r - m_ub];
      double rhs = is_ub ? lp.b_ub[r] : lp.b_eq[r - m_ub];
      double sign = 1.0;
      if (rhs < 0.0) sign = -1.0;
      for (std::size_t j = 0; j < n; ++j) table_[r][j] = sign * coeffs[j];
      table_[r].back() = sign * rhs;
      if (is_ub) table_[r][slack_begin_ + r] = sign;
      // A positively-signed slack can start in the basis; anything else
      // needs an artificial variable.
      if (is_ub && sign > 0.0) {
        basis_[r] = static_cast<int>(slack_begin_ + r);
      } else {
        const std::size_t a = art_begin_ + art_count++;
        table_[r][a] = 1.0;
        basis_[r] = static_cast<int>(a);
      }
    }
    art_end_ = art_begin_ + art_count;
  }

  // Phase 1: minimize the sum of artificials. Returns attained value.
  double run_phase1() {
    cost_.assign(cols_, 0.0);
    for (std::size_t j = art_begin_; j < art_end_; ++j) cost_[j] = 1.0;
    reduce_cost_row();
    iterate(art_end_);
    return -cost_.back();
  }

  // After a feasible phase 1, pivot artificials out of the basis where
  // possible; rows that cannot be cleared are redundant and stay inert.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (static_cast<std::size_t>(basis_[r]) < art_begin_) continue;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (std::abs(table_[r][j]) > kPivotTol) {
          pivot(r, j);
          break;
        }
      }
    }
  }

  LpStatus run_phase2(const std::vector<double>& objective) {
    cost_.assign(cols_, 0.0);
    std::copy(objective.begin(), objective.end(), cost_.begin());
    reduce_cost_row();
    return iterate(art_begin_);
  }

  std::vector<double> solution() const {
    std::vector<double> x(structural_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] >= 0 && static_cast<std::size_t>(basis_[r]) < structural_) {
        x[basis_[r]] = table_[r].back();
      }
    }
    for (double& v : x) {
      if (std::abs(v) < 1e-12) v = 0.0;
    }
    return x;
  }

 private:
  void reduce_cost_row() {
    for (std::size_t r = 0; r < rows_; ++r) {
      const double c = cost_[basis_[r]];
      if (c == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) cost_[j] -= c * table_[r][j];
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = table_[row][col];
    for (std::size_t j = 0; j < cols_; ++j) table_[row][j] /= p;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row) continue;
      const double f = table_[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) table_[r][j] -= f * table_[row][j];
    }
    const double f = cost_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) cost_[j] -= f * table_[row][j];
    }
    basis_[row] = static_cast<int>(col);
  }

  // Bland's rule keeps the walk finite under degeneracy.
  LpStatus iterate(std::size_t allowed_cols) {
    while (true) {
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (cost_[j] < -kCostTol) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) return LpStatus::kOptimal;

      std::size_t leaving = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = table_[r][entering];
        if (a > kPivotTol) {
          const double ratio = table_[r].back() / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (leaving == rows_ || basis_[r] < basis_[leaving]))) {
            best_ratio = ratio;
            leaving = r;
          }
        }
      }
      if (leaving == rows_) return LpStatus::kUnbounded;
      pivot(leaving, entering);
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t structural_ = 0;
  std::size_t slack_begin_ = 0;
  std::size_t art_begin_ = 0;
  std::size_t art_end_ = 0;
  std::vector<std::vector<double>> table_;
  std::vector<double> cost_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve(const LinearProgram& lp) {
  for (const auto& row : lp.a_ub) {
    if (row.size() != lp.objective.size()) {
      throw std::invalid_argument("lp::solve: inconsistent a_ub row length");
    }
  }
  for (const auto& row : lp.a_eq) {
    if (row.size() != lp.objective.size()) {
      throw std::invalid_argument("lp::solve: inconsistent a_eq row length");
    }
  }
  if (lp.a_ub.size() != lp.b_ub.size() || lp.a_eq.size() != lp.b_eq.size()) {
    throw std::invalid_argument("lp::solve: constraint/rhs count mismatch");
  }

  Tableau tableau(lp);
  LpResult result;
  if (tableau.run_phase1() > 1e-7) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  tableau.drive_out_artificials();
  result.status = tableau.run_phase2(lp.objective);
  if (result.status == LpStatus::kOptimal) {
    result.x = tableau.solution();
    double value = 0.0;
    for (std::size_t j = 0; j < result.x.size(); ++j) {
      value += lp.objective[j] * result.x[j];
    }
    result.objective_value = value;
  }
  return result;
}

}  // namespace dpshape::lp
