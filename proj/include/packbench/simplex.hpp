// Copyright 2026 The PackBench Authors.
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

#ifndef PACKBENCH_SIMPLEX_HPP
#define PACKBENCH_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace packbench {

/// Row-major dense matrix, just enough for the feasibility tableau.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

struct FeasibilityOptions {
  double pivot_tol = 1e-10;
  double cost_tol = 1e-11;
  /// Relative to max(1, sum |b|).
  double feasibility_tol = 1e-8;
  /// Degenerate pivots in a row before switching to Bland's rule.
  std::size_t bland_after = 50;
  /// Hard cap on pivots, as a multiple of rows + cols.
  std::size_t iteration_factor = 50;
};

struct FeasibilityResult {
  enum class Status { Feasible, Infeasible, Degenerate };

  Status status = Status::Degenerate;
  std::vector<double> x;
  /// Artificial value left on each row at the phase-one optimum.
  std::vector<double> row_residual;
  double infeasibility = std::numeric_limits<double>::infinity();
  std::size_t pivots = 0;
  std::string diagnostic;
};

/**
 * Phase-one simplex: looks for x >= 0 with A x = b.
 *
 * One artificial per row; the sum of artificials is minimized with
 * Dantzig pricing, falling back to Bland's rule after a streak of degenerate
 * pivots. Feasible iff the optimum is within tolerance of zero. Hitting the
 * pivot cap or meeting non-finite data reports Degenerate.
 */
inline FeasibilityResult solve_feasibility(const DenseMatrix& A, std::span<const double> b,
                                           const FeasibilityOptions& opt = {}) {
  FeasibilityResult res;
  const std::size_t m = A.rows;
  const std::size_t n = A.cols;
  res.x.assign(n, 0.0);
  res.row_residual.assign(m, 0.0);
  if (b.size() != m) {
    res.diagnostic = "rhs size mismatch";
    return res;
  }
  double bsum = 0.0;
  for (double v : b) {
    if (!std::isfinite(v)) {
      res.diagnostic = "non-finite rhs";
      return res;
    }
    bsum += std::fabs(v);
  }
  for (double v : A.a) {
    if (!std::isfinite(v)) {
      res.diagnostic = "non-finite coefficient";
      return res;
    }
  }

  // Columns: [0, n) structural, [n, n+m) artificial, n+m rhs.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<double> t((m + 1) * width, 0.0);
  auto T = [&](std::size_t i, std::size_t j) -> double& { return t[i * width + j]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) T(i, j) = s * A(i, j);
    T(i, n + i) = 1.0;
    T(i, rhs) = s * b[i];
    basis[i] = n + i;
  }
  // Objective row holds reduced costs of "minimize sum of artificials".
  for (std::size_t j = 0; j < n; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c -= T(i, j);
    T(m, j) = c;
  }
  double obj = 0.0;
  for (std::size_t i = 0; i < m; ++i) obj += T(i, rhs);
  T(m, rhs) = -obj;

  const std::size_t cap = opt.iteration_factor * (m + n + 1);
  std::size_t degenerate_streak = 0;
  bool optimal = false;
  while (res.pivots < cap) {
    const bool bland = degenerate_streak >= opt.bland_after;
    std::size_t enter = width;
    double best = -opt.cost_tol;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = T(m, j);
      if (c < -opt.cost_tol) {
        if (bland) {
          enter = j;
          break;
        }
        if (c < best) {
          best = c;
          enter = j;
        }
      }
    }
    if (enter == width) {
      optimal = true;
      break;
    }
    std::size_t leave = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > opt.pivot_tol) {
        const double r = T(i, rhs) / a;
        if (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave < m && basis[i] < basis[leave])) {
          ratio = r;
          leave = i;
        }
      }
    }
    if (leave == m) {
      // Unbounded direction cannot occur in phase one; treat as numerical trouble.
      res.diagnostic = "unbounded phase-one direction";
      return res;
    }
    degenerate_streak = ratio <= 1e-15 ? degenerate_streak + 1 : 0;

    const double piv = T(leave, enter);
    for (std::size_t j = 0; j < width; ++j) T(leave, j) /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f == 0.0) continue;
      double* row = &t[i * width];
      const double* prow = &t[leave * width];
      for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
      row[enter] = 0.0;
    }
    basis[leave] = enter;
    ++res.pivots;
  }
  if (!optimal) {
    res.diagnostic = "pivot limit reached after " + std::to_string(res.pivots) + " pivots";
    return res;
  }

  res.infeasibility = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = T(i, rhs);
    if (basis[i] < n) {
      res.x[basis[i]] = v;
    } else {
      res.row_residual[basis[i] - n] = v;
      res.infeasibility += v;
    }
  }
  const double tol = opt.feasibility_tol * std::max(1.0, bsum);
  res.status = res.infeasibility <= tol ? FeasibilityResult::Status::Feasible
                                        : FeasibilityResult::Status::Infeasible;
  return res;
}

}  // namespace packbench

#endif  // PACKBENCH_SIMPLEX_HPP
