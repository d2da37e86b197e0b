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

/**
 * @file oracle.hpp
 * @brief Static-equilibrium judge for stacks of boxes.
 *
 * Every box must be held by non-negative vertical contact forces. Contacts
 * are horizontal overlap rectangles between a box top and a box bottom at
 * the same height (or the floor); each contributes one force variable per
 * rectangle corner. For each box the forces balance its weight and the
 * moments about the x and y axes through its center of mass. The scene is
 * stable iff that linear system has a non-negative solution.
 *
 * The judge works from box geometry alone and never consults the heightmap
 * heuristics, so it can be used to grade them.
 */

#ifndef PACKBENCH_ORACLE_HPP
#define PACKBENCH_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "packbench/errors.hpp"
#include "packbench/geometry.hpp"
#include "packbench/simplex.hpp"

namespace packbench {

/// A box at rest in the bin, in cell units.
struct PlacedBox {
  Cell anchor;
  GridDims dims;
  int bottom = 0;
  double density = 1.0;
  /// Center-of-mass offset from the geometric center, in cells.
  double com_dx = 0.0;
  double com_dy = 0.0;

  int top() const noexcept { return bottom + dims.h; }
  double mass() const noexcept { return density * static_cast<double>(dims.volume()); }
  double com_x() const noexcept { return anchor.x + 0.5 * dims.w + com_dx; }
  double com_y() const noexcept { return anchor.y + 0.5 * dims.d + com_dy; }

  friend bool operator==(const PlacedBox&, const PlacedBox&) = default;
};

inline constexpr int kGround = -1;

/// Support contact: `lower` (or kGround) carries `upper` over a rectangle.
struct Contact {
  int upper = 0;
  int lower = kGround;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int z = 0;

  std::array<std::array<int, 2>, 4> corners() const {
    return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
  }
  friend bool operator==(const Contact&, const Contact&) = default;
};

struct ContactGraph {
  std::vector<PlacedBox> boxes;
  std::vector<Contact> contacts;
};

struct StabilityVerdict {
  bool stable = false;
  /// Lowest-index box whose balance rows stay violated; empty when stable.
  std::optional<int> first_infeasible;
  std::string diagnostic;
};

namespace detail {

inline bool overlap_1d(int a0, int a1, int b0, int b1) noexcept {
  return std::max(a0, b0) < std::min(a1, b1);
}

}  // namespace detail

/**
 * Extracts support contacts. Box B supports box A iff top(B) == bottom(A)
 * and their footprints overlap with positive area; the floor supports every
 * box with bottom 0. Throws ModelCorruption if two boxes share volume.
 */
inline ContactGraph build_contacts(std::span<const PlacedBox> boxes) {
  ContactGraph g;
  g.boxes.assign(boxes.begin(), boxes.end());
  const int n = static_cast<int>(boxes.size());
  for (int a = 0; a < n; ++a) {
    const PlacedBox& A = boxes[static_cast<std::size_t>(a)];
    if (A.bottom < 0) throw ModelCorruption("box " + std::to_string(a) + " below the floor");
    const int ax1 = A.anchor.x + A.dims.w;
    const int ay1 = A.anchor.y + A.dims.d;
    if (A.bottom == 0) {
      g.contacts.push_back({a, kGround, A.anchor.x, A.anchor.y, ax1, ay1, 0});
    }
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const PlacedBox& B = boxes[static_cast<std::size_t>(b)];
      const int bx1 = B.anchor.x + B.dims.w;
      const int by1 = B.anchor.y + B.dims.d;
      if (!detail::overlap_1d(A.anchor.x, ax1, B.anchor.x, bx1) ||
          !detail::overlap_1d(A.anchor.y, ay1, B.anchor.y, by1)) {
        continue;
      }
      if (b > a && detail::overlap_1d(A.bottom, A.top(), B.bottom, B.top())) {
        throw ModelCorruption("boxes " + std::to_string(a) + " and " + std::to_string(b) +
                              " interpenetrate");
      }
      if (B.top() == A.bottom) {
        g.contacts.push_back({a, b, std::max(A.anchor.x, B.anchor.x),
                              std::max(A.anchor.y, B.anchor.y), std::min(ax1, bx1),
                              std::min(ay1, by1), A.bottom});
      }
    }
  }
  return g;
}

/**
 * Solves the force-balance feasibility program for the whole graph.
 * Rows are scaled so the heaviest box weighs 1 and lever arms are measured in
 * units of the largest horizontal extent, which keeps verdicts independent
 * of the absolute mass scale. Numerical trouble yields an unstable verdict
 * with a diagnostic.
 */
inline StabilityVerdict equilibrium_feasible(const ContactGraph& g,
                                             const FeasibilityOptions& opt = {}) {
  StabilityVerdict v;
  const std::size_t n = g.boxes.size();
  if (n == 0) {
    v.stable = true;
    return v;
  }
  double max_mass = 0.0;
  double extent = 1.0;
  for (const PlacedBox& b : g.boxes) {
    if (!(b.mass() > 0.0)) {
      v.diagnostic = "non-positive mass";
      v.first_infeasible = static_cast<int>(&b - g.boxes.data());
      return v;
    }
    max_mass = std::max(max_mass, b.mass());
    extent = std::max({extent, static_cast<double>(b.anchor.x + b.dims.w),
                       static_cast<double>(b.anchor.y + b.dims.d)});
  }

  const std::size_t rows = 3 * n;
  const std::size_t cols = 4 * g.contacts.size();
  DenseMatrix A(rows, cols);
  std::vector<double> rhs(rows, 0.0);
  for (std::size_t i = 0; i < n; ++i) rhs[3 * i] = g.boxes[i].mass() / max_mass;

  std::size_t col = 0;
  for (const Contact& c : g.contacts) {
    for (const auto& p : c.corners()) {
      const auto add = [&](int body, double sign) {
        const PlacedBox& b = g.boxes[static_cast<std::size_t>(body)];
        const std::size_t r = 3 * static_cast<std::size_t>(body);
        A(r, col) += sign;
        A(r + 1, col) += sign * (p[0] - b.com_x()) / extent;
        A(r + 2, col) += sign * (p[1] - b.com_y()) / extent;
      };
      add(c.upper, +1.0);
      if (c.lower != kGround) add(c.lower, -1.0);
      ++col;
    }
  }

  const FeasibilityResult r = solve_feasibility(A, rhs, opt);
  switch (r.status) {
    case FeasibilityResult::Status::Feasible:
      v.stable = true;
      return v;
    case FeasibilityResult::Status::Degenerate:
      v.diagnostic = "degenerate program: " + r.diagnostic;
      return v;
    case FeasibilityResult::Status::Infeasible:
      break;
  }
  const double tol = opt.feasibility_tol;
  for (std::size_t i = 0; i < rows; ++i) {
    if (r.row_residual[i] > tol) {
      v.first_infeasible = static_cast<int>(i / 3);
      break;
    }
  }
  if (!v.first_infeasible) {
    // Residual spread thinly over many rows; blame the largest.
    const auto it = std::max_element(r.row_residual.begin(), r.row_residual.end());
    v.first_infeasible = static_cast<int>((it - r.row_residual.begin()) / 3);
  }
  v.diagnostic = "no equilibrium force distribution (residual " +
                 std::to_string(r.infeasibility) + ")";
  return v;
}

inline StabilityVerdict equilibrium_feasible(std::span<const PlacedBox> boxes) {
  return equilibrium_feasible(build_contacts(boxes));
}

/**
 * Verdict after each placement of an ordered scene: entry i judges the
 * first i + 1 boxes. A fall is any entry that is not stable.
 */
inline std::vector<StabilityVerdict> settle_check(std::span<const PlacedBox> placements) {
  std::vector<StabilityVerdict> out;
  out.reserve(placements.size());
  for (std::size_t i = 0; i < placements.size(); ++i) {
    out.push_back(equilibrium_feasible(placements.first(i + 1)));
  }
  return out;
}

}  // namespace packbench

#endif  // PACKBENCH_ORACLE_HPP
