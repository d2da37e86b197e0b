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
 * @file stability.hpp
 * @brief Convex-hull support tests over the heightmap and empty-map upkeep.
 *
 * A placement of an oriented box at anchor (x, y) is judged by looking at the
 * w * d window of the heightmap under it:
 *
 *  - rejected if window max + h exceeds the bin height;
 *  - accepted if the window is bare floor;
 *  - otherwise the cells reaching the window max are the support points. In
 *    ConvexHull1 mode all of them count. In ConvexHullAlpha mode only those
 *    whose column holds no trapped gap (empty map == 0) count, i.e. support
 *    that reaches the floor through solid material. The placement is accepted
 *    iff the footprint center lies in the convex hull of the support points.
 *
 * Cell (i, j) of a window is the point (2i+1, 2j+1) in half-cell units and
 * the footprint center is (w, d), so every comparison is exact integer math.
 * Point and segment hulls never accept.
 */

#ifndef PACKBENCH_STABILITY_HPP
#define PACKBENCH_STABILITY_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "packbench/errors.hpp"
#include "packbench/geometry.hpp"
#include "packbench/grid.hpp"
#include "packbench/hull.hpp"

namespace packbench {

enum class CheckMode { ConvexHull1, ConvexHullAlpha };

inline const char* to_string(CheckMode m) noexcept {
  return m == CheckMode::ConvexHull1 ? "ch1" : "cha";
}

/// Window-local cells acting as support.
using SupportSet = std::vector<Cell>;

/// Cells equal to the window maximum.
template <typename G>
SupportSet support_points(const G& window) {
  SupportSet out;
  if (window.size() == 0) return out;
  const auto cells = window.cells();
  const auto m = *std::max_element(cells.begin(), cells.end());
  for (int j = 0; j < window.ny(); ++j) {
    for (int i = 0; i < window.nx(); ++i) {
      if (window(i, j) == m) out.push_back({i, j});
    }
  }
  return out;
}

/// Keeps the support points whose column has no trapped gap.
inline SupportSet filter_grounded(const SupportSet& pf, const EmptyMap& empty_window) {
  SupportSet out;
  for (const Cell& c : pf) {
    if (empty_window[c] == 0) out.push_back(c);
  }
  return out;
}

inline Point2 half_cell_point(Cell c) noexcept {
  return {2 * std::int64_t{c.x} + 1, 2 * std::int64_t{c.y} + 1};
}

inline Point2 half_cell_center(Footprint fp) noexcept { return {fp.w, fp.d}; }

/**
 * Single-anchor verdict, computed literally: extract the window, find the
 * support points, optionally filter them, hull them, test the center.
 * Out-of-grid windows are rejected rather than thrown.
 */
inline bool is_stable_at(const Heightmap& hm, const EmptyMap& em, Cell anchor, GridDims gd,
                         int nz, CheckMode mode) {
  const Footprint fp = gd.footprint();
  if (!hm.contains(anchor, fp)) return false;
  const Heightmap window = extract_window(hm, anchor, fp);
  const auto cells = window.cells();
  const int m = *std::max_element(cells.begin(), cells.end());
  if (m + gd.h > nz) return false;
  if (m == 0) return true;
  SupportSet pf = support_points(window);
  if (mode == CheckMode::ConvexHullAlpha) {
    pf = filter_grounded(pf, extract_window(em, anchor, fp));
  }
  std::vector<Point2> pts;
  pts.reserve(pf.size());
  for (const Cell& c : pf) pts.push_back(half_cell_point(c));
  return center_in_hull(convex_hull(pts), half_cell_center(fp));
}

namespace detail {

// Per-row sliding statistics of width w: maximum plus its leftmost and
// rightmost positions. Row values below zero never count as a maximum hit
// for a window whose heightmap maximum is positive.
struct RowWindows {
  int ax = 0;
  std::vector<std::int32_t> max;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
};

inline void row_windows(std::span<const std::int32_t> row, int w, RowWindows& out, int y) {
  const int n = static_cast<int>(row.size());
  const std::size_t base = static_cast<std::size_t>(y) * static_cast<std::size_t>(out.ax);
  std::deque<int> lq;  // leftmost argmax at front
  std::deque<int> rq;  // rightmost argmax at front
  for (int i = 0; i < n; ++i) {
    while (!lq.empty() && row[lq.back()] < row[i]) lq.pop_back();
    lq.push_back(i);
    while (!rq.empty() && row[rq.back()] <= row[i]) rq.pop_back();
    rq.push_back(i);
    if (lq.front() <= i - w) lq.pop_front();
    if (rq.front() <= i - w) rq.pop_front();
    if (i >= w - 1) {
      const std::size_t k = base + static_cast<std::size_t>(i - w + 1);
      out.max[k] = row[lq.front()];
      out.left[k] = lq.front();
      out.right[k] = rq.front();
    }
  }
}

inline RowWindows all_row_windows(const std::vector<std::int32_t>& values, int nx, int ny, int w) {
  RowWindows rw;
  rw.ax = nx - w + 1;
  const std::size_t n = static_cast<std::size_t>(rw.ax) * static_cast<std::size_t>(ny);
  rw.max.assign(n, 0);
  rw.left.assign(n, 0);
  rw.right.assign(n, 0);
  for (int y = 0; y < ny; ++y) {
    row_windows(std::span<const std::int32_t>(values).subspan(
                    static_cast<std::size_t>(y) * static_cast<std::size_t>(nx),
                    static_cast<std::size_t>(nx)),
                w, rw, y);
  }
  return rw;
}

}  // namespace detail

/**
 * Acceptance map for one oriented item over every anchor of the grid.
 *
 * Equivalent to calling is_stable_at at every anchor. Per row only the
 * leftmost and rightmost support cell can be hull vertices, so those are the
 * only points gathered; sliding-window deques supply them in O(1) per anchor
 * and row.
 */
inline StableActionMap stable_action_map(const Heightmap& hm, const EmptyMap& em, GridDims gd,
                                         int nz, CheckMode mode,
                                         std::string* diagnostic = nullptr) {
  const int nx = hm.nx();
  const int ny = hm.ny();
  StableActionMap out(nx, ny, 0);
  if (gd.w > nx || gd.d > ny) {
    if (diagnostic) {
      *diagnostic = "footprint " + std::to_string(gd.w) + "x" + std::to_string(gd.d) +
                    " larger than the " + std::to_string(nx) + "x" + std::to_string(ny) + " grid";
    }
    return out;
  }
  if (gd.h > nz) return out;

  const std::vector<std::int32_t> heights(hm.cells().begin(), hm.cells().end());
  std::vector<std::int32_t> support_values = heights;
  if (mode == CheckMode::ConvexHullAlpha) {
    const auto e = em.cells();
    for (std::size_t i = 0; i < support_values.size(); ++i) {
      if (e[i] != 0) support_values[i] = -1;
    }
  }
  const detail::RowWindows full = detail::all_row_windows(heights, nx, ny, gd.w);
  detail::RowWindows grounded;
  if (mode == CheckMode::ConvexHullAlpha) {
    grounded = detail::all_row_windows(support_values, nx, ny, gd.w);
  }
  const detail::RowWindows& support = mode == CheckMode::ConvexHullAlpha ? grounded : full;

  const int ax = nx - gd.w + 1;
  const int ay = ny - gd.d + 1;
  // Column sliding max of the row maxima gives the window maxima.
  std::vector<std::int32_t> wmax(static_cast<std::size_t>(ax) * static_cast<std::size_t>(ay));
  for (int x = 0; x < ax; ++x) {
    detail::sliding_max_1d(
        ny, gd.d, [&](int j) { return full.max[static_cast<std::size_t>(j) * ax + x]; },
        [&](int j, std::int32_t v) { wmax[static_cast<std::size_t>(j) * ax + x] = v; });
  }

  // Points are stored transposed as (row, col) so that gathering row by row
  // yields lexicographically sorted input for the chain.
  std::vector<Point2> pts;
  std::vector<Point2> hull;
  pts.reserve(2 * static_cast<std::size_t>(gd.d));
  const Point2 center{gd.d, gd.w};
  for (int y = 0; y < ay; ++y) {
    for (int x = 0; x < ax; ++x) {
      const std::int32_t m = wmax[static_cast<std::size_t>(y) * ax + x];
      if (m + gd.h > nz) continue;
      if (m == 0) {
        out(x, y) = 1;
        continue;
      }
      pts.clear();
      for (int j = y; j < y + gd.d; ++j) {
        const std::size_t k = static_cast<std::size_t>(j) * ax + x;
        if (support.max[k] != m) continue;
        const std::int64_t row = 2 * std::int64_t{j - y} + 1;
        pts.push_back({row, 2 * std::int64_t{support.left[k] - x} + 1});
        if (support.right[k] != support.left[k]) {
          pts.push_back({row, 2 * std::int64_t{support.right[k] - x} + 1});
        }
      }
      const std::size_t nv = detail::chain_sorted(pts, hull);
      if (nv < 3) continue;
      bool inside = true;
      for (std::size_t i = 0; i < nv && inside; ++i) {
        inside = cross(hull[i], hull[(i + 1) % nv], center) >= 0;
      }
      out(x, y) = inside ? 1 : 0;
    }
  }
  return out;
}

/**
 * Adds the gaps trapped under a box about to be placed at `anchor`:
 * em += window_max - hm over the footprint. Must see the heightmap as it was
 * before the placement. Returns the number of gap voxels added.
 */
inline std::int64_t update_empty_map(EmptyMap& em, const Heightmap& hm, Cell anchor,
                                     GridDims gd) {
  const int rest = window_max(hm, anchor, gd.footprint());
  std::int64_t added = 0;
  for (int y = anchor.y; y < anchor.y + gd.d; ++y) {
    for (int x = anchor.x; x < anchor.x + gd.w; ++x) {
      const int gap = rest - hm(x, y);
      em(x, y) += gap;
      added += gap;
    }
  }
  return added;
}

inline std::int64_t count_true(const StableActionMap& m) {
  return std::count_if(m.cells().begin(), m.cells().end(), [](std::uint8_t v) { return v != 0; });
}

}  // namespace packbench

#endif  // PACKBENCH_STABILITY_HPP
