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
 * @file geometry.hpp
 * @brief Voxel grid conventions shared by every other module.
 *
 * The bin is a nx * ny * nz voxel block. Boxes are axis aligned and their
 * metric dimensions are snapped to whole cells with a ceiling rule, so a
 * snapped footprint never understates the real one. Heights live in integer
 * voxels so that support detection can use exact equality.
 */

#ifndef PACKBENCH_GEOMETRY_HPP
#define PACKBENCH_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "packbench/errors.hpp"
#include "packbench/grid.hpp"

namespace packbench {

/// Bin extent in meters and its voxelization.
struct GridSpec {
  double bin_w = 0.6;
  double bin_d = 0.6;
  double bin_h = 0.6;
  double resolution = 0.005;
  int nx = 120;
  int ny = 120;
  int nz = 120;

  static GridSpec make(double w, double d, double h, double resolution = 0.005) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    if (!(w > 0.0 && d > 0.0 && h > 0.0)) {
      throw std::invalid_argument("bin dimensions must be positive");
    }
    GridSpec s;
    s.bin_w = w;
    s.bin_d = d;
    s.bin_h = h;
    s.resolution = resolution;
    s.nx = static_cast<int>(std::lround(w / resolution));
    s.ny = static_cast<int>(std::lround(d / resolution));
    s.nz = static_cast<int>(std::lround(h / resolution));
    if (s.nx < 1 || s.ny < 1 || s.nz < 1) {
      throw std::invalid_argument("bin smaller than one cell at this resolution");
    }
    return s;
  }

  /// Cubic grid of n cells per side, for tests and desk-scale scenes.
  static GridSpec cells(int nx, int ny, int nz, double resolution = 0.005) {
    return make(nx * resolution, ny * resolution, nz * resolution, resolution);
  }

  std::int64_t volume_voxels() const noexcept {
    return std::int64_t{nx} * ny * nz;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Metric box dimensions.
struct BoxDims {
  double w = 0;
  double d = 0;
  double h = 0;

  double volume() const noexcept { return w * d * h; }
  friend bool operator==(const BoxDims&, const BoxDims&) = default;
};

/// Box dimensions in cells.
struct GridDims {
  int w = 1;
  int d = 1;
  int h = 1;

  Footprint footprint() const noexcept { return {w, d}; }
  std::int64_t volume() const noexcept { return std::int64_t{w} * d * h; }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/**
 * One of the six axis permutations of (w, d, h).
 *
 * Indices follow lexicographic permutation order of the source axes:
 * 0 (w,d,h), 1 (w,h,d), 2 (d,w,h), 3 (d,h,w), 4 (h,w,d), 5 (h,d,w).
 */
struct Orientation {
  static constexpr int kCount = 6;
  static constexpr std::array<std::array<int, 3>, kCount> kPermutations{{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  int index = 0;

  GridDims apply(GridDims g) const {
    if (index < 0 || index >= kCount) {
      throw std::out_of_range("orientation index " + std::to_string(index));
    }
    const std::array<int, 3> src{g.w, g.d, g.h};
    const auto& p = kPermutations[static_cast<std::size_t>(index)];
    return {src[p[0]], src[p[1]], src[p[2]]};
  }

  friend bool operator==(const Orientation&, const Orientation&) = default;
  friend auto operator<=>(const Orientation&, const Orientation&) = default;
};

struct OrientedDims {
  Orientation orientation;
  GridDims dims;
};

/// ceil(meters / resolution), tolerant to binary representation noise so that
/// exact multiples such as 0.03 / 0.005 stay exact.
inline int snap_extent(double meters, double resolution) {
  const double ratio = meters / resolution;
  const double eps = 1e-9 * std::max(1.0, ratio);
  return std::max(1, static_cast<int>(std::ceil(ratio - eps)));
}

/// Snaps each dimension with the ceiling rule; no bin check.
inline GridDims snap_extents(const BoxDims& dims, double resolution) {
  if (!(dims.w > 0 && dims.d > 0 && dims.h > 0)) {
    throw std::invalid_argument("box dimensions must be strictly positive");
  }
  return {snap_extent(dims.w, resolution), snap_extent(dims.d, resolution),
          snap_extent(dims.h, resolution)};
}

inline bool fits(const GridDims& g, const GridSpec& spec) noexcept {
  return g.w <= spec.nx && g.d <= spec.ny && g.h <= spec.nz;
}

inline bool fits_some_orientation(const GridDims& g, const GridSpec& spec) {
  for (int o = 0; o < Orientation::kCount; ++o) {
    if (fits(Orientation{o}.apply(g), spec)) return true;
  }
  return false;
}

/// Snapped dimensions of an item that fits the bin in at least one
/// orientation. Throws ItemRejected otherwise.
inline GridDims snap_dims(const BoxDims& dims, const GridSpec& spec) {
  const GridDims g = snap_extents(dims, spec.resolution);
  if (!fits_some_orientation(g, spec)) {
    throw ItemRejected("item " + std::to_string(g.w) + "x" + std::to_string(g.d) + "x" +
                       std::to_string(g.h) + " cells exceeds the " + std::to_string(spec.nx) +
                       "x" + std::to_string(spec.ny) + "x" + std::to_string(spec.nz) +
                       " bin in every orientation");
  }
  return g;
}

/// All orientations in index order. With dedup, only the first orientation
/// producing each distinct dims triple is kept.
inline std::vector<OrientedDims> orientations_of(const GridDims& dims, bool dedup) {
  std::vector<OrientedDims> out;
  out.reserve(Orientation::kCount);
  for (int o = 0; o < Orientation::kCount; ++o) {
    const GridDims g = Orientation{o}.apply(dims);
    if (dedup && std::any_of(out.begin(), out.end(),
                             [&](const OrientedDims& e) { return e.dims == g; })) {
      continue;
    }
    out.push_back({Orientation{o}, g});
  }
  return out;
}

/// Maximum height over the footprint-sized window anchored at `anchor`.
inline int window_max(const Heightmap& hm, Cell anchor, Footprint fp) {
  if (!hm.contains(anchor, fp)) {
    throw BoundaryError("window " + std::to_string(fp.w) + "x" + std::to_string(fp.d) + " at (" +
                        std::to_string(anchor.x) + "," + std::to_string(anchor.y) +
                        ") exits the heightmap");
  }
  int m = 0;
  for (int y = anchor.y; y < anchor.y + fp.d; ++y) {
    for (int x = anchor.x; x < anchor.x + fp.w; ++x) m = std::max(m, hm(x, y));
  }
  return m;
}

/**
 * Drops the box onto the heightmap. It rests on the window maximum and every
 * footprint cell becomes rest + gd.h. Returns the rest height.
 */
inline int place_box(Heightmap& hm, Cell anchor, GridDims gd, int nz) {
  const int rest = window_max(hm, anchor, gd.footprint());
  if (rest + gd.h > nz) {
    throw PlacementRejected("placement at (" + std::to_string(anchor.x) + "," +
                            std::to_string(anchor.y) + ") reaches " +
                            std::to_string(rest + gd.h) + " > bin height " + std::to_string(nz));
  }
  for (int y = anchor.y; y < anchor.y + gd.d; ++y) {
    for (int x = anchor.x; x < anchor.x + gd.w; ++x) hm(x, y) = rest + gd.h;
  }
  return rest;
}

namespace detail {

// Sliding maximum over a 1D sequence; out[i] = max(in[i .. i+width)).
template <typename Get, typename Put>
void sliding_max_1d(int n, int width, Get get, Put put) {
  std::deque<int> q;
  for (int i = 0; i < n; ++i) {
    while (!q.empty() && get(q.back()) <= get(i)) q.pop_back();
    q.push_back(i);
    if (q.front() <= i - width) q.pop_front();
    if (i >= width - 1) put(i - width + 1, get(q.front()));
  }
}

}  // namespace detail

/// Window maxima for every in-bounds anchor: out(x,y) == window_max(hm,{x,y},fp).
/// Result is (nx-w+1) x (ny-d+1); empty when the footprint does not fit.
template <typename G>
G sliding_window_max(const G& g, Footprint fp) {
  if (fp.w < 1 || fp.d < 1 || fp.w > g.nx() || fp.d > g.ny()) return G{};
  const int ax = g.nx() - fp.w + 1;
  const int ay = g.ny() - fp.d + 1;
  G rows(ax, g.ny());
  for (int y = 0; y < g.ny(); ++y) {
    detail::sliding_max_1d(
        g.nx(), fp.w, [&](int i) { return g(i, y); }, [&](int i, auto v) { rows(i, y) = v; });
  }
  G out(ax, ay);
  for (int x = 0; x < ax; ++x) {
    detail::sliding_max_1d(
        g.ny(), fp.d, [&](int j) { return rows(x, j); }, [&](int j, auto v) { out(x, j) = v; });
  }
  return out;
}

}  // namespace packbench

#endif  // PACKBENCH_GEOMETRY_HPP
