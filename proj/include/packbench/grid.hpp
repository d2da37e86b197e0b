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

#ifndef PACKBENCH_GRID_HPP
#define PACKBENCH_GRID_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "packbench/errors.hpp"

namespace packbench {

/// Column index in the x/y plane of the bin, in cells.
struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Horizontal extent of a box in cells.
struct Footprint {
  int w = 0;
  int d = 0;

  friend bool operator==(const Footprint&, const Footprint&) = default;
};

/**
 * Dense row-major 2D grid addressed as (x, y), x fastest.
 *
 * The Tag parameter keeps grids with different meanings (heights, trapped
 * gaps, acceptance flags) from being mixed up; it carries no data.
 */
template <typename T, typename Tag>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int nx, int ny, T fill = T{})
      : nx_(nx), ny_(ny), cells_(static_cast<std::size_t>(checked_extent(nx)) *
                                     static_cast<std::size_t>(checked_extent(ny)),
                                 fill) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return cells_.size(); }

  T& operator()(int x, int y) { return cells_[index(x, y)]; }
  const T& operator()(int x, int y) const { return cells_[index(x, y)]; }
  T& operator[](Cell c) { return (*this)(c.x, c.y); }
  const T& operator[](Cell c) const { return (*this)(c.x, c.y); }

  /// Bounds-checked access.
  const T& at(int x, int y) const {
    if (!in_bounds(x, y)) {
      throw BoundaryError("cell (" + std::to_string(x) + "," + std::to_string(y) +
                          ") outside " + std::to_string(nx_) + "x" + std::to_string(ny_) +
                          " grid");
    }
    return (*this)(x, y);
  }

  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < nx_ && y < ny_;
  }

  /// True iff the fp-sized window anchored at c lies inside the grid.
  bool contains(Cell c, Footprint fp) const noexcept {
    return fp.w >= 1 && fp.d >= 1 && c.x >= 0 && c.y >= 0 && c.x + fp.w <= nx_ &&
           c.y + fp.d <= ny_;
  }

  std::span<T> cells() noexcept { return cells_; }
  std::span<const T> cells() const noexcept { return cells_; }

  void fill(T value) { std::fill(cells_.begin(), cells_.end(), value); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static int checked_extent(int n) {
    if (n < 0) throw BoundaryError("negative grid extent");
    return n;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(x);
  }

  int nx_ = 0;
  int ny_ = 0;
  std::vector<T> cells_;
};

/// Copies the fp-sized window anchored at c into a grid of its own.
template <typename G>
G extract_window(const G& g, Cell c, Footprint fp) {
  if (!g.contains(c, fp)) {
    throw BoundaryError("window " + std::to_string(fp.w) + "x" + std::to_string(fp.d) + " at (" +
                        std::to_string(c.x) + "," + std::to_string(c.y) + ") exits " +
                        std::to_string(g.nx()) + "x" + std::to_string(g.ny()) + " grid");
  }
  G out(fp.w, fp.d);
  for (int j = 0; j < fp.d; ++j) {
    for (int i = 0; i < fp.w; ++i) out(i, j) = g(c.x + i, c.y + j);
  }
  return out;
}

struct HeightTag {};
struct EmptyTag {};
struct StableTag {};

/// Top-surface height of every column, in voxels. 0 is bare floor.
using Heightmap = Grid<std::int32_t, HeightTag>;
/// Accumulated trapped-gap height of every column, in voxels.
using EmptyMap = Grid<std::int32_t, EmptyTag>;
/// 1 where the oriented item anchored at that cell is accepted.
using StableActionMap = Grid<std::uint8_t, StableTag>;

}  // namespace packbench

#endif  // PACKBENCH_GRID_HPP
