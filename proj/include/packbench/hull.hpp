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

#ifndef PACKBENCH_HULL_HPP
#define PACKBENCH_HULL_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace packbench {

/// Integer plane point. Support analysis uses half-cell units so that cell
/// centers and footprint centers are both exact.
struct Point2 {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

/// z component of (a - o) x (b - o); positive when o->a->b turns left.
inline std::int64_t cross(Point2 o, Point2 a, Point2 b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Convex polygon, counterclockwise, no collinear vertices.
/// Fewer than three vertices means the hull is a point, a segment or empty.
struct HullPolygon {
  std::vector<Point2> vertices;

  bool degenerate() const noexcept { return vertices.size() < 3; }
};

namespace detail {

// Monotone chain over points already sorted lexicographically and unique.
// Writes the CCW hull into `h` and returns its vertex count.
inline std::size_t chain_sorted(std::span<const Point2> p, std::vector<Point2>& h) {
  if (p.size() < 3) {
    h.assign(p.begin(), p.end());
    return p.size();
  }
  h.resize(2 * p.size());
  std::size_t k = 0;
  for (const Point2& q : p) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], q) <= 0) --k;
    h[k++] = q;
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return k - 1;
}

}  // namespace detail

/// Andrew's monotone chain. Collinear boundary points are dropped.
inline HullPolygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  HullPolygon out;
  detail::chain_sorted(p, out.vertices);
  return out;
}

/// Inside-or-on-boundary test. Degenerate hulls contain nothing.
inline bool center_in_hull(const HullPolygon& hull, Point2 c) noexcept {
  if (hull.degenerate()) return false;
  const auto& v = hull.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (cross(v[i], v[(i + 1) % v.size()], c) < 0) return false;
  }
  return true;
}

}  // namespace packbench

#endif  // PACKBENCH_HULL_HPP
