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
 * @file map_io.hpp
 * @brief Plain-text and PGM dumps of grids.
 *
 * PBMAP v1 text format:
 *
 *     PBMAP v1
 *     <nx> <ny>
 *     <ny lines of nx space-separated integers, row y = 0 first>
 *
 * PGM output is binary P5 with maxval 255, one pixel per cell, row y = 0 at
 * the top. Values are scaled linearly from [0, vmax] and clamped.
 */

#ifndef PACKBENCH_MAP_IO_HPP
#define PACKBENCH_MAP_IO_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "packbench/errors.hpp"
#include "packbench/grid.hpp"

namespace packbench {

inline constexpr const char* kMapSchema = "PBMAP v1";

template <typename T, typename Tag>
void write_map_text(const Grid<T, Tag>& g, std::ostream& out) {
  out << kMapSchema << '\n' << g.nx() << ' ' << g.ny() << '\n';
  for (int y = 0; y < g.ny(); ++y) {
    for (int x = 0; x < g.nx(); ++x) {
      if (x) out << ' ';
      out << static_cast<std::int64_t>(g(x, y));
    }
    out << '\n';
  }
}

template <typename G>
G read_map_text(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kMapSchema) {
    throw ParseError(lineno, "missing \"PBMAP v1\" header");
  }
  ++lineno;
  int nx = 0;
  int ny = 0;
  if (!std::getline(in, line)) throw ParseError(lineno, "missing grid size");
  {
    std::istringstream s(line);
    if (!(s >> nx >> ny) || nx < 0 || ny < 0) throw ParseError(lineno, "bad grid size");
  }
  G g(nx, ny);
  for (int y = 0; y < ny; ++y) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(lineno, "truncated grid");
    std::istringstream s(line);
    for (int x = 0; x < nx; ++x) {
      std::int64_t v = 0;
      if (!(s >> v)) throw ParseError(lineno, "row has fewer than " + std::to_string(nx) + " values");
      g(x, y) = static_cast<typename G::value_type>(v);
    }
    std::string extra;
    if (s >> extra) throw ParseError(lineno, "row has more than " + std::to_string(nx) + " values");
  }
  return g;
}

template <typename T, typename Tag>
void write_pgm(const Grid<T, Tag>& g, double vmax, std::ostream& out) {
  out << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  for (T v : g.cells()) {
    const double s = vmax > 0 ? static_cast<double>(v) * 255.0 / vmax : 0.0;
    out.put(static_cast<char>(static_cast<std::uint8_t>(std::clamp(s + 0.5, 0.0, 255.0))));
  }
}

template <typename T, typename Tag>
void write_pgm(const Grid<T, Tag>& g, double vmax, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_pgm(g, vmax, out);
}

}  // namespace packbench

#endif  // PACKBENCH_MAP_IO_HPP
