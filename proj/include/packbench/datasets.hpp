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
 * @file datasets.hpp
 * @brief Item sequences: random (RS) and guillotine-cut (CUT1, CUT2), and the
 *        PBSEQ v1 JSON-lines file format.
 *
 * PBSEQ v1 file layout:
 *
 *     {"schema":"PBSEQ v1","kind":"rs","seed":7,"bin":[0.6,0.6,0.6],
 *      "resolution":0.005,"count":3,"min":0.03,"max":0.3}
 *     {"w":0.155,"d":0.05,"h":0.2}
 *     ...
 *
 * CUT items additionally carry "pos":[x,y,z], the cell position of the
 * piece in the cut layout, so the perfect packing can be replayed.
 */

#ifndef PACKBENCH_DATASETS_HPP
#define PACKBENCH_DATASETS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "packbench/errors.hpp"
#include "packbench/geometry.hpp"
#include "packbench/random.hpp"

namespace packbench {

enum class SequenceKind { RS, CUT1, CUT2 };

inline const char* to_string(SequenceKind k) noexcept {
  switch (k) {
    case SequenceKind::RS: return "rs";
    case SequenceKind::CUT1: return "cut1";
    case SequenceKind::CUT2: return "cut2";
  }
  return "?";
}

inline std::optional<SequenceKind> parse_kind(const std::string& s) {
  if (s == "rs") return SequenceKind::RS;
  if (s == "cut1") return SequenceKind::CUT1;
  if (s == "cut2") return SequenceKind::CUT2;
  return std::nullopt;
}

struct SequenceSpec {
  SequenceKind kind = SequenceKind::RS;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  double min = 0.03;
  double max = 0.3;
  GridSpec bin;
};

/// Where a CUT piece sits in the layout it was cut from, in cells.
struct LayoutSlot {
  Cell anchor;
  int z = 0;
  GridDims dims;

  friend bool operator==(const LayoutSlot&, const LayoutSlot&) = default;
};

struct ItemSequence {
  SequenceKind kind = SequenceKind::RS;
  std::uint64_t seed = 0;
  double min = 0.0;
  double max = 0.0;
  GridSpec bin;
  std::vector<BoxDims> items;
  /// Parallel to items for CUT kinds, empty for RS.
  std::vector<LayoutSlot> layout;

  friend bool operator==(const ItemSequence&, const ItemSequence&) = default;
};

inline void validate_bounds(const SequenceSpec& s) {
  const double largest = std::max({s.bin.bin_w, s.bin.bin_d, s.bin.bin_h});
  if (!(s.min > 0.0) || !(s.min <= s.max) || !(s.max <= largest + 1e-12)) {
    throw std::invalid_argument("dimension bounds must satisfy 0 < min <= max <= " +
                                std::to_string(largest));
  }
}

/// Uniform i.i.d. dims in [min, max], snapped up to the cell grid. Draws
/// that fit the bin in no orientation are redrawn.
inline ItemSequence gen_rs(const SequenceSpec& spec) {
  if (spec.kind != SequenceKind::RS) throw std::invalid_argument("gen_rs needs kind rs");
  validate_bounds(spec);
  ItemSequence seq{spec.kind, spec.seed, spec.min, spec.max, spec.bin, {}, {}};
  seq.items.reserve(spec.count);
  Rng rng(spec.seed);
  const double res = spec.bin.resolution;
  const auto draw = [&] { return snap_extent(uniform_real(rng, spec.min, spec.max), res) * res; };
  for (std::size_t attempts = 0; seq.items.size() < spec.count; ++attempts) {
    if (attempts > 1000 * (spec.count + 1)) {
      throw std::invalid_argument("bounds produce items that do not fit the bin");
    }
    BoxDims b;
    b.w = draw();
    b.d = draw();
    b.h = draw();
    if (fits_some_orientation(snap_extents(b, res), spec.bin)) seq.items.push_back(b);
  }
  return seq;
}

namespace detail {

// n can be written as a sum of parts each within [lo, hi].
inline bool partitionable(int n, int lo, int hi) {
  for (int k = 1; k * lo <= n; ++k) {
    if (n <= k * hi) return true;
  }
  return false;
}

}  // namespace detail

/**
 * Guillotine-cuts the whole bin until every piece lies within the bounds.
 * A piece with some side above max is split across one such side (chosen
 * at random) at a random position that keeps both halves partitionable.
 *
 * CUT1 emits pieces bottom-up (by z, then y, then x). CUT2 emits a random
 * order in which every piece comes after all pieces directly beneath it.
 * Either order can be replayed at the recorded anchors to fill the bin.
 */
inline ItemSequence gen_cut(const SequenceSpec& spec) {
  if (spec.kind == SequenceKind::RS) throw std::invalid_argument("gen_cut needs kind cut1/cut2");
  validate_bounds(spec);
  const double res = spec.bin.resolution;
  const int lo = snap_extent(spec.min, res);
  const int hi = static_cast<int>(std::floor(spec.max / res + 1e-9));
  const std::array<int, 3> bin{spec.bin.nx, spec.bin.ny, spec.bin.nz};
  if (hi < lo) throw std::invalid_argument("dimension bounds admit no whole-cell size");
  for (int n : bin) {
    if (!detail::partitionable(n, lo, hi)) {
      throw std::invalid_argument("bin side of " + std::to_string(n) +
                                  " cells cannot be cut into pieces within [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "] cells");
    }
  }

  struct Piece {
    std::array<int, 3> pos;
    std::array<int, 3> size;
  };
  Rng rng(spec.seed);
  std::vector<Piece> done;
  std::vector<Piece> stack{{{0, 0, 0}, bin}};
  while (!stack.empty()) {
    Piece p = stack.back();
    stack.pop_back();
    std::vector<int> axes;
    for (int a = 0; a < 3; ++a) {
      if (p.size[a] > hi) axes.push_back(a);
    }
    if (axes.empty()) {
      done.push_back(p);
      continue;
    }
    const int axis = axes[uniform_index(rng, axes.size())];
    const int n = p.size[axis];
    std::vector<int> cuts;
    for (int c = lo; c <= n - lo; ++c) {
      if (detail::partitionable(c, lo, hi) && detail::partitionable(n - c, lo, hi)) {
        cuts.push_back(c);
      }
    }
    // partitionable(n) with n > hi guarantees some valid cut exists.
    const int c = cuts[uniform_index(rng, cuts.size())];
    Piece a = p;
    Piece b = p;
    a.size[axis] = c;
    b.pos[axis] += c;
    b.size[axis] = n - c;
    stack.push_back(b);
    stack.push_back(a);
  }

  std::vector<std::size_t> order(done.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto below = [&](const Piece& lower, const Piece& upper) {
    return lower.pos[2] + lower.size[2] == upper.pos[2] &&
           std::max(lower.pos[0], upper.pos[0]) <
               std::min(lower.pos[0] + lower.size[0], upper.pos[0] + upper.size[0]) &&
           std::max(lower.pos[1], upper.pos[1]) <
               std::min(lower.pos[1] + lower.size[1], upper.pos[1] + upper.size[1]);
  };
  if (spec.kind == SequenceKind::CUT1) {
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      const auto& a = done[i].pos;
      const auto& b = done[j].pos;
      return std::tie(a[2], a[1], a[0]) < std::tie(b[2], b[1], b[0]);
    });
  } else {
    // Kahn's algorithm with a random pick among ready pieces.
    const std::size_t n = done.size();
    std::vector<int> pending(n, 0);
    std::vector<std::vector<std::size_t>> above(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && below(done[i], done[j])) {
          above[i].push_back(j);
          ++pending[j];
        }
      }
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
      if (pending[i] == 0) ready.push_back(i);
    }
    order.clear();
    while (!ready.empty()) {
      const std::size_t k = uniform_index(rng, ready.size());
      const std::size_t i = ready[k];
      ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(k));
      order.push_back(i);
      for (std::size_t j : above[i]) {
        if (--pending[j] == 0) ready.push_back(j);
      }
    }
  }

  ItemSequence seq{spec.kind, spec.seed, spec.min, spec.max, spec.bin, {}, {}};
  for (std::size_t i : order) {
    const Piece& p = done[i];
    seq.items.push_back({p.size[0] * res, p.size[1] * res, p.size[2] * res});
    seq.layout.push_back({{p.pos[0], p.pos[1]}, p.pos[2], {p.size[0], p.size[1], p.size[2]}});
  }
  return seq;
}

inline ItemSequence generate(const SequenceSpec& spec) {
  return spec.kind == SequenceKind::RS ? gen_rs(spec) : gen_cut(spec);
}

inline constexpr const char* kSequenceSchema = "PBSEQ v1";

inline void save_sequence(const ItemSequence& seq, std::ostream& out) {
  nlohmann::ordered_json header;
  header["schema"] = kSequenceSchema;
  header["kind"] = to_string(seq.kind);
  header["seed"] = seq.seed;
  header["bin"] = {seq.bin.bin_w, seq.bin.bin_d, seq.bin.bin_h};
  header["resolution"] = seq.bin.resolution;
  header["count"] = seq.items.size();
  header["min"] = seq.min;
  header["max"] = seq.max;
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < seq.items.size(); ++i) {
    nlohmann::ordered_json item;
    item["w"] = seq.items[i].w;
    item["d"] = seq.items[i].d;
    item["h"] = seq.items[i].h;
    if (!seq.layout.empty()) {
      const LayoutSlot& s = seq.layout[i];
      item["pos"] = {s.anchor.x, s.anchor.y, s.z};
    }
    out << item.dump() << '\n';
  }
}

inline void save_sequence(const ItemSequence& seq, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  save_sequence(seq, out);
}

/**
 * Reads a PBSEQ v1 stream. Errors carry the offending line number; a header
 * whose kind differs from `expected` raises KindMismatch.
 */
inline ItemSequence load_sequence(std::istream& in,
                                  std::optional<SequenceKind> expected = std::nullopt) {
  using nlohmann::json;
  std::string line;
  std::size_t lineno = 0;
  const auto parse = [&](std::size_t n) {
    try {
      return json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(n, std::string("malformed JSON: ") + e.what());
    }
  };
  if (!std::getline(in, line)) throw ParseError(1, "missing PBSEQ v1 header");
  ++lineno;
  const json h = parse(lineno);
  ItemSequence seq;
  std::size_t count = 0;
  try {
    if (!h.is_object() || h.value("schema", "") != kSequenceSchema) {
      throw ParseError(lineno, "header schema is not \"PBSEQ v1\"");
    }
    const auto kind = parse_kind(h.at("kind").get<std::string>());
    if (!kind) throw ParseError(lineno, "unknown kind " + h.at("kind").dump());
    if (expected && *kind != *expected) {
      throw KindMismatch(lineno, std::string("expected kind ") + to_string(*expected) +
                                     ", header says " + to_string(*kind));
    }
    seq.kind = *kind;
    seq.seed = h.at("seed").get<std::uint64_t>();
    const auto& bin = h.at("bin");
    if (!bin.is_array() || bin.size() != 3) throw ParseError(lineno, "bin must be [W,D,H]");
    seq.bin = GridSpec::make(bin[0].get<double>(), bin[1].get<double>(), bin[2].get<double>(),
                             h.at("resolution").get<double>());
    count = h.at("count").get<std::size_t>();
    seq.min = h.value("min", 0.0);
    seq.max = h.value("max", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(lineno, std::string("bad header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, std::string("bad header: ") + e.what());
  }

  while (seq.items.size() < count && std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse(lineno);
    try {
      BoxDims b{j.at("w").get<double>(), j.at("d").get<double>(), j.at("h").get<double>()};
      if (!(b.w > 0 && b.d > 0 && b.h > 0)) throw ParseError(lineno, "non-positive dimension");
      seq.items.push_back(b);
      if (j.contains("pos")) {
        const auto& p = j.at("pos");
        if (!p.is_array() || p.size() != 3) throw ParseError(lineno, "pos must be [x,y,z]");
        const double res = seq.bin.resolution;
        seq.layout.push_back({{p[0].get<int>(), p[1].get<int>()},
                              p[2].get<int>(),
                              {snap_extent(b.w, res), snap_extent(b.d, res),
                               snap_extent(b.h, res)}});
      }
    } catch (const json::exception& e) {
      throw ParseError(lineno, std::string("bad item: ") + e.what());
    }
  }
  if (seq.items.size() < count) {
    throw ParseError(lineno + 1, "truncated: header count is " + std::to_string(count) +
                                     " but only " + std::to_string(seq.items.size()) +
                                     " items present");
  }
  if (!seq.layout.empty() && seq.layout.size() != seq.items.size()) {
    throw ParseError(lineno, "pos present on some items only");
  }
  return seq;
}

inline ItemSequence load_sequence(const std::string& path,
                                  std::optional<SequenceKind> expected = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_sequence(in, expected);
}

/// Population standard deviation of item volumes, m^3.
inline double volume_std(const std::vector<BoxDims>& items) {
  if (items.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& b : items) mean += b.volume();
  mean /= static_cast<double>(items.size());
  double var = 0.0;
  for (const auto& b : items) var += (b.volume() - mean) * (b.volume() - mean);
  return std::sqrt(var / static_cast<double>(items.size()));
}

}  // namespace packbench

#endif  // PACKBENCH_DATASETS_HPP
