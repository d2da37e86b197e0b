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

#ifndef PACKBENCH_POLICIES_HPP
#define PACKBENCH_POLICIES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "packbench/env.hpp"
#include "packbench/geometry.hpp"
#include "packbench/random.hpp"

namespace packbench {

enum class PolicyKind { RandomStable, DBLF, GreedyMinWaste, External };

inline const char* to_string(PolicyKind p) noexcept {
  switch (p) {
    case PolicyKind::RandomStable: return "random";
    case PolicyKind::DBLF: return "dblf";
    case PolicyKind::GreedyMinWaste: return "greedy";
    case PolicyKind::External: return "external";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy(const std::string& s) {
  if (s == "random") return PolicyKind::RandomStable;
  if (s == "dblf") return PolicyKind::DBLF;
  if (s == "greedy") return PolicyKind::GreedyMinWaste;
  if (s == "external") return PolicyKind::External;
  return std::nullopt;
}

/// Uniform over every accepted (orientation, x, y) triple.
inline std::optional<Action> random_stable(const PackingEnv& env, Rng& rng) {
  if (env.done()) return std::nullopt;
  std::uint64_t total = 0;
  for (int o = 0; o < Orientation::kCount; ++o) {
    total += static_cast<std::uint64_t>(count_true(env.stable_map(Orientation{o})));
  }
  if (total == 0) return std::nullopt;
  std::uint64_t k = uniform_index(rng, total);
  for (int o = 0; o < Orientation::kCount; ++o) {
    const StableActionMap& m = env.stable_map(Orientation{o});
    for (int y = 0; y < m.ny(); ++y) {
      for (int x = 0; x < m.nx(); ++x) {
        if (m(x, y) && k-- == 0) return Action{Orientation{o}, {x, y}};
      }
    }
  }
  return std::nullopt;
}

namespace detail {

// Visits every accepted action with its rest height and trapped-gap volume.
template <typename Visit>
void for_each_accepted(const PackingEnv& env, Visit visit) {
  const Heightmap& hm = env.state().heightmap;
  const int nx = hm.nx();
  // Summed-area table for window sums.
  std::vector<std::int64_t> sat(static_cast<std::size_t>(nx + 1) * (hm.ny() + 1), 0);
  const auto S = [&](int x, int y) -> std::int64_t& {
    return sat[static_cast<std::size_t>(y) * (nx + 1) + x];
  };
  for (int y = 0; y < hm.ny(); ++y) {
    for (int x = 0; x < nx; ++x) S(x + 1, y + 1) = hm(x, y) + S(x, y + 1) + S(x + 1, y) - S(x, y);
  }
  for (int o = 0; o < Orientation::kCount; ++o) {
    const StableActionMap& m = env.stable_map(Orientation{o});
    if (count_true(m) == 0) continue;
    const GridDims gd = env.oriented_dims(Orientation{o});
    const Heightmap wmax = sliding_window_max(hm, gd.footprint());
    for (int y = 0; y < wmax.ny(); ++y) {
      for (int x = 0; x < wmax.nx(); ++x) {
        if (!m(x, y)) continue;
        const std::int64_t rest = wmax(x, y);
        const std::int64_t sum =
            S(x + gd.w, y + gd.d) - S(x, y + gd.d) - S(x + gd.w, y) + S(x, y);
        visit(Action{Orientation{o}, {x, y}}, static_cast<int>(rest),
              rest * gd.w * gd.d - sum);
      }
    }
  }
}

}  // namespace detail

/// Deepest-bottom-left among accepted actions: minimizes
/// (rest height, y, x, orientation index).
inline std::optional<Action> greedy_dblf(const PackingEnv& env) {
  if (env.done()) return std::nullopt;
  std::optional<Action> best;
  std::tuple<int, int, int, int> key{};
  detail::for_each_accepted(env, [&](const Action& a, int rest, std::int64_t) {
    const std::tuple<int, int, int, int> k{rest, a.position.y, a.position.x,
                                           a.orientation.index};
    if (!best || k < key) {
      best = a;
      key = k;
    }
  });
  return best;
}

/// Maximizes the one-step reward r_v - r_waste. The item volume is the same
/// in every orientation, so this is the action trapping the fewest gap
/// voxels; ties fall back to the DBLF order.
inline std::optional<Action> greedy_min_waste(const PackingEnv& env) {
  if (env.done()) return std::nullopt;
  std::optional<Action> best;
  std::tuple<std::int64_t, int, int, int, int> key{};
  detail::for_each_accepted(env, [&](const Action& a, int rest, std::int64_t waste) {
    const std::tuple<std::int64_t, int, int, int, int> k{waste, rest, a.position.y,
                                                         a.position.x, a.orientation.index};
    if (!best || k < key) {
      best = a;
      key = k;
    }
  });
  return best;
}

/// Rest height and trapped-gap voxels an action would produce.
inline std::pair<int, std::int64_t> preview_placement(const PackingEnv& env, const Action& a) {
  const Heightmap& hm = env.state().heightmap;
  const GridDims gd = env.oriented_dims(a.orientation);
  const int rest = window_max(hm, a.position, gd.footprint());
  std::int64_t waste = 0;
  for (int y = a.position.y; y < a.position.y + gd.d; ++y) {
    for (int x = a.position.x; x < a.position.x + gd.w; ++x) waste += rest - hm(x, y);
  }
  return {rest, waste};
}

}  // namespace packbench

#endif  // PACKBENCH_POLICIES_HPP
