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
 * @file env.hpp
 * @brief Online packing episode: one visible item, masked (orientation,
 *        position) actions, utilization and wasted-space rewards.
 *
 * A step runs, in order:
 *   1. trapped-gap accounting on the pre-placement heightmap,
 *   2. the heightmap update,
 *   3. reward r_v - r_waste, both as fractions of the bin volume,
 *   4. exposure of the next item,
 *   5. termination when the sequence is exhausted or the next item has no
 *      accepted anchor in any orientation.
 *
 * Rewards keep their integer voxel numerators so that episode sums can be
 * checked exactly.
 */

#ifndef PACKBENCH_ENV_HPP
#define PACKBENCH_ENV_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "packbench/errors.hpp"
#include "packbench/geometry.hpp"
#include "packbench/grid.hpp"
#include "packbench/oracle.hpp"
#include "packbench/stability.hpp"

namespace packbench {

enum class Termination { None, SequenceExhausted, CannotPack, RejectedAction, Fall, AgentError };

inline const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::None: return "none";
    case Termination::SequenceExhausted: return "sequence_exhausted";
    case Termination::CannotPack: return "cannot_pack";
    case Termination::RejectedAction: return "rejected_action";
    case Termination::Fall: return "fall";
    case Termination::AgentError: return "agent_error";
  }
  return "unknown";
}

struct EnvConfig {
  GridSpec spec;
  CheckMode checker = CheckMode::ConvexHullAlpha;
  double gamma = 1.0;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct Action {
  Orientation orientation;
  Cell position;

  friend bool operator==(const Action&, const Action&) = default;
};

struct RewardBreakdown {
  std::int64_t volume_voxels = 0;
  std::int64_t waste_voxels = 0;
  std::int64_t bin_voxels = 1;
  double r_v = 0.0;
  double r_waste = 0.0;
  double total = 0.0;
};

/// Reward of a placement from its voxel counts, alpha = beta = 1.
inline RewardBreakdown make_reward(std::int64_t volume, std::int64_t waste, std::int64_t bin) {
  RewardBreakdown r;
  r.volume_voxels = volume;
  r.waste_voxels = waste;
  r.bin_voxels = bin;
  r.r_v = static_cast<double>(volume) / static_cast<double>(bin);
  r.r_waste = static_cast<double>(waste) / static_cast<double>(bin);
  r.total = static_cast<double>(volume - waste) / static_cast<double>(bin);
  return r;
}

struct ObservationTag {};
using ObservationChannel = Grid<double, ObservationTag>;

/// Channel 0: heightmap in voxels. Channels 1-3: the upcoming item's w, d, h
/// in meters, constant over the grid.
struct Observation {
  std::array<ObservationChannel, 4> channels;
};

struct StepResult {
  RewardBreakdown reward;
  bool done = false;
};

struct EnvState {
  EnvConfig config;
  std::vector<BoxDims> items;
  std::uint64_t seed = 0;
  /// Index of the upcoming item.
  std::size_t step = 0;
  Heightmap heightmap;
  EmptyMap empty_map;
  std::int64_t placed_voxels = 0;
  std::int64_t wasted_voxels = 0;
  bool done = false;
  Termination reason = Termination::None;
  std::vector<PlacedBox> placed;
  /// Snapped dims of the upcoming item (unoriented).
  GridDims item_cells;
  /// Acceptance maps of the upcoming item, one per orientation.
  std::array<StableActionMap, Orientation::kCount> maps;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

class PackingEnv {
 public:
  explicit PackingEnv(EnvConfig config) { state_.config = config; }

  const EnvConfig& config() const noexcept { return state_.config; }
  const EnvState& state() const noexcept { return state_; }
  const GridSpec& spec() const noexcept { return state_.config.spec; }
  bool done() const noexcept { return state_.done; }

  /// Starts an episode over `items`. An empty sequence is an error.
  const EnvState& reset(std::span<const BoxDims> items, std::uint64_t seed = 0) {
    if (items.empty()) throw std::invalid_argument("reset with an empty item sequence");
    const GridSpec& s = spec();
    EnvState next;
    next.config = state_.config;
    next.items.assign(items.begin(), items.end());
    next.seed = seed;
    next.heightmap = Heightmap(s.nx, s.ny, 0);
    next.empty_map = EmptyMap(s.nx, s.ny, 0);
    state_ = std::move(next);
    expose_item();
    return state_;
  }

  /// Applies an action. Throws RejectedAction, leaving the state unchanged,
  /// when the episode is over or the action is not accepted by the checker.
  StepResult step(const Action& a) {
    validate(a);
    const GridSpec& s = spec();
    const GridDims gd = oriented_dims(a.orientation);
    const std::int64_t waste = update_empty_map(state_.empty_map, state_.heightmap, a.position, gd);
    const int rest = place_box(state_.heightmap, a.position, gd, s.nz);
    state_.placed.push_back({a.position, gd, rest});
    state_.placed_voxels += gd.volume();
    state_.wasted_voxels += waste;
    StepResult r;
    r.reward = make_reward(gd.volume(), waste, s.volume_voxels());
    ++state_.step;
    expose_item();
    r.done = state_.done;
    return r;
  }

  /// Ends the episode from outside (e.g. a fall or an agent failure).
  void terminate(Termination why) {
    state_.done = true;
    state_.reason = why;
  }

  bool is_valid(const Action& a) const noexcept {
    if (state_.done) return false;
    if (a.orientation.index < 0 || a.orientation.index >= Orientation::kCount) return false;
    const StableActionMap& m = state_.maps[static_cast<std::size_t>(a.orientation.index)];
    return m.in_bounds(a.position.x, a.position.y) && m[a.position] != 0;
  }

  Observation observation() const {
    if (state_.done) throw Error("observation requested on a finished episode");
    const GridSpec& s = spec();
    const BoxDims& item = state_.items[state_.step];
    Observation o;
    o.channels[0] = ObservationChannel(s.nx, s.ny);
    for (int y = 0; y < s.ny; ++y) {
      for (int x = 0; x < s.nx; ++x) o.channels[0](x, y) = state_.heightmap(x, y);
    }
    o.channels[1] = ObservationChannel(s.nx, s.ny, item.w);
    o.channels[2] = ObservationChannel(s.nx, s.ny, item.d);
    o.channels[3] = ObservationChannel(s.nx, s.ny, item.h);
    return o;
  }

  /// Bit o set iff orientation o has at least one accepted anchor.
  std::uint8_t orientation_mask() const {
    std::uint8_t mask = 0;
    if (state_.done) return mask;
    for (int o = 0; o < Orientation::kCount; ++o) {
      if (count_true(state_.maps[static_cast<std::size_t>(o)]) > 0) mask |= std::uint8_t(1u << o);
    }
    return mask;
  }

  const StableActionMap& stable_map(Orientation o) const {
    return state_.maps.at(static_cast<std::size_t>(o.index));
  }

  GridDims oriented_dims(Orientation o) const { return o.apply(state_.item_cells); }

  const BoxDims& upcoming_item() const { return state_.items.at(state_.step); }

  double utilization() const noexcept {
    return static_cast<double>(state_.placed_voxels) /
           static_cast<double>(spec().volume_voxels());
  }

 private:
  void validate(const Action& a) const {
    if (state_.done) throw RejectedAction("episode is finished");
    if (a.orientation.index < 0 || a.orientation.index >= Orientation::kCount) {
      throw RejectedAction("orientation index " + std::to_string(a.orientation.index) +
                           " out of range");
    }
    const StableActionMap& m = state_.maps[static_cast<std::size_t>(a.orientation.index)];
    if (!m.in_bounds(a.position.x, a.position.y)) {
      throw RejectedAction("anchor (" + std::to_string(a.position.x) + "," +
                           std::to_string(a.position.y) + ") outside the grid");
    }
    if (m[a.position] == 0) {
      throw RejectedAction("anchor (" + std::to_string(a.position.x) + "," +
                           std::to_string(a.position.y) + ") in orientation " +
                           std::to_string(a.orientation.index) + " is not accepted by " +
                           to_string(state_.config.checker));
    }
  }

  void expose_item() {
    const GridSpec& s = spec();
    if (state_.step >= state_.items.size()) {
      state_.done = true;
      state_.reason = Termination::SequenceExhausted;
      for (auto& m : state_.maps) m = StableActionMap(s.nx, s.ny, 0);
      return;
    }
    state_.item_cells = snap_extents(state_.items[state_.step], s.resolution);
    bool any = false;
    for (int o = 0; o < Orientation::kCount; ++o) {
      const GridDims gd = oriented_dims(Orientation{o});
      auto& slot = state_.maps[static_cast<std::size_t>(o)];
      // Orientations with equal dims share a map.
      int twin = -1;
      for (int p = 0; p < o && twin < 0; ++p) {
        if (oriented_dims(Orientation{p}) == gd) twin = p;
      }
      if (twin >= 0) {
        slot = state_.maps[static_cast<std::size_t>(twin)];
      } else {
        slot = stable_action_map(state_.heightmap, state_.empty_map, gd, s.nz,
                                 state_.config.checker);
      }
      any = any || count_true(slot) > 0;
    }
    if (!any) {
      state_.done = true;
      state_.reason = Termination::CannotPack;
    }
  }

  EnvState state_;
};

/// Summary of one finished episode.
struct EpisodeResult {
  double utilization = 0.0;
  std::size_t items_placed = 0;
  std::size_t items_total = 0;
  Termination reason = Termination::None;
  std::string detail;
  double wasted_fraction = 0.0;
  std::vector<RewardBreakdown> rewards;
  double discounted_return = 0.0;
  /// Population standard deviation of the sequence's item volumes, m^3.
  double volume_std = 0.0;
  std::size_t falls = 0;
};

}  // namespace packbench

#endif  // PACKBENCH_ENV_HPP
