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


#include <gtest/gtest.h>

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "packbench.hpp"

namespace pb = packbench;
using pb::Action;
using pb::BoxDims;
using pb::EnvConfig;
using pb::GridSpec;
using pb::PackingEnv;

namespace {

constexpr double kRes = 0.005;

BoxDims cells(int w, int d, int h) { return {w * kRes, d * kRes, h * kRes}; }

struct Candidate {
  Action action;
  int rest;
  std::int64_t waste;
};

// Every accepted action with rest height and gap volume, by direct scan.
std::vector<Candidate> enumerate(const PackingEnv& env) {
  std::vector<Candidate> out;
  const auto& hm = env.state().heightmap;
  for (int o = 0; o < 6; ++o) {
    const auto gd = env.oriented_dims({o});
    const auto& m = env.stable_map({o});
    for (int y = 0; y < hm.ny(); ++y) {
      for (int x = 0; x < hm.nx(); ++x) {
        if (!m(x, y)) continue;
        int rest = 0;
        for (int j = y; j < y + gd.d; ++j) {
          for (int i = x; i < x + gd.w; ++i) rest = std::max(rest, hm(i, j));
        }
        std::int64_t waste = 0;
        for (int j = y; j < y + gd.d; ++j) {
          for (int i = x; i < x + gd.w; ++i) waste += rest - hm(i, j);
        }
        out.push_back({{{o}, {x, y}}, rest, waste});
      }
    }
  }
  return out;
}

// Desk-sized env advanced by `steps` random-stable placements.
PackingEnv desk_env(std::uint64_t seed, int steps) {
  const GridSpec spec = GridSpec::cells(20, 20, 20, kRes);
  const auto seq = pb::gen_rs({pb::SequenceKind::RS, seed, 60, 2 * kRes, 8 * kRes, spec});
  PackingEnv env(EnvConfig{spec});
  env.reset(seq.items, seed);
  pb::Rng rng(seed);
  for (int i = 0; i < steps && !env.done(); ++i) env.step(*pb::random_stable(env, rng));
  return env;
}

}  // namespace

TEST(RandomStableTest, EmptyBinCoversAllTriples) {
  PackingEnv env(EnvConfig{GridSpec::cells(6, 6, 6, kRes)});
  const std::vector<BoxDims> items{cells(2, 3, 4)};
  env.reset(items);
  const std::size_t total = enumerate(env).size();
  pb::Rng rng(1);
  std::map<std::tuple<int, int, int>, int> seen;
  for (int i = 0; i < 20000; ++i) {
    const auto a = pb::random_stable(env, rng);
    ASSERT_TRUE(a && env.is_valid(*a));
    ++seen[{a->orientation.index, a->position.x, a->position.y}];
  }
  EXPECT_EQ(seen.size(), total);
  const double expect = 20000.0 / static_cast<double>(total);
  for (const auto& [k, n] : seen) EXPECT_NEAR(n, expect, 5 * std::sqrt(expect));
}

TEST(RandomStableTest, SingleAnchorChosen) {
  PackingEnv env(EnvConfig{GridSpec::cells(4, 4, 4, kRes)});
  const std::vector<BoxDims> items{cells(4, 4, 4)};
  env.reset(items);
  pb::Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto a = pb::random_stable(env, rng);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->position, (pb::Cell{0, 0}));
  }
}

TEST(RandomStableTest, SeededStreamsRepeat) {
  auto stream = [] {
    PackingEnv env = desk_env(4, 0);
    pb::Rng rng(77);
    std::vector<Action> out;
    while (!env.done()) {
      out.push_back(*pb::random_stable(env, rng));
      env.step(out.back());
    }
    return out;
  };
  EXPECT_EQ(stream(), stream());
}

TEST(RandomStableTest, NoActionOnFinishedEpisode) {
  PackingEnv env(EnvConfig{GridSpec::cells(4, 4, 4, kRes)});
  const std::vector<BoxDims> items{cells(4, 4, 4)};
  env.reset(items);
  env.step({{0}, {0, 0}});
  pb::Rng rng(0);
  EXPECT_FALSE(pb::random_stable(env, rng));
  EXPECT_FALSE(pb::greedy_dblf(env));
  EXPECT_FALSE(pb::greedy_min_waste(env));
}

TEST(DblfTest, EmptyBinPicksOrigin) {
  PackingEnv env(EnvConfig{GridSpec::cells(20, 20, 20, kRes)});
  const std::vector<BoxDims> items{cells(3, 5, 2)};
  env.reset(items);
  const auto a = pb::greedy_dblf(env);
  ASSERT_TRUE(a);
  EXPECT_EQ(*a, (Action{{0}, {0, 0}}));
}

TEST(DblfTest, LowestPocketThenSmallerY) {
  // Unit columns everywhere except two floor cells; a unit cube can only
  // go into those holes (a single column is a point support).
  PackingEnv env(EnvConfig{GridSpec::cells(5, 5, 10, kRes)});
  std::vector<BoxDims> items(23, cells(1, 1, 3));
  items.push_back(cells(1, 1, 1));
  env.reset(items);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      if ((x == 3 && y == 2) || (x == 2 && y == 3)) continue;
      env.step({{0}, {x, y}});
    }
  }
  const auto a = pb::greedy_dblf(env);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->position, (pb::Cell{3, 2}));
  EXPECT_EQ(a->orientation.index, 0);
}

TEST(DblfTest, MatchesBruteForceOrder) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    PackingEnv env = desk_env(seed, static_cast<int>(seed % 12));
    if (env.done()) continue;
    const auto cands = enumerate(env);
    const auto a = pb::greedy_dblf(env);
    ASSERT_EQ(a.has_value(), !cands.empty());
    if (!a) continue;
    const auto best = *std::min_element(cands.begin(), cands.end(), [](const auto& p, const auto& q) {
      return std::make_tuple(p.rest, p.action.position.y, p.action.position.x,
                             p.action.orientation.index) <
             std::make_tuple(q.rest, q.action.position.y, q.action.position.x,
                             q.action.orientation.index);
    });
    EXPECT_EQ(*a, best.action) << "seed " << seed;
    for (const auto& c : cands) EXPECT_LE(best.rest, c.rest);
  }
}

TEST(GreedyTest, PrefersGroundWhenAvailable) {
  PackingEnv env = desk_env(2, 3);
  ASSERT_FALSE(env.done());
  const auto a = pb::greedy_min_waste(env);
  ASSERT_TRUE(a);
  bool ground = false;
  for (const auto& c : enumerate(env)) ground = ground || c.rest == 0;
  if (ground) {
    EXPECT_EQ(pb::preview_placement(env, *a).second, 0);
  }
}

TEST(GreedyTest, SmallerGapWins) {
  // Column heights 10 8 8 10 0 10 9 9 10: a 4-cube can bridge x 0..3
  // (gap 16) or x 5..8 (gap 8); the in-between anchors trap far more.
  PackingEnv env(EnvConfig{GridSpec::cells(9, 4, 20, kRes)});
  const std::vector<BoxDims> items{cells(1, 4, 10), cells(2, 4, 8), cells(1, 4, 10),
                                   cells(1, 4, 10), cells(2, 4, 9), cells(1, 4, 10),
                                   cells(4, 4, 4)};
  env.reset(items);
  for (int x : {0, 1, 3, 5, 6, 8}) env.step({{0}, {x, 0}});
  ASSERT_TRUE(env.is_valid({{0}, {0, 0}}));
  EXPECT_EQ(pb::preview_placement(env, {{0}, {0, 0}}).second, 16);
  const auto a = pb::greedy_min_waste(env);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->position, (pb::Cell{5, 0}));
  EXPECT_EQ(pb::preview_placement(env, *a).second, 8);
  EXPECT_EQ(pb::greedy_dblf(env)->position, (pb::Cell{0, 0}));
}

TEST(GreedyTest, MatchesBruteForceArgmax) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    PackingEnv env = desk_env(seed + 100, 3 + static_cast<int>(seed % 10));
    if (env.done()) continue;
    const auto cands = enumerate(env);
    const auto a = pb::greedy_min_waste(env);
    ASSERT_TRUE(a);
    const std::int64_t vol = env.oriented_dims({0}).volume();
    const auto key = [&](const Candidate& c) {
      // Maximize total reward, then the DBLF order.
      return std::make_tuple(-(vol - c.waste), c.rest, c.action.position.y, c.action.position.x,
                             c.action.orientation.index);
    };
    const auto best = *std::min_element(cands.begin(), cands.end(),
                                        [&](const auto& p, const auto& q) { return key(p) < key(q); });
    EXPECT_EQ(*a, best.action) << "seed " << seed;
  }
}

TEST(GreedyTest, OneStepRewardBeatsRandomOnAverage) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PackingEnv env = desk_env(seed + 200, 6);
    if (env.done()) continue;
    const auto g = pb::greedy_min_waste(env);
    const std::int64_t vol = env.oriented_dims({0}).volume();
    const double greedy = static_cast<double>(vol - pb::preview_placement(env, *g).second);
    pb::Rng rng(seed);
    double sum = 0.0;
    for (int i = 0; i < 200; ++i) {
      sum += static_cast<double>(vol - pb::preview_placement(env, *pb::random_stable(env, rng)).second);
    }
    EXPECT_GE(greedy, sum / 200.0);
  }
}

TEST(PolicyTest, EveryActionAccepted) {
  for (auto kind : {pb::PolicyKind::RandomStable, pb::PolicyKind::DBLF, pb::PolicyKind::GreedyMinWaste}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      PackingEnv env = desk_env(seed + 300, 0);
      pb::Rng rng(seed);
      while (!env.done()) {
        std::optional<Action> a;
        if (kind == pb::PolicyKind::RandomStable) a = pb::random_stable(env, rng);
        if (kind == pb::PolicyKind::DBLF) a = pb::greedy_dblf(env);
        if (kind == pb::PolicyKind::GreedyMinWaste) a = pb::greedy_min_waste(env);
        ASSERT_TRUE(a);
        ASSERT_TRUE(env.is_valid(*a));
        env.step(*a);
      }
    }
  }
}

TEST(PolicyTest, NamesRoundTrip) {
  for (auto k : {pb::PolicyKind::RandomStable, pb::PolicyKind::DBLF, pb::PolicyKind::GreedyMinWaste,
                 pb::PolicyKind::External}) {
    EXPECT_EQ(pb::parse_policy(pb::to_string(k)), k);
  }
  EXPECT_FALSE(pb::parse_policy("best"));
}
