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

#include <cmath>
#include <limits>
#include <vector>

#include "packbench.hpp"
#include "support/oracles.hpp"

namespace pb = packbench;
using pb::PlacedBox;

TEST(SimplexTest, FeasibleSystem) {
  // x0 + x1 = 2, x0 - x1 = 0 -> x = (1, 1).
  pb::DenseMatrix A(2, 2);
  A(0, 0) = 1, A(0, 1) = 1, A(1, 0) = 1, A(1, 1) = -1;
  const std::vector<double> b{2, 0};
  const auto r = pb::solve_feasibility(A, b);
  ASSERT_EQ(r.status, pb::FeasibilityResult::Status::Feasible);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
}

TEST(SimplexTest, InfeasibleSignPattern) {
  // x0 = -1 has no non-negative solution.
  pb::DenseMatrix A(1, 1);
  A(0, 0) = 1;
  const std::vector<double> b{-1};
  const auto r = pb::solve_feasibility(A, b);
  EXPECT_EQ(r.status, pb::FeasibilityResult::Status::Infeasible);
  EXPECT_GT(r.row_residual[0], 0.5);
}

TEST(SimplexTest, NonFiniteDataIsDegenerate) {
  pb::DenseMatrix A(1, 1);
  A(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> b{1};
  const auto r = pb::solve_feasibility(A, b);
  EXPECT_EQ(r.status, pb::FeasibilityResult::Status::Degenerate);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(SimplexTest, EmptyColumnsWithZeroRhsFeasible) {
  pb::DenseMatrix A(3, 0);
  const std::vector<double> b{0, 0, 0};
  EXPECT_EQ(pb::solve_feasibility(A, b).status, pb::FeasibilityResult::Status::Feasible);
}

TEST(OracleTest, EmptyAndGroundOnlyScenesStable) {
  EXPECT_TRUE(pb::equilibrium_feasible(std::vector<PlacedBox>{}).stable);
  pb::Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<PlacedBox> boxes;
    for (int i = 0; i < 8; ++i) {
      // Disjoint columns along x.
      boxes.push_back({{6 * i, static_cast<int>(pb::uniform_index(rng, 5))},
                       {1 + static_cast<int>(pb::uniform_index(rng, 5)),
                        1 + static_cast<int>(pb::uniform_index(rng, 5)),
                        1 + static_cast<int>(pb::uniform_index(rng, 9))},
                       0});
    }
    EXPECT_TRUE(pb::equilibrium_feasible(boxes).stable);
  }
}

TEST(OracleTest, CenteredOnAmpleSupportStable) {
  const std::vector<PlacedBox> s{{{0, 0}, {6, 6, 2}, 0}, {{1, 1}, {4, 4, 3}, 2}};
  EXPECT_TRUE(pb::equilibrium_feasible(s).stable);
}

TEST(OracleTest, OverhangBeyondSupportFalls) {
  const std::vector<PlacedBox> s{{{0, 0}, {2, 2, 5}, 0}, {{0, 0}, {6, 2, 1}, 5}};
  const auto v = pb::equilibrium_feasible(s);
  EXPECT_FALSE(v.stable);
  ASSERT_TRUE(v.first_infeasible.has_value());
  EXPECT_EQ(*v.first_infeasible, 1);
  EXPECT_FALSE(v.diagnostic.empty());
}

TEST(OracleTest, HeavyLoadTipsCantilever) {
  std::vector<PlacedBox> s{{{0, 0}, {4, 4, 7}, 0},
                           {{10, 0}, {4, 4, 4}, 0},
                           {{7, 0}, {7, 4, 2}, 4},
                           {{7, 0}, {2, 4, 1}, 6}};
  EXPECT_TRUE(pb::equilibrium_feasible(s).stable);
  s.push_back({{2, 0}, {7, 4, 2}, 7});
  EXPECT_FALSE(pb::equilibrium_feasible(s).stable);
  // The same slab at a tenth of the density is carried.
  s.back().density = 0.1;
  EXPECT_TRUE(pb::equilibrium_feasible(s).stable);
}

TEST(OracleTest, ContactsFromGeometry) {
  const std::vector<PlacedBox> s{{{0, 0}, {4, 4, 2}, 0}, {{2, 2}, {4, 4, 1}, 2},
                                 {{5, 5}, {1, 1, 1}, 0}};
  const auto g = pb::build_contacts(s);
  ASSERT_EQ(g.contacts.size(), 3u);
  const pb::Contact on_box{1, 0, 2, 2, 4, 4, 2};
  EXPECT_NE(std::find(g.contacts.begin(), g.contacts.end(), on_box), g.contacts.end());
}

TEST(OracleTest, InterpenetrationIsCorruption) {
  const std::vector<PlacedBox> s{{{0, 0}, {4, 4, 2}, 0}, {{1, 1}, {2, 2, 2}, 1}};
  EXPECT_THROW(pb::build_contacts(s), pb::ModelCorruption);
  const std::vector<PlacedBox> below{{{0, 0}, {1, 1, 1}, -1}};
  EXPECT_THROW(pb::build_contacts(below), pb::ModelCorruption);
}

TEST(OracleTest, FloatingBoxFalls) {
  const std::vector<PlacedBox> s{{{0, 0}, {2, 2, 2}, 3}};
  EXPECT_FALSE(pb::equilibrium_feasible(s).stable);
}

TEST(OracleTest, MassScalingInvariance) {
  pb::Rng rng(8);
  int unstable = 0;
  for (int t = 0; t < 60; ++t) {
    // Random stacks built through the heightmap so that boxes touch.
    pb::Heightmap hm(12, 12, 0);
    std::vector<PlacedBox> boxes;
    for (int i = 0; i < 8; ++i) {
      const pb::GridDims gd{1 + static_cast<int>(pb::uniform_index(rng, 6)),
                            1 + static_cast<int>(pb::uniform_index(rng, 6)),
                            1 + static_cast<int>(pb::uniform_index(rng, 4))};
      const pb::Cell a{static_cast<int>(pb::uniform_index(rng, 12 - gd.w + 1)),
                       static_cast<int>(pb::uniform_index(rng, 12 - gd.d + 1))};
      boxes.push_back({a, gd, pb::place_box(hm, a, gd, 100),
                       pb::uniform_real(rng, 0.2, 5.0)});
    }
    const bool base = pb::equilibrium_feasible(boxes).stable;
    unstable += base ? 0 : 1;
    for (double k : {1e-3, 0.5, 7.0, 1e3}) {
      auto scaled = boxes;
      for (auto& b : scaled) b.density *= k;
      EXPECT_EQ(pb::equilibrium_feasible(scaled).stable, base) << "trial " << t << " k " << k;
    }
  }
  EXPECT_GT(unstable, 0);
}

TEST(OracleTest, SingleSupportMatchesComRule) {
  const PlacedBox lower{{4, 4}, {3, 2, 1}, 0};
  for (int w = 1; w <= 4; ++w) {
    for (int d = 1; d <= 3; ++d) {
      for (int x = lower.anchor.x - w + 1; x < lower.anchor.x + lower.dims.w; ++x) {
        for (int y = lower.anchor.y - d + 1; y < lower.anchor.y + lower.dims.d; ++y) {
          for (double dx : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            PlacedBox upper{{x, y}, {w, d, 1}, 1, 1.0, dx, 0.0};
            const double x0 = std::max(x, lower.anchor.x);
            const double x1 = std::min(x + w, lower.anchor.x + lower.dims.w);
            const double y0 = std::max(y, lower.anchor.y);
            const double y1 = std::min(y + d, lower.anchor.y + lower.dims.d);
            const bool want = pbtest::com_in_rectangle(upper.com_x(), upper.com_y(), x0, y0, x1, y1);
            const std::vector<PlacedBox> s{lower, upper};
            EXPECT_EQ(pb::equilibrium_feasible(s).stable, want)
                << "w" << w << " d" << d << " at " << x << "," << y << " dx " << dx;
          }
        }
      }
    }
  }
}

TEST(OracleTest, WiderSupportNeverBreaksStability) {
  pb::Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    const pb::GridDims lo{1 + static_cast<int>(pb::uniform_index(rng, 4)),
                          1 + static_cast<int>(pb::uniform_index(rng, 4)), 2};
    const PlacedBox lower{{5, 5}, lo, 0};
    const pb::GridDims up{1 + static_cast<int>(pb::uniform_index(rng, 5)),
                          1 + static_cast<int>(pb::uniform_index(rng, 5)), 1};
    const pb::Cell a{5 - up.w + 1 + static_cast<int>(pb::uniform_index(rng, lo.w + up.w - 1)),
                     5 - up.d + 1 + static_cast<int>(pb::uniform_index(rng, lo.d + up.d - 1))};
    const PlacedBox upper{a, up, 2};
    const bool before = pb::equilibrium_feasible(std::vector<PlacedBox>{lower, upper}).stable;
    PlacedBox wider = lower;
    wider.anchor = {4, 4};
    wider.dims.w += 2;
    wider.dims.d += 2;
    const bool after = pb::equilibrium_feasible(std::vector<PlacedBox>{wider, upper}).stable;
    if (before) {
      EXPECT_TRUE(after) << "trial " << t;
    }
  }
}

TEST(OracleTest, SettleCheckPerPrefix) {
  const std::vector<PlacedBox> s{{{0, 0}, {2, 2, 5}, 0}, {{4, 0}, {2, 2, 1}, 0},
                                 {{0, 0}, {6, 2, 1}, 5}};
  const auto v = pb::settle_check(s);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_TRUE(v[0].stable);
  EXPECT_TRUE(v[1].stable);
  EXPECT_FALSE(v[2].stable);
}
