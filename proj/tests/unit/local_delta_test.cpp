#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exvocab/error.hpp"
#include "exvocab/local_delta.hpp"
#include "generators.hpp"

namespace exvocab {
namespace {

std::vector<std::uint32_t> brute_nearest(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                                         double y, std::size_t k) {
  std::vector<std::uint32_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0U);
  auto d2 = [&](std::uint32_t i) { return (xs[i] - x) * (xs[i] - x) + (ys[i] - y) * (ys[i] - y); };
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return d2(a) < d2(b); });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

TEST(KdTree, MatchesBruteForce) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    testing::Gen g(testing::case_seed(97, i));
    const std::size_t n = g.range(0, 400);
    const bool grid = g.coin();  // integer grid: many exact ties
    std::vector<double> xs(n), ys(n);
    for (std::size_t j = 0; j < n; ++j) {
      xs[j] = grid ? static_cast<double>(g.range(0, 10)) : g.uniform(-5, 5);
      ys[j] = grid ? static_cast<double>(g.range(0, 10)) : g.uniform(-5, 5);
    }
    const KdTree2D tree(xs, ys);
    for (int q = 0; q < 10; ++q) {
      const double x = grid ? static_cast<double>(g.range(-1, 11)) : g.uniform(-6, 6);
      const double y = grid ? static_cast<double>(g.range(-1, 11)) : g.uniform(-6, 6);
      const std::size_t k = g.range(1, 50);
      ASSERT_EQ(tree.nearest(x, y, k), brute_nearest(xs, ys, x, y, k)) << "case " << i;
    }
  }
}

std::vector<EmbeddedPoint> random_points(testing::Gen& g, std::size_t n, bool grid) {
  std::vector<EmbeddedPoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = pts[i];
    p.id = "p" + std::to_string(i);
    p.year = g.coin() ? 2022 : 2024;
    p.x = grid ? static_cast<double>(g.range(-20, 20)) : g.uniform(-10, 10);
    p.y = grid ? static_cast<double>(g.range(-20, 20)) : g.uniform(-10, 10);
    p.rare = g.coin(p.year == 2024 ? 0.4 : 0.1);
    p.common = g.coin(0.3);
  }
  return pts;
}

LocalDeltaOptions opts(std::size_t k) {
  LocalDeltaOptions o;
  o.k = k;
  return o;
}

TEST(LocalDelta, RigidMotionInvariance) {
  for (std::uint64_t i = 0; i < 60; ++i) {
    testing::Gen g(testing::case_seed(101, i));
    const bool grid = i % 2 == 0;
    const auto pts = random_points(g, 300, grid);
    const auto base = local_delta(pts, opts(15));
    auto moved = pts;
    if (grid) {
      // Exact: quarter turn, reflection and integer shift.
      const double tx = static_cast<double>(g.range(-100, 100)), ty = static_cast<double>(g.range(-100, 100));
      for (auto& p : moved) {
        const double x = p.x;
        p.x = -p.y + tx;
        p.y = -x + ty;
      }
    } else {
      const double a = g.uniform(0, 6.283185307179586), tx = g.uniform(-50, 50), ty = g.uniform(-50, 50);
      for (auto& p : moved) {
        const double x = p.x;
        p.x = std::cos(a) * x - std::sin(a) * p.y + tx;
        p.y = std::sin(a) * x + std::cos(a) * p.y + ty;
      }
    }
    const auto after = local_delta(moved, opts(15));
    ASSERT_EQ(after.size(), base.size());
    for (std::size_t j = 0; j < base.size(); ++j) {
      ASSERT_EQ(after[j].delta, base[j].delta) << "case " << i << " point " << j;
      ASSERT_EQ(after[j].delta_rare, base[j].delta_rare);
    }
  }
}

TEST(LocalDelta, IdenticalMembershipGivesZero) {
  testing::Gen g(103);
  auto pts = random_points(g, 400, false);
  for (auto& p : pts) {
    p.rare = true;
    p.common = false;
  }
  for (const auto& r : local_delta(pts, opts(20))) {
    ASSERT_TRUE(r.delta.has_value()) << r.error;
    EXPECT_EQ(*r.delta, 0.0);
  }
}

TEST(LocalDelta, HandExampleIncludesThePointItself) {
  // Two 2022 points and two 2024 points on a line; k = 2 uses all of them.
  std::vector<EmbeddedPoint> pts = {
      {"a", 2022, 0, 0, false, false},
      {"b", 2022, 1, 0, false, true},
      {"c", 2024, 2, 0, true, true},
      {"d", 2024, 3, 0, false, true},
  };
  const auto r = local_delta(pts, opts(2));
  ASSERT_EQ(r.size(), 4U);
  for (const auto& x : r) {
    ASSERT_TRUE(x.delta.has_value());
    EXPECT_DOUBLE_EQ(*x.delta_rare, 0.5);
    EXPECT_DOUBLE_EQ(*x.delta_common, 0.5);
    EXPECT_DOUBLE_EQ(*x.delta, 0.5);
  }
  const auto one = local_delta(pts, opts(1));
  EXPECT_DOUBLE_EQ(*one[0].delta_rare, 1.0);   // nearest 2024 point of a is c
  EXPECT_DOUBLE_EQ(*one[0].delta_common, 1.0);
  EXPECT_DOUBLE_EQ(*one[3].delta_rare, 0.0);   // d itself
}

TEST(LocalDelta, TooFewNeighboursIsPerPointError) {
  std::vector<EmbeddedPoint> pts = {{"a", 2022, 0, 0, false, false}, {"b", 2024, 1, 1, true, false},
                                    {"c", 2024, 2, 2, true, false}};
  const auto r = local_delta(pts, opts(2));
  ASSERT_EQ(r.size(), 3U);
  for (const auto& x : r) {
    EXPECT_FALSE(x.delta.has_value());
    EXPECT_NE(x.error.find("fewer than 2 points in 2022"), std::string::npos) << x.error;
  }
  const std::string csv = local_delta_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,x,y,delta,delta_rare,delta_common,error");
}

TEST(LocalDelta, InputValidation) {
  std::vector<EmbeddedPoint> pts = {{"a", 2022, std::nan(""), 0, false, false}};
  EXPECT_THROW(local_delta(pts, opts(1)), Error);
  EXPECT_THROW(local_delta({}, opts(0)), Error);
}

TEST(PointsCsv, ParseAndErrors) {
  const auto pts = parse_points_csv("id,year,x,y,rare,common\nd1,2022,0.5,-1,1,0\nd2,2024,2,3,0,1\n");
  ASSERT_EQ(pts.size(), 2U);
  EXPECT_EQ(pts[0].id, "d1");
  EXPECT_EQ(pts[0].y, -1.0);
  EXPECT_TRUE(pts[0].rare);
  EXPECT_TRUE(pts[1].common);
  EXPECT_THROW(parse_points_csv("id,year,x,y,rare\nd1,2022,0,0,1\n"), Error);
  EXPECT_THROW(parse_points_csv("id,year,x,y,rare,common\nd1,2022,zero,0,1,0\n"), Error);
  EXPECT_THROW(parse_points_csv("id,year,x,y,rare,common\nd1,2022,0,0,2,0\n"), Error);
}

}  // namespace
}  // namespace exvocab
