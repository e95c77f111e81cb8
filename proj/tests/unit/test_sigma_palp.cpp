#include "c2plus/sigma_palp.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace c2plus;
using c2plus::testing::uniform;

namespace {

Vec2 unit(double th) { return Vec2(std::cos(th), std::sin(th)); }

}  // namespace

TEST(SigmaGauge, SinglePointClosedForm) {
  // only |g_i| <= 1 binds: gauge is 1 / max|u_i|
  const Point2 x{0.3, -0.2};
  EXPECT_NEAR(sigma_gauge(x, {x}, Vec2::UnitX()), 1.0, 1e-12);
  for (double th : {0.1, 0.7, 2.0, 3.0}) {
    const Vec2 u = unit(th);
    EXPECT_NEAR(sigma_gauge(x, {}, u), 1.0 / u.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SigmaGauge, TwoPointsAlongTheLine) {
  // g_x = r e1 with y = x + h e1: the cheapest field copies g_x to y, so b = r/h, a = r and
  // a + b <= 1 gives r = h / (1 + h).
  for (double h : {1e-3, 0.1, 0.5, 1.0, 4.0}) {
    const Point2 x{0, 0}, y{h, 0};
    EXPECT_NEAR(sigma_gauge(x, {x, y}, Vec2::UnitX()), h / (1 + h), 1e-9 * (1 + h));
    // the perpendicular direction is unconstrained by the pair: gauge 1
    EXPECT_NEAR(sigma_gauge(x, {x, y}, Vec2::UnitY()), 1.0, 1e-9);
  }
}

TEST(SigmaGauge, Symmetric) {
  c2plus::testing::rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto pts = c2plus::testing::random_points(2 + t % 5);
    const Vec2 u = unit(uniform(0, 2 * std::numbers::pi));
    EXPECT_NEAR(sigma_gauge(pts[0], pts, u), sigma_gauge(pts[0], pts, -u), 1e-10);
  }
}

TEST(SigmaBody, PolygonMatchesDirectLp) {
  c2plus::testing::rng(12);
  for (int t = 0; t < 30; ++t) {
    const double spread = std::pow(10.0, uniform(-3, 0.5));
    const auto pts = c2plus::testing::random_points(1 + t % 8, -spread, spread);
    const SigmaBody body = build_sigma_body(pts[0], pts);
    for (int k = 0; k < 6; ++k) {
      const Vec2 u = unit(uniform(0, 2 * std::numbers::pi));
      const double direct = sigma_gauge(pts[0], pts, u);
      EXPECT_NEAR(body.gauge(u), direct, 1e-7 * (1e-3 + direct)) << "t=" << t;
    }
  }
}

TEST(SigmaBody, SinglePoint) {
  const SigmaBody b = build_sigma_body({1, 1}, {});
  ASSERT_EQ(b.gauges.size(), 64u);
  for (double g : b.gauges) {
    EXPECT_GE(g, 1.0 - 1e-12);
    EXPECT_LE(g, std::sqrt(2.0) + 1e-12);
  }
  EXPECT_NEAR(b.diameter, 2 * std::sqrt(2.0), 1e-12);
  // the 45 and 135 degree samples tie; the smaller angle wins
  EXPECT_NEAR(b.u_max.x(), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(b.u_max.y(), std::sqrt(0.5), 1e-12);
}

TEST(SigmaBody, CloseTripleShrinksInEveryDirection) {
  const double h = 1e-3;
  const std::vector<Point2> s{{0, 0}, {h, 0}, {0, h}};
  const SigmaBody b = build_sigma_body(s[0], s);
  EXPECT_LT(b.diameter, 10 * h);
  EXPECT_GT(b.diameter, 0.0);
  // two points only: the pair direction is pinched, the perpendicular is free
  const SigmaBody pair = build_sigma_body(s[0], {s[0], s[1]});
  EXPECT_NEAR(pair.u_max.x(), 0.0, 1e-12);
  EXPECT_GE(pair.diameter, 2.0 - 1e-9);
}

TEST(SigmaBody, MonotoneUnderEnlargement) {
  c2plus::testing::rng(13);
  for (int t = 0; t < 20; ++t) {
    const auto pts = c2plus::testing::random_points(8, -0.3, 0.3);
    std::vector<Point2> sub(pts.begin(), pts.begin() + 1 + t % 6);
    const SigmaBody small = build_sigma_body(pts[0], sub);
    const SigmaBody big = build_sigma_body(pts[0], pts);
    for (std::size_t k = 0; k < small.gauges.size(); ++k) EXPECT_LE(big.gauges[k], small.gauges[k] + 1e-9);
    EXPECT_GT(big.diameter, 0.0);
  }
}

TEST(Palp, SinglePoint) {
  const PointIndex idx({{0.5, 0.5}});
  const PALP p = build_palp(idx, 0);
  EXPECT_EQ(p.depth_set, std::vector<int>{0});
  EXPECT_NEAR(p.eps1, p.eps2, 1e-12);
  EXPECT_NEAR(p.u_perp.x() * p.u_max.y() - p.u_perp.y() * p.u_max.x(), 1.0, 1e-15);
}

TEST(Palp, TolerancesMatchGaugeLp) {
  std::vector<Point2> line;
  for (int i = 0; i < 10; ++i) line.push_back({0.01 * i, 0.2});
  c2plus::testing::rng(14);
  for (const auto& pts : {line, c2plus::testing::random_points(30, -0.2, 0.2)}) {
    const PointIndex idx(pts);
    for (int x = 0; x < 5; ++x) {
      const PALP p = build_palp(idx, x);
      EXPECT_EQ(p.depth_set.front(), x);
      EXPECT_LE(p.depth_set.size(), 16u);
      std::vector<Point2> s;
      for (int i : p.depth_set) s.push_back(idx.point(i));
      EXPECT_NEAR(p.eps1, sigma_gauge(p.anchor, s, p.u_max), 1e-7 * (1e-3 + p.eps1));
      EXPECT_NEAR(p.eps2, sigma_gauge(p.anchor, s, p.u_perp), 1e-7 * (1e-3 + p.eps2));
    }
  }
  // along a line the free direction is the normal
  const PALP p = build_palp(PointIndex(line), 4);
  EXPECT_NEAR(std::abs(p.u_max.y()), 1.0, 1e-3);
  EXPECT_LT(p.eps2, 0.05);
}

TEST(Palp, Contains) {
  const PointIndex idx({{0, 0}, {0.1, 0}, {0, 0.1}});
  const PALP p = build_palp(idx, 0);
  EXPECT_TRUE(palp_contains(p, Jet1{{0, 0}, 0, Vec2::Zero()}, 0.0));
  EXPECT_TRUE(palp_contains(p, Jet1{{0, 0}, 0, Vec2::Zero()}, 5.0));
  EXPECT_FALSE(palp_contains(p, Jet1{{0, 0}, 1e-6, Vec2::Zero()}, 1e6));
  const Jet1 edge{{0, 0}, 0, p.eps1 * p.u_max};
  EXPECT_TRUE(palp_contains(p, edge, 1.0));
  EXPECT_FALSE(palp_contains(p, edge, 1.0 - 1e-6));
}
