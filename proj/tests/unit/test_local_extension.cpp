#include "c2plus/global_extension.hpp"
#include "c2plus/local_extension.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace c2plus;
using c2plus::testing::uniform;

namespace {

const State& uniform_state() {
  static const State st = [] {
    c2plus::testing::rng(101);
    return preprocess(c2plus::testing::random_points(120));
  }();
  return st;
}

// points spread along a parabola, so many sharpsharp squares carry several abscissas
const State& curve_state() {
  static const State st = [] {
    std::vector<Point2> pts;
    for (int i = 0; i < 60; ++i) {
      const double t = -1.0 + 2.0 * i / 59.0;
      pts.push_back({t, 0.3 * t * t});
    }
    return preprocess(pts);
  }();
  return st;
}

std::vector<int> ids_of(const State& st, CZClass cls) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(st.cz.squares().size()); ++i)
    if (st.cz.at(i).cls == cls) out.push_back(i);
  return out;
}

std::vector<double> sample(const State& st, double (*g)(const Point2&)) {
  std::vector<double> f;
  for (const Point2& p : st.points()) f.push_back(g(p));
  return f;
}

double bowl(const Point2& p) { return (1 + p.x * p.y) * (1 + p.x * p.y); }
double bumpy(const Point2& p) { return 1.0 + std::sin(3 * p.x) * std::cos(2 * p.y); }

Point2 random_in(const Box& b) { return {uniform(b.lo.x, b.hi.x), uniform(b.lo.y, b.hi.y)}; }

void expect_same(const Jet2& a, const Jet2& b) {
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.grad, b.grad);
  EXPECT_EQ(a.hess, b.hess);
}

}  // namespace

TEST(SharpSet, RepFirstAndXSharpAwayFromData) {
  const State& st = uniform_state();
  for (int id : ids_of(st, CZClass::sharp_only)) {
    const SharpSet s = ssq(st, id);
    const CZSquare& q = st.cz.at(id);
    ASSERT_FALSE(s.data.empty());
    EXPECT_EQ(s.data.front(), *q.rep);
    for (int i = 0; i < st.size(); ++i) EXPECT_GE(distance(st.point(i), s.x_sharp), st.cfg.c0 * q.side() * (1 - 1e-12));
  }
  const auto other = ids_of(st, CZClass::other);
  if (!other.empty()) EXPECT_THROW(ssq(st, other.front()), std::invalid_argument);
}

TEST(TransitionJet, ZeroDataGivesZero) {
  const State& st = uniform_state();
  const std::vector<double> f(static_cast<std::size_t>(st.size()), 0.0);
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    const TransitionJet t = transition_jet(st, id, f, 1.0);
    EXPECT_EQ(t.rule, TQRule::TQ0);
    EXPECT_TRUE(t.zero_polynomial());
  }
}

TEST(TransitionJet, LargeDataAgainstSmallBudgetFires) {
  const State& st = uniform_state();
  const std::vector<double> f(static_cast<std::size_t>(st.size()), 1.0);
  TransitionCache cache;
  int fired = 0;
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    const TransitionJet t = transition_jet(st, id, f, 1e-9, &cache);
    if (t.rule != TQRule::TQ1) continue;
    ++fired;
    EXPECT_GT(t.jet.value, 0.0);
    EXPECT_LT(wplus_excess(t.jet), kInf);
  }
  EXPECT_GT(fired, 0);
}

TEST(TransitionJet, Deterministic) {
  const State& st = uniform_state();
  const auto f = sample(st, bumpy);
  for (int id : ids_of(st, CZClass::sharp_only)) {
    TransitionCache cache;
    const TransitionJet a = transition_jet(st, id, f, 0.5), b = transition_jet(st, id, f, 0.5, &cache);
    EXPECT_EQ(a.rule, b.rule);
    EXPECT_EQ(a.jet.value, b.jet.value);
    EXPECT_EQ(a.jet.grad, b.jet.grad);
  }
}

TEST(TransitionJet, GateIsMonotoneInM) {
  const State& st = uniform_state();
  const auto f = sample(st, bowl);
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    bool fired_before = true;
    for (double m : {1e-8, 1e-4, 1e-2, 1.0, 1e2, 1e6}) {
      const bool fired = transition_jet(st, id, f, m).rule == TQRule::TQ1;
      EXPECT_TRUE(fired_before || !fired) << "square " << id << " M " << m;
      fired_before = fired;
    }
  }
}

TEST(Straighten, RepMapsToOrigin) {
  const State& st = curve_state();
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    const CZSquare& q = st.cz.at(id);
    const Point2 rep = st.point(*q.rep);
    if (!q.square.dilated(1 + st.cfg.c_G).contains(rep)) continue;
    EXPECT_EQ(straighten(st, id, rep).t_x, 0.0);
  }
}

TEST(Straighten, InverseRoundTrip) {
  const State& st = curve_state();
  c2plus::testing::rng(17);
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    const Box b = st.cz.at(id).square.dilated(1 + st.cfg.c_G);
    for (int k = 0; k < 5; ++k) {
      const Point2 x = random_in(b);
      const Straightening s = straighten(st, id, x);
      for (int i = 0; i < 2; ++i) {
        const Jet2 id_i = compose_jets(s.inverse[i], s.forward);
        EXPECT_NEAR(id_i.value, i == 0 ? x.x : x.y, 1e-9 * (1 + std::abs(x.x) + std::abs(x.y)));
        EXPECT_NEAR(id_i.grad(i), 1.0, 1e-9);
        EXPECT_NEAR(id_i.grad(1 - i), 0.0, 1e-9);
        EXPECT_LE(id_i.hess.cwiseAbs().maxCoeff(), 1e-9 * (1 + s.phi.d2 * s.phi.d2));
      }
    }
  }
}

TEST(Straighten, CollinearDataIsAffine) {
  std::vector<Point2> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({-1.0 + 0.01 * i, 0.25 - 0.5 * (-1.0 + 0.01 * i)});
  const State st = preprocess(pts);
  c2plus::testing::rng(19);
  int checked = 0;
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    if (st.cz.at(id).proj_points.size() < 2) continue;
    const Box b = st.cz.at(id).square.dilated(1 + st.cfg.c_G);
    for (int k = 0; k < 4; ++k) {
      const Straightening s = straighten(st, id, random_in(b));
      EXPECT_LE(std::abs(s.phi.d2), 1e-6);
      EXPECT_LE(s.forward[1].hess.cwiseAbs().maxCoeff(), 1e-6);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(ComposeJets, RejectsMisanchoredOuter) {
  Jet2 inner[2] = {Jet2::constant({0, 0}, 1.0), Jet2::constant({0, 0}, 2.0)};
  EXPECT_THROW(compose_jets(Jet2::constant({0, 0}, 0.0), inner), std::invalid_argument);
  EXPECT_NO_THROW(compose_jets(Jet2::constant({1, 2}, 0.0), inner));
}

TEST(Psi, PlateauSupportAndDerivatives) {
  CZSquare q;
  q.square = {-3, 2, 1};
  q.x_sharp = q.square.center();
  const double c0 = 1.0 / 1024.0, d = q.side();
  const Jet2 one = psi_jet(q, c0, q.x_sharp);
  EXPECT_EQ(one.value, 1.0);
  EXPECT_TRUE(one.grad.isZero(0.0));
  EXPECT_TRUE(one.hess.isZero(0.0));
  const Jet2 zero = psi_jet(q, c0, q.x_sharp + Vec2(c0 * d / 2, 0.0));
  EXPECT_EQ(zero.value, 0.0);
  EXPECT_TRUE(zero.grad.isZero(0.0));
  c2plus::testing::rng(23);
  for (int k = 0; k < 50; ++k) {
    const double r = c0 * d * uniform(0.26, 0.49), a = uniform(0, 2 * M_PI);
    const Point2 x = q.x_sharp + Vec2(r * std::cos(a), r * std::sin(a));
    const Jet2 j = psi_jet(q, c0, x);
    const double h = 1e-4 * c0 * d;
    for (int i = 0; i < 2; ++i) {
      const Vec2 e = i == 0 ? Vec2(h, 0) : Vec2(0, h);
      const Jet2 p = psi_jet(q, c0, x + e), m = psi_jet(q, c0, x - e);
      const double scale = 1.0 / (c0 * d);
      const double hscale = j.hess.cwiseAbs().maxCoeff() + scale * scale;
      EXPECT_NEAR(j.grad(i), (p.value - m.value) / (2 * h), 1e-5 * scale);
      EXPECT_NEAR(j.hess(0, i), (p.grad(0) - m.grad(0)) / (2 * h), 1e-5 * hscale);
      EXPECT_NEAR(j.hess(1, i), (p.grad(1) - m.grad(1)) / (2 * h), 1e-5 * hscale);
    }
    EXPECT_LE(j.grad.norm(), 8.0 / (c0 * d));
  }
}

TEST(LocalJet, ZeroDataGivesZeroJet) {
  const State& st = curve_state();
  const std::vector<double> f(static_cast<std::size_t>(st.size()), 0.0);
  c2plus::testing::rng(29);
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    const Jet2 j = local_jet(st, id, random_in(st.cz.at(id).square.dilated(1 + st.cfg.c_G)), f, 1.0);
    EXPECT_EQ(j.value, 0.0);
    EXPECT_TRUE(j.grad.isZero(0.0));
    EXPECT_TRUE(j.hess.isZero(0.0));
  }
}

TEST(LocalJet, InterpolatesDataInTheDilatedSquare) {
  for (const State* st : {&uniform_state(), &curve_state()}) {
    for (double m : {1e-6, 1.0, 1e3}) {
      const auto f = sample(*st, bumpy);
      TransitionCache cache;
      for (int id : ids_of(*st, CZClass::sharpsharp)) {
        for (int i : st->cz.at(id).proj_points) {
          const Jet2 j = local_jet(*st, id, st->point(i), f, m, &cache);
          EXPECT_NEAR(j.value, f[static_cast<std::size_t>(i)], 1e-9 * (1 + m));
        }
      }
    }
  }
}

TEST(LocalJet, MatchesTransitionJetAtXSharp) {
  const State& st = curve_state();
  const auto f = sample(st, bowl);
  for (double m : {1e-6, 10.0}) {
    for (int id : ids_of(st, CZClass::sharpsharp)) {
      const CZSquare& q = st.cz.at(id);
      if (!q.square.dilated(1 + st.cfg.c_G).contains(q.x_sharp)) continue;
      const TransitionJet t = transition_jet(st, id, f, m);
      const Jet2 j = local_jet(st, id, q.x_sharp, f, m);
      EXPECT_EQ(j.value, t.jet.value);
      EXPECT_EQ(j.grad, t.jet.grad);
      EXPECT_TRUE(j.hess.isZero(0.0));
    }
  }
}

TEST(LocalJet, DependsOnlyOnItsDepthSet) {
  const State& st = uniform_state();
  const auto f = sample(st, bumpy);
  c2plus::testing::rng(31);
  for (int id : ids_of(st, CZClass::sharpsharp)) {
    const Point2 x = random_in(st.cz.at(id).square.dilated(1 + st.cfg.c_G));
    const auto dep = local_depth_set(st, id, x);
    auto g = f;
    for (int i = 0; i < st.size(); ++i)
      if (!std::binary_search(dep.begin(), dep.end(), i)) g[static_cast<std::size_t>(i)] = uniform(0, 3);
    expect_same(local_jet(st, id, x, f, 0.7), local_jet(st, id, x, g, 0.7));
  }
}

// The guarantee needs M at least the trace norm of f; both gate outcomes occur on clustered data.
TEST(LocalJet, NonnegativeOnGrids) {
  const State clustered = [] {
    c2plus::testing::rng(41);
    std::vector<Point2> pts;
    for (int c = 0; c < 3; ++c) {
      const Point2 center = c2plus::testing::random_point(-1, 1);
      for (const Point2& p : c2plus::testing::random_points(20, -0.01, 0.01)) pts.push_back(center + (p - Point2{0, 0}));
    }
    return preprocess(pts);
  }();
  int rules[2] = {0, 0};
  for (const State* st : {&uniform_state(), &curve_state(), &clustered}) {
    const auto f = sample(*st, bowl);
    const double norm = trace_norm(*st, f);
    for (double m : {norm, 10 * norm}) {
      TransitionCache cache;
      double worst = 0.0;
      for (int id : ids_of(*st, CZClass::sharpsharp)) {
        ++rules[transition_jet(*st, id, f, m, &cache).rule == TQRule::TQ1];
        const Box b = st->cz.at(id).square.dilated(1 + st->cfg.c_G);
        for (int a = 0; a <= 12; ++a)
          for (int c = 0; c <= 12; ++c) {
            const Point2 x{b.lo.x + (b.hi.x - b.lo.x) * a / 12.0, b.lo.y + (b.hi.y - b.lo.y) * c / 12.0};
            if (!b.contains(x)) continue;
            worst = std::min(worst, local_jet(*st, id, x, f, m, &cache).value);
          }
      }
      EXPECT_GE(worst, -1e-9 * m) << "M " << m;
    }
  }
  RecordProperty("tq0_squares", rules[0]);
  RecordProperty("tq1_squares", rules[1]);
}

TEST(LocalJet, RejectsPointOutsideDilatedSquare) {
  const State& st = uniform_state();
  const auto ids = ids_of(st, CZClass::sharpsharp);
  ASSERT_FALSE(ids.empty());
  const auto f = sample(st, bowl);
  const Box b = st.cz.at(ids.front()).square.dilated(1 + st.cfg.c_G);
  EXPECT_THROW(local_jet(st, ids.front(), {b.hi.x + 1.0, b.hi.y}, f, 1.0), std::invalid_argument);
}

TEST(RelayJet, NonnegativeQuadratic) {
  const State& st = uniform_state();
  const std::vector<double> f(static_cast<std::size_t>(st.size()), 1.0);
  c2plus::testing::rng(37);
  for (int id : ids_of(st, CZClass::sharp_only)) {
    const TransitionJet t = transition_jet(st, id, f, 1e-9);
    for (int k = 0; k < 20; ++k) EXPECT_GE(relay_jet(t, c2plus::testing::random_point(-2, 2)).value, -1e-12);
  }
}
