#include "c2plus/global_extension.hpp"
#include "c2plus/small_trace.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace c2plus;
using c2plus::testing::uniform;

namespace {

const State& state200() {
  static const State st = [] {
    c2plus::testing::rng(202);
    return preprocess(c2plus::testing::random_points(200));
  }();
  return st;
}

const State& clustered() {
  static const State st = [] {
    c2plus::testing::rng(203);
    std::vector<Point2> pts;
    for (int c = 0; c < 4; ++c) {
      const Point2 center = c2plus::testing::random_point(-1, 1);
      for (const Point2& p : c2plus::testing::random_points(25, -0.03, 0.03)) pts.push_back(center + (p - Point2{0, 0}));
    }
    return preprocess(pts);
  }();
  return st;
}

double bowl(const Point2& p) { return (1 + p.x * p.y) * (1 + p.x * p.y); }

std::vector<double> sample(const State& st, double (*g)(const Point2&)) {
  std::vector<double> f;
  for (const Point2& p : st.points()) f.push_back(g(p));
  return f;
}

void expect_same(const Jet2& a, const Jet2& b) {
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.grad, b.grad);
  EXPECT_EQ(a.hess, b.hess);
}

}  // namespace

TEST(Bump, CoreSupportAndDerivatives) {
  const DyadicSquare q{-2, 1, -1};
  const double c = 1.0 / 32.0, d = q.side();
  const Jet2 core = bump_jet(q, c, q.center());
  EXPECT_EQ(core.value, 1.0);
  EXPECT_TRUE(core.grad.isZero(0.0));
  const Point2 out = q.center() + Vec2(0.5 * d * (1 + c / 2) + 1e-12, 0.0);
  EXPECT_EQ(bump_jet(q, c, out).value, 0.0);
  c2plus::testing::rng(41);
  for (int k = 0; k < 40; ++k) {
    const Point2 x = q.center() + Vec2(uniform(-0.52, 0.52) * d, uniform(-0.52, 0.52) * d);
    const Jet2 j = bump_jet(q, c, x);
    const double h = 1e-5 * d;
    for (int i = 0; i < 2; ++i) {
      const Vec2 e = i == 0 ? Vec2(h, 0) : Vec2(0, h);
      const Jet2 p = bump_jet(q, c, x + e), m = bump_jet(q, c, x - e);
      const double s = 1.0 / (c * d);
      EXPECT_NEAR(j.grad(i), (p.value - m.value) / (2 * h), 1e-4 * s);
      EXPECT_NEAR(j.hess(0, i), (p.grad(0) - m.grad(0)) / (2 * h), 1e-3 * s * s);
      EXPECT_NEAR(j.hess(1, i), (p.grad(1) - m.grad(1)) / (2 * h), 1e-3 * s * s);
    }
  }
}

TEST(Pou, SumsToOne) {
  for (const State* st : {&state200(), &clustered()}) {
    c2plus::testing::rng(43);
    for (int k = 0; k < 3000; ++k) {
      const Point2 x = c2plus::testing::random_point(-1.6, 1.6);
      Jet2 sum = Jet2::constant(x, 0.0);
      for (const PouTerm& t : pou_jets(*st, x)) {
        EXPECT_GE(t.theta.value, 0.0);
        sum = jet2_add(sum, t.theta);
      }
      const double s = 1.0 / st->cz.square_of(st->cz.locate(x)).side();
      EXPECT_NEAR(sum.value, 1.0, 1e-10);
      EXPECT_LE(sum.grad.cwiseAbs().maxCoeff(), 1e-10 * s * 32);
      EXPECT_LE(sum.hess.cwiseAbs().maxCoeff(), 1e-10 * s * s * 1024);
    }
  }
}

TEST(Pou, CoreOfSquareIsOneAndFarSquaresVanish) {
  const State& st = state200();
  const SquareRef r = st.cz.locate({0.1, 0.2});
  const Jet2 at_center = pou_jet(st, r, r.square.center());
  EXPECT_NEAR(at_center.value, 1.0, 1e-15);
  SquareRef far = r;
  far.square.i += 5;
  EXPECT_EQ(pou_jet(st, far, r.square.center()).value, 0.0);
}

TEST(GlobalJet, ZeroDataGivesZero) {
  const State& st = state200();
  const std::vector<double> f(static_cast<std::size_t>(st.size()), 0.0);
  TransitionCache cache;
  c2plus::testing::rng(47);
  for (int k = 0; k < 500; ++k) {
    const Jet2 j = global_jet(st, c2plus::testing::random_point(-1.5, 1.5), f, 3.0, &cache);
    EXPECT_EQ(j.value, 0.0);
    EXPECT_TRUE(j.grad.isZero(0.0));
    EXPECT_TRUE(j.hess.isZero(0.0));
  }
}

TEST(GlobalJet, InterpolatesEveryDataPoint) {
  for (const State* st : {&state200(), &clustered()}) {
    const auto f = sample(*st, bowl);
    for (double m : {1e-3, 1.0, 1e4}) {
      TransitionCache cache;
      for (int i = 0; i < st->size(); ++i)
        EXPECT_NEAR(global_jet(*st, st->point(i), f, m, &cache).value, f[static_cast<std::size_t>(i)], 1e-9 * (1 + m));
    }
  }
}

TEST(GlobalJet, NonnegativeAndHessianMatchesDifferences) {
  const State& st = state200();
  const auto f = sample(st, bowl);
  const double m = 10.0 * 16.0;  // ten times a C^2 bound of the generator on [-1, 1]^2
  TransitionCache cache;
  double worst = 0.0;
  for (int a = 0; a < 100; ++a)
    for (int b = 0; b < 100; ++b)
      worst = std::min(worst, global_jet(st, {-1.5 + 3.0 * a / 99, -1.5 + 3.0 * b / 99}, f, m, &cache).value);
  EXPECT_GE(worst, -1e-8 * m);

  c2plus::testing::rng(53);
  for (int k = 0; k < 100; ++k) {
    const Point2 x = c2plus::testing::random_point(-0.9, 0.9);
    const Jet2 j = global_jet(st, x, f, m, &cache);
    const double h = 1e-7;
    const double s = 1.0 + j.hess.cwiseAbs().maxCoeff();
    for (int i = 0; i < 2; ++i) {
      const Vec2 e = i == 0 ? Vec2(h, 0) : Vec2(0, h);
      const Jet2 p = global_jet(st, x + e, f, m, &cache), q = global_jet(st, x - e, f, m, &cache);
      EXPECT_NEAR(j.hess(0, i), (p.grad(0) - q.grad(0)) / (2 * h), 1e-3 * s);
      EXPECT_NEAR(j.hess(1, i), (p.grad(1) - q.grad(1)) / (2 * h), 1e-3 * s);
      EXPECT_NEAR(j.grad(i), (p.value - q.value) / (2 * h), 1e-3 * (1 + j.grad.norm()));
    }
  }
}

TEST(GlobalJet, RejectsBadArguments) {
  const State& st = state200();
  const auto f = sample(st, bowl);
  EXPECT_THROW(global_jet(st, {0, 0}, f, -1.0), std::invalid_argument);
  EXPECT_THROW(global_jet(st, {0, 0}, std::vector<double>(3, 1.0), 1.0), std::invalid_argument);
  auto g = f;
  g[0] = -1.0;
  EXPECT_THROW(trace_norm(st, g), std::invalid_argument);
}

TEST(GlobalJet, GateConstantOnlyMovesTheBranchChoice) {
  State st = state200();
  const auto f = sample(st, bowl);
  const double m = trace_norm(st, f);
  int previous_tq1 = st.size() * 1000;
  for (double ct : {10.0, 1e3, 1e5}) {
    st.cfg.C_T = ct;
    TransitionCache cache;
    int tq1 = 0;
    for (int id = 0; id < static_cast<int>(st.cz.squares().size()); ++id)
      if (st.cz.at(id).sharp()) tq1 += transition_jet(st, id, f, m, &cache).rule == TQRule::TQ1;
    EXPECT_LE(tq1, previous_tq1) << "C_T " << ct;
    previous_tq1 = tq1;
    for (int i = 0; i < st.size(); ++i)
      EXPECT_NEAR(global_jet(st, st.point(i), f, m, &cache).value, f[static_cast<std::size_t>(i)], 1e-9 * (1 + m));
    double lowest = 0.0;
    for (int a = 0; a < 80; ++a)
      for (int b = 0; b < 80; ++b) lowest = std::min(lowest, global_jet(st, {-1.5 + 3.0 * a / 79, -1.5 + 3.0 * b / 79}, f, m, &cache).value);
    EXPECT_GE(lowest, -1e-8 * m) << "C_T " << ct;
    ::testing::Test::RecordProperty("tq1_at_ct_" + std::to_string(static_cast<long long>(ct)), tq1);
  }
}

TEST(RepresentativeSet, SinglePoint) {
  const State st = preprocess({{0.25, -0.5}});
  c2plus::testing::rng(59);
  for (int k = 0; k < 50; ++k) {
    const auto s = representative_set(st, c2plus::testing::random_point(-3, 3));
    for (int i : s) EXPECT_EQ(i, 0);
  }
}

TEST(RepresentativeSet, BoundedAndGoverningTheJet) {
  for (const State* st : {&state200(), &clustered()}) {
    const auto f = sample(*st, bowl);
    c2plus::testing::rng(61);
    std::size_t largest = 0;
    for (int k = 0; k < 300; ++k) {
      const Point2 x = k % 3 == 0 ? st->point(k % st->size()) + Vec2(uniform(-1e-3, 1e-3), uniform(-1e-3, 1e-3))
                                  : c2plus::testing::random_point(-1.3, 1.3);
      const auto s = representative_set(*st, x);
      largest = std::max(largest, s.size());
      auto g = f;
      for (int i = 0; i < st->size(); ++i)
        if (!std::binary_search(s.begin(), s.end(), i)) g[static_cast<std::size_t>(i)] *= 1.0 + 1e-6 * uniform(0, 1);
      expect_same(global_jet(*st, x, f, 50.0), global_jet(*st, x, g, 50.0));
    }
    RecordProperty("largest_depth_set", static_cast<int>(largest));
    EXPECT_LE(largest, static_cast<std::size_t>(st->cfg.D_config));
  }
}

TEST(FinitenessSets, TwoPoints) {
  const State st = preprocess({{0, 0}, {0.5, 0.25}});
  ASSERT_EQ(st.family.size(), 2u);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(st.family.members(l), (std::vector<int>{0, 1}));
  EXPECT_NE(st.family.pairs[0], st.family.pairs[1]);
}

TEST(FinitenessSets, ContainRepresentativesAndStayLinear) {
  c2plus::testing::rng(67);
  const State st = preprocess(c2plus::testing::random_points(1000));
  std::size_t total = 0, largest = 0;
  for (std::size_t l = 0; l < st.family.size(); ++l) {
    const auto& m = st.family.members(l);
    EXPECT_TRUE(std::binary_search(m.begin(), m.end(), st.family.pairs[l][0]));
    EXPECT_TRUE(std::binary_search(m.begin(), m.end(), st.family.pairs[l][1]));
    largest = std::max(largest, m.size());
  }
  for (const auto& s : st.family.sets) total += s.size();
  RecordProperty("sum_sizes_over_N", std::to_string(double(total) / st.size()));
  RecordProperty("pairs_over_N", std::to_string(double(st.family.size()) / st.size()));
  EXPECT_LE(total, 20000u * static_cast<std::size_t>(st.size()));
  EXPECT_LE(st.family.size(), 400u * static_cast<std::size_t>(st.size()));
  EXPECT_LE(largest, static_cast<std::size_t>(2 * st.cfg.D_config + 2));
}

TEST(TraceNorm, ZeroAndConstantData) {
  const State& st = state200();
  EXPECT_EQ(trace_norm(st, std::vector<double>(static_cast<std::size_t>(st.size()), 0.0)), 0.0);
  const double one = trace_norm(st, std::vector<double>(static_cast<std::size_t>(st.size()), 1.0));
  EXPECT_GE(one, 1.0 - 1e-9);
  EXPECT_LE(one, 100.0);
}

TEST(TraceNorm, MatchesWholeSetOracleOnTinyInputs) {
  c2plus::testing::rng(71);
  double worst = 1.0;
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + rep % 4;
    const auto pts = c2plus::testing::random_points(n);
    const State st = preprocess(pts);
    std::vector<double> f;
    for (int i = 0; i < n; ++i) f.push_back(uniform(0, 1) < 0.25 ? 0.0 : uniform(0, 2));
    const double m = trace_norm(st, f);
    SmallTraceInstance whole{st.points(), f, std::nullopt};
    const double oracle = small_trace_norm(whole).value;
    if (oracle == 0.0) {
      EXPECT_EQ(m, 0.0);
      continue;
    }
    worst = std::max({worst, m / oracle, oracle / m});
  }
  RecordProperty("worst_factor", std::to_string(worst));
  EXPECT_LE(worst, 100.0);
}

TEST(TraceNorm, PruningIsExact) {
  c2plus::testing::rng(73);
  Config exact;
  exact.norm_slack = 1.0;
  State st = preprocess(c2plus::testing::random_points(30), exact);
  std::vector<double> f;
  for (int i = 0; i < st.size(); ++i) f.push_back(uniform(0, 1));
  const NormReport r = trace_norm_report(st, f);
  double brute = 0.0;
  SmallTraceOptions opt;
  opt.limit = r.largest_set;
  for (const auto& s : st.family.sets) {
    SmallTraceInstance inst;
    for (int i : s) {
      inst.points.push_back(st.point(i));
      inst.values.push_back(f[static_cast<std::size_t>(i)]);
    }
    brute = std::max(brute, small_trace_norm(inst, opt).value);
  }
  EXPECT_NEAR(r.value, brute, 1e-6 * brute);

  st.cfg.norm_slack = 2.0;
  const NormReport loose = trace_norm_report(st, f);
  EXPECT_LE(loose.solved, r.solved);
  EXPECT_LE(loose.value, brute * (1 + 1e-6));
  EXPECT_GE(loose.value, brute / 2 * (1 - 1e-6));
}

TEST(State, SerializationRoundTrip) {
  const State& st = clustered();
  std::stringstream ss;
  st.write(ss);
  const State back = State::read(ss);
  const auto f = sample(st, bowl);
  EXPECT_EQ(trace_norm(st, f), trace_norm(back, f));
  c2plus::testing::rng(79);
  for (int k = 0; k < 100; ++k) {
    const Point2 x = c2plus::testing::random_point(-1.2, 1.2);
    expect_same(global_jet(st, x, f, 5.0), global_jet(back, x, f, 5.0));
    EXPECT_EQ(representative_set(st, x), representative_set(back, x));
  }
  std::stringstream bad("not a state");
  EXPECT_THROW(State::read(bad), std::runtime_error);
}

TEST(State, PreprocessRejectsBadInput) {
  EXPECT_THROW(preprocess({}), std::invalid_argument);
  EXPECT_THROW(preprocess({{0, 0}, {0, 0}}), std::invalid_argument);
  EXPECT_THROW(preprocess({{0, NAN}}), std::invalid_argument);
  Config c;
  c.A1 = 3;
  EXPECT_THROW(preprocess({{0, 0}}, c), std::invalid_argument);
}
