#include "c2plus/lp.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

using namespace c2plus;

namespace {

// maximum over basic feasible vertices; the feasible set is assumed bounded
double vertex_enumeration(const VecX& c, const MatX& G, const VecX& h) {
  const int n = static_cast<int>(c.size()), m = static_cast<int>(G.rows());
  double best = -kInf;
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::vector<bool> mask(static_cast<std::size_t>(m), false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    MatX A(n, n);
    VecX b(n);
    int k = 0;
    for (int i = 0; i < m; ++i)
      if (mask[static_cast<std::size_t>(i)]) {
        A.row(k) = G.row(i);
        b(k++) = h(i);
      }
    Eigen::FullPivLU<MatX> lu(A);
    if (lu.rank() < n) continue;
    const VecX z = lu.solve(b);
    if (((G * z - h).array() > 1e-9).any()) continue;
    best = std::max(best, c.dot(z));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace

TEST(SolveLp, Examples) {
  {
    const LPResult r = solve_lp((VecX(1) << 1).finished(), (MatX(1, 1) << 1).finished(), (VecX(1) << 1).finished());
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_NEAR(r.objective, 1.0, 1e-12);
  }
  {
    const LPResult r = solve_lp(VecX::Ones(2), MatX::Identity(2, 2), (VecX(2) << 1, 2).finished());
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_NEAR(r.objective, 3.0, 1e-12);
    EXPECT_NEAR(r.z(0), 1.0, 1e-12);
    EXPECT_NEAR(r.z(1), 2.0, 1e-12);
  }
}

TEST(SolveLp, StatusFlags) {
  // z <= 1 with maximize -z... unbounded below is fine; maximize z with only z >= 0 is unbounded
  const LPResult u = solve_lp((VecX(1) << 1).finished(), (MatX(1, 1) << -1).finished(), (VecX(1) << 0).finished());
  EXPECT_EQ(u.status, LPStatus::unbounded);
  // z <= -1 and -z <= 0 is empty
  const LPResult inf = solve_lp((VecX(1) << 1).finished(), (MatX(2, 1) << 1, -1).finished(), (VecX(2) << -1, 0).finished());
  EXPECT_EQ(inf.status, LPStatus::infeasible);
  // empty and the objective direction is unbounded in the relaxed sense
  const LPResult inf2 = solve_lp((VecX(2) << 1, 0).finished(), (MatX(2, 2) << 0, 1, 0, -1).finished(),
                                 (VecX(2) << -1, 0).finished());
  EXPECT_EQ(inf2.status, LPStatus::infeasible);
}

TEST(SolveLp, EqualityConstraints) {
  // maximize z1 + 2 z2 subject to z1 + z2 = 1, z >= 0
  const LPResult r = solve_lp((VecX(2) << 1, 2).finished(), -MatX::Identity(2, 2), VecX::Zero(2),
                              (MatX(1, 2) << 1, 1).finished(), (VecX(1) << 1).finished());
  ASSERT_EQ(r.status, LPStatus::optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
  EXPECT_NEAR(r.z(1), 1.0, 1e-12);
}

TEST(SolveLp, MatchesVertexEnumeration) {
  c2plus::testing::rng(4242);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + t % 2;
    const int extra = 1 + t % 3;
    MatX G(2 * n + extra, n);
    VecX h(2 * n + extra);
    G.topRows(n) = MatX::Identity(n, n);
    G.middleRows(n, n) = -MatX::Identity(n, n);
    h.head(2 * n) = VecX::Ones(2 * n) * 2.0;
    G.bottomRows(extra) = MatX::Random(extra, n);
    h.tail(extra) = VecX::Random(extra).cwiseAbs();
    const VecX c = VecX::Random(n);
    const LPResult r = solve_lp(c, G, h);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_NEAR(r.objective, vertex_enumeration(c, G, h), 1e-8);
    EXPECT_LE((G * r.z - h).maxCoeff(), 1e-9);
  }
}

TEST(SolveLp, DegenerateVertex) {
  // many constraints tight at the optimum (1,1)
  MatX G(5, 2);
  G << 1, 0, 0, 1, 1, 1, 2, 1, 1, 2;
  const VecX h = (VecX(5) << 1, 1, 2, 3, 3).finished();
  const LPResult r = solve_lp(VecX::Ones(2), G, h);
  ASSERT_EQ(r.status, LPStatus::optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(VertexSimplex, AgreesWithDenseSolver) {
  c2plus::testing::rng(31);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 4;
    const int extra = 2 + t % 5;
    std::vector<SparseIneq> rows;
    MatX G(2 * n + extra, n);
    VecX h(2 * n + extra);
    for (int i = 0; i < n; ++i) {
      rows.push_back({{i}, {-1.0}, 1.0});
      G.row(i) = -VecX::Unit(n, i).transpose();
      h(i) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
      rows.push_back({{i}, {1.0}, 1.0});
      G.row(n + i) = VecX::Unit(n, i).transpose();
      h(n + i) = 1.0;
    }
    for (int e = 0; e < extra; ++e) {
      SparseIneq r;
      const VecX g = VecX::Random(n);
      for (int i = 0; i < n; ++i) {
        r.idx.push_back(i);
        r.val.push_back(g(i));
      }
      r.rhs = g.cwiseAbs().sum() * 0.5;
      G.row(2 * n + e) = g.transpose();
      h(2 * n + e) = r.rhs;
      rows.push_back(r);
    }
    // start at the vertex z = -1 where the lower bounds are tight; it is feasible only if all
    // extra rows hold there
    VecX z0 = -VecX::Ones(n);
    if (((G * z0 - h).array() > 0).any()) continue;
    VertexSimplex vs(n, rows);
    std::vector<int> act(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) act[static_cast<std::size_t>(i)] = i;
    vs.start(z0, act);
    for (int k = 0; k < 5; ++k) {
      const VecX c = VecX::Random(n);
      ASSERT_EQ(vs.maximize(c), LPStatus::optimal);
      const LPResult ref = solve_lp(c, G, h);
      EXPECT_NEAR(vs.value(c), ref.objective, 1e-9);
      EXPECT_LE((G * vs.point() - h).maxCoeff(), 1e-9);
    }
  }
}
