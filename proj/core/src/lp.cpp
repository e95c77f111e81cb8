#include "c2plus/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace c2plus {

std::string to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

enum class DualOutcome { optimal, infeasible, unbounded };

struct Tableau {
  MatX T;  // last row: reduced costs, last column: right-hand side
  std::vector<int> basis;
  int pivots = 0;

  int rows() const { return static_cast<int>(T.rows()) - 1; }
  int rhs_col() const { return static_cast<int>(T.cols()) - 1; }

  void pivot(int r, int col) {
    T.row(r) /= T(r, col);
    for (int i = 0; i < T.rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    basis[r] = col;
    ++pivots;
  }

  // Bland's rule on columns [0, allowed). Returns false when unbounded.
  bool run(int allowed, double eps) {
    const int m = rows();
    const int rc = rhs_col();
    for (;;) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j)
        if (T(m, j) < -eps) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) <= eps) continue;
        const double ratio = T(i, rc) / T(i, enter);
        const double tie = 1e-12 * std::max(1.0, std::abs(best));
        if (leave < 0 || ratio < best - tie || (ratio <= best + tie && basis[i] < basis[leave])) {
          best = leave < 0 ? ratio : std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

// Solves min d'x s.t. M x = c, x >= 0 where M = [G' A' -A'] and d = [h a -a]; the simplex
// multipliers of the final basis are the primal point z.
DualOutcome dual_tableau(const VecX& c, const MatX& G, const VecX& h, const MatX& A, const VecX& a, VecX& z,
                         int& pivots) {
  const int n = static_cast<int>(c.size());
  const int mi = static_cast<int>(G.rows());
  const int me = static_cast<int>(A.rows());
  const int N = mi + 2 * me;
  MatX M(n, N);
  VecX d(N);
  if (mi) M.leftCols(mi) = G.transpose();
  if (me) {
    M.middleCols(mi, me) = A.transpose();
    M.rightCols(me) = -A.transpose();
  }
  if (mi) d.head(mi) = h;
  if (me) {
    d.segment(mi, me) = a;
    d.tail(me) = -a;
  }
  const double scale = 1.0 + (N ? M.cwiseAbs().maxCoeff() : 0.0) + c.cwiseAbs().maxCoeff();
  const double eps = 1e-11 * scale;

  Tableau tb;
  tb.T = MatX::Zero(n + 1, N + n + 1);
  tb.basis.resize(n);
  std::vector<double> sign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    if (c(i) < 0) sign[i] = -1.0;
    tb.T.block(i, 0, 1, N) = sign[i] * M.row(i);
    tb.T(i, N + i) = 1.0;
    tb.T(i, N + n) = sign[i] * c(i);
    tb.basis[i] = N + i;
  }
  // phase one: minimize the sum of artificials
  for (int j = 0; j < N; ++j) tb.T(n, j) = -tb.T.block(0, j, n, 1).sum();
  tb.T(n, N + n) = -tb.T.block(0, N + n, n, 1).sum();
  tb.run(N, eps);
  pivots += tb.pivots;
  if (-tb.T(n, N + n) > 1e-9 * scale) return DualOutcome::infeasible;
  for (int i = 0; i < n; ++i) {
    if (tb.basis[i] < N) continue;
    for (int j = 0; j < N; ++j)
      if (std::abs(tb.T(i, j)) > eps) {
        tb.pivot(i, j);
        break;
      }
  }
  // phase two reduced costs
  for (int j = 0; j < N + n + 1; ++j) {
    double v = (j < N) ? d(j) : 0.0;
    for (int i = 0; i < n; ++i) {
      const int b = tb.basis[i];
      const double cb = b < N ? d(b) : 0.0;
      v -= cb * tb.T(i, j);
    }
    tb.T(n, j) = v;
  }
  tb.pivots = 0;
  const bool bounded = tb.run(N, eps);
  pivots += tb.pivots;
  if (!bounded) return DualOutcome::unbounded;
  z.resize(n);
  for (int i = 0; i < n; ++i) z(i) = -sign[i] * tb.T(n, N + i);
  return DualOutcome::optimal;
}

}  // namespace

LPResult solve_lp(const VecX& c, const MatX& G, const VecX& h, const MatX& A, const VecX& a) {
  const int n = static_cast<int>(c.size());
  MatX Ge = G.rows() ? G : MatX(0, n);
  MatX Ae = A.rows() ? A : MatX(0, n);
  VecX he = G.rows() ? h : VecX(0);
  VecX ae = A.rows() ? a : VecX(0);
  if (Ge.cols() != n || Ae.cols() != n || he.size() != Ge.rows() || ae.size() != Ae.rows())
    throw std::invalid_argument("solve_lp: inconsistent shapes");
  LPResult res;
  VecX z;
  int pivots = 0;
  const DualOutcome out = dual_tableau(c, Ge, he, Ae, ae, z, pivots);
  res.pivots = pivots;
  if (out == DualOutcome::optimal) {
    res.z = z;
    res.objective = c.dot(z);
    return res;
  }
  if (out == DualOutcome::unbounded) {
    res.status = LPStatus::infeasible;
    return res;
  }
  // dual infeasible: the primal is unbounded or infeasible; a zero objective separates the cases
  VecX z0;
  const DualOutcome feas = dual_tableau(VecX::Zero(n), Ge, he, Ae, ae, z0, pivots);
  res.pivots = pivots;
  res.status = feas == DualOutcome::optimal ? LPStatus::unbounded : LPStatus::infeasible;
  return res;
}

VertexSimplex::VertexSimplex(int n, std::vector<SparseIneq> rows) : n_(n), rows_(std::move(rows)) {
  is_active_.assign(rows_.size(), 0);
}

void VertexSimplex::start(const VecX& z, const std::vector<int>& active) {
  if (static_cast<int>(active.size()) != n_) throw std::invalid_argument("VertexSimplex: active set size");
  z_ = z;
  active_ = active;
  std::fill(is_active_.begin(), is_active_.end(), 0);
  for (int i : active_) is_active_[i] = 1;
  slack_.resize(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) slack_(static_cast<Eigen::Index>(i)) = rows_[i].rhs - rows_[i].dot(z_);
  for (int i : active_) slack_(i) = 0.0;
  refactor();
}

void VertexSimplex::refactor() {
  MatX GA = MatX::Zero(n_, n_);
  for (int k = 0; k < n_; ++k) {
    const auto& r = rows_[active_[k]];
    for (std::size_t t = 0; t < r.idx.size(); ++t) GA(k, r.idx[t]) = r.val[t];
  }
  Eigen::PartialPivLU<MatX> lu(GA);
  binv_ = lu.inverse();
  since_refactor_ = 0;
  // re-solve the vertex from its active rows to shed accumulated drift
  VecX hA(n_);
  for (int k = 0; k < n_; ++k) hA(k) = rows_[active_[k]].rhs;
  z_ = binv_ * hA;
  for (std::size_t i = 0; i < rows_.size(); ++i) slack_(static_cast<Eigen::Index>(i)) = rows_[i].rhs - rows_[i].dot(z_);
  for (int i : active_) slack_(i) = 0.0;
}

LPStatus VertexSimplex::maximize(const VecX& c) {
  const int m = static_cast<int>(rows_.size());
  VecX gd(m);
  int degenerate_run = 0;
  const double ceps = 1e-12 * (1.0 + c.cwiseAbs().maxCoeff());
  for (int guard = 0; guard < 50000; ++guard) {
    // multipliers of the active rows: G_A' y = c
    const VecX y = binv_.transpose() * c;
    const bool bland = degenerate_run > 2 * n_;
    int leave_k = -1;
    double most = -ceps;
    for (int k = 0; k < n_; ++k) {
      if (y(k) >= -ceps) continue;
      if (bland) {
        if (leave_k < 0 || active_[k] < active_[leave_k]) leave_k = k;
      } else if (y(k) < most) {
        most = y(k);
        leave_k = k;
      }
    }
    if (leave_k < 0) return LPStatus::optimal;

    // direction off the leaving row: G_A d = -e_k
    const VecX d = -binv_.col(leave_k);
    const double dscale = d.cwiseAbs().maxCoeff();
    // two-pass (Harris) ratio test: bound the step with slightly relaxed slacks, then pick the
    // blocking row with the largest rate among those within the bound
    const double gtol = 1e-11 * dscale;
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (is_active_[i]) continue;
      const double g = rows_[i].dot(d);
      gd(i) = g;
      if (g <= gtol) continue;
      bound = std::min(bound, (std::max(slack_(i), 0.0) + feas_tol_) / g);
    }
    int enter = -1;
    double step = 0.0;
    double enter_gd = 0.0;
    for (int i = 0; i < m; ++i) {
      if (is_active_[i] || gd(i) <= gtol) continue;
      const double ratio = std::max(slack_(i), 0.0) / gd(i);
      if (ratio > bound) continue;
      if (enter < 0 || gd(i) > enter_gd || (bland && gd(i) == enter_gd && i < enter)) {
        enter = i;
        enter_gd = gd(i);
        step = ratio;
      }
    }
    if (enter < 0) {
      if (since_refactor_ == 0) return LPStatus::unbounded;
      refactor();  // a stale inverse can hide the blocking rows
      continue;
    }

    const int leave_row = active_[leave_k];
    z_ += step * d;
    for (int i = 0; i < m; ++i)
      if (!is_active_[i]) slack_(i) -= step * gd(i);
    slack_(leave_row) = step;
    slack_(enter) = 0.0;
    degenerate_run = step > 0.0 ? 0 : degenerate_run + 1;

    // rank-one update of the inverse for row leave_k replaced by row enter
    const auto& re = rows_[enter];
    VecX gB = VecX::Zero(n_);
    for (std::size_t t = 0; t < re.idx.size(); ++t) gB += re.val[t] * binv_.row(re.idx[t]).transpose();
    gB(leave_k) -= 1.0;  // (g_enter - g_leave)' Binv
    const VecX u = binv_.col(leave_k);
    binv_ -= u * gB.transpose() / (-enter_gd);
    is_active_[leave_row] = 0;
    is_active_[enter] = 1;
    active_[leave_k] = enter;
    ++pivots_;
    if (++since_refactor_ >= 50) refactor();
  }
  return LPStatus::optimal;
}

}  // namespace c2plus
