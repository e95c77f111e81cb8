#include "c2plus/qp_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace c2plus {

QuadL1Problem QuadL1Problem::unconstrained(MatX Q, VecX q, const MatX& L, VecX c) {
  QuadL1Problem p;
  p.Q = std::move(Q);
  p.q = std::move(q);
  p.L = L.sparseView();
  p.c = std::move(c);
  p.B = MatX(0, p.q.size());
  p.rhs = VecX(0);
  return p;
}

void QuadL1Problem::validate() const {
  const int d = dim();
  if (Q.rows() != d || Q.cols() != d) throw std::invalid_argument("QuadL1Problem: Q shape");
  if (L.cols() != d && L.rows() > 0) throw std::invalid_argument("QuadL1Problem: L shape");
  if (L.rows() != c.size()) throw std::invalid_argument("QuadL1Problem: L/c mismatch");
  if (B.rows() > 0 && B.cols() != d) throw std::invalid_argument("QuadL1Problem: B shape");
  if (B.rows() != rhs.size()) throw std::invalid_argument("QuadL1Problem: B/rhs mismatch");
  if (d == 0) return;
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("QuadL1Problem: Q not symmetric");
  const double lo = Eigen::SelfAdjointEigenSolver<MatX>(Q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lo < -1e-10 * (1.0 + Q.norm())) throw std::invalid_argument("QuadL1Problem: Q not PSD");
}

double quad_l1_objective(const QuadL1Problem& p, const VecX& beta) {
  double v = beta.dot(p.Q * beta) + p.q.dot(beta);
  if (p.l1_rows() > 0) v += (p.L * beta + p.c).cwiseAbs().sum();
  return v;
}

std::string to_string(QPStatus s) {
  switch (s) {
    case QPStatus::optimal: return "optimal";
    case QPStatus::infeasible: return "infeasible";
    case QPStatus::unbounded: return "unbounded";
    case QPStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

AffineReduction eliminate_affine(const QuadL1Problem& p) {
  AffineReduction r;
  const int d = p.dim();
  if (!p.constrained()) {
    r.reduced = p;
    r.beta0 = VecX::Zero(d);
    r.null_basis = MatX::Identity(d, d);
    return r;
  }
  Eigen::JacobiSVD<MatX> svd(p.B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VecX& sv = svd.singularValues();
  const double cut = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0) * std::max(p.B.rows(), p.B.cols());
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  VecX beta0 = VecX::Zero(d);
  const MatX& U = svd.matrixU();
  const MatX& V = svd.matrixV();
  for (int i = 0; i < rank; ++i) beta0 += V.col(i) * (U.col(i).dot(p.rhs) / sv(i));
  const double resid = (p.B * beta0 - p.rhs).norm();
  r.beta0 = beta0;
  r.null_basis = V.rightCols(d - rank);
  if (resid > 1e-9 * (1.0 + p.rhs.norm())) {
    r.feasible = false;
    return r;
  }
  const MatX& N = r.null_basis;
  QuadL1Problem red;
  red.Q = N.transpose() * p.Q * N;
  red.Q = 0.5 * (red.Q + red.Q.transpose());
  red.q = N.transpose() * (p.q + 2.0 * p.Q * beta0);
  if (p.l1_rows() > 0) {
    red.L = (MatX(p.L) * N).sparseView();
    red.c = p.c + p.L * beta0;
  } else {
    red.L = SparseRows(0, N.cols());
    red.c = VecX(0);
  }
  red.B = MatX(0, N.cols());
  red.rhs = VecX(0);
  r.offset = beta0.dot(p.Q * beta0) + p.q.dot(beta0);
  r.reduced = std::move(red);
  return r;
}

namespace {

struct IpmResult {
  VecX z;
  QPStatus status = QPStatus::optimal;
  double residual = 0.0;
  int iterations = 0;
};

double max_step(const VecX& v, const VecX& dv) {
  double a = 1.0;
  for (int i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

// Unconstrained: min z'Qz + q'z + sum |A z + c| with all rows of A nonzero.
IpmResult ipm(const MatX& Q, const VecX& q, const SparseRows& A, const VecX& c, const QPOptions& opt) {
  const int n = static_cast<int>(q.size());
  const int m = static_cast<int>(c.size());
  IpmResult res;
  res.z = VecX::Zero(n);
  if (n == 0) return res;

  if (m == 0) {
    Eigen::LDLT<MatX> ldlt(2.0 * Q);
    res.z = ldlt.solve(-q);
    const double r = (2.0 * Q * res.z + q).norm();
    res.residual = r / (1.0 + q.norm());
    if (!res.z.allFinite() || res.residual > opt.tol) res.status = QPStatus::unbounded;
    return res;
  }

  VecX z = VecX::Zero(n);
  VecX r = A * z + c;
  VecX t = r.cwiseAbs().array() + 1.0 + r.cwiseAbs().array();
  VecX l1 = VecX::Constant(m, 0.5), l2 = VecX::Constant(m, 0.5);
  VecX s1(m), s2(m), D1(m), D2(m), S(m), dl(m), W(m), g1(m), g2(m), h(m);
  VecX dz(n), Adz(m), dt(m), ds1(m), ds2(m), dl1(m), dl2(m);
  MatX H(n, n);
  const double qscale = 1.0 + q.cwiseAbs().maxCoeff() + Q.cwiseAbs().maxCoeff();
  double best_obj = std::numeric_limits<double>::infinity();
  VecX best_z = z;
  double best_res = std::numeric_limits<double>::infinity();
  int stall = 0;

  const int cap = std::min(opt.max_iter, 500);
  for (int it = 0; it < cap; ++it) {
    res.iterations = it + 1;
    s1 = t - r;
    s2 = t + r;
    const VecX w = l1 - l2;
    const VecX rz = 2.0 * Q * z + q + A.transpose() * w;
    const VecX rt = VecX::Ones(m) - l1 - l2;
    const double comp = l1.dot(s1) + l2.dot(s2);
    const double mu = comp / (2.0 * m);
    const double obj = z.dot(Q * z) + q.dot(z) + r.cwiseAbs().sum();
    // dual value at w when the stationarity residual vanishes
    const double dual = w.dot(c) - z.dot(Q * z);
    const double gap = std::max(obj - dual, comp);
    const double rel = std::max(gap / (1.0 + std::abs(obj)), rz.cwiseAbs().maxCoeff() / qscale);
    if (obj < best_obj - 1e-15 * std::abs(obj) || rel < best_res) {
      if (rel < best_res) best_res = rel;
      if (obj < best_obj) {
        best_obj = obj;
        best_z = z;
      }
      stall = 0;
    } else if (++stall > 40) {
      break;
    }
    if (rel <= opt.tol * 1e-2) {
      res.z = z;
      res.residual = rel;
      res.status = QPStatus::optimal;
      return res;
    }
    if (!z.allFinite() || z.cwiseAbs().maxCoeff() > 1e15) {
      res.z = best_z;
      res.status = QPStatus::unbounded;
      res.residual = rel;
      return res;
    }

    D1 = l1.cwiseQuotient(s1);
    D2 = l2.cwiseQuotient(s2);
    S = D1 + D2;
    dl = D1 - D2;
    W = (4.0 * D1.cwiseProduct(D2)).cwiseQuotient(S);

    H = 2.0 * Q;
    for (int i = 0; i < m; ++i) {
      const double wi = W(i);
      for (SparseRows::InnerIterator a(A, i); a; ++a)
        for (SparseRows::InnerIterator b(A, i); b; ++b) H(a.col(), b.col()) += wi * a.value() * b.value();
    }
    const double reg = 1e-14 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += reg;
    Eigen::LLT<MatX> llt(H);
    Eigen::LDLT<MatX> ldlt;
    const bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) ldlt.compute(H);

    auto direction = [&](const VecX& gg1, const VecX& gg2) {
      h = (gg1 - gg2) - dl.cwiseProduct(gg1 + gg2 - rt).cwiseQuotient(S);
      const VecX rhs = -rz - A.transpose() * h;
      if (use_llt)
        dz = llt.solve(rhs);
      else
        dz = ldlt.solve(rhs);
      Adz = A * dz;
      dt = (gg1 + gg2 - rt).cwiseQuotient(S) + dl.cwiseQuotient(S).cwiseProduct(Adz);
      ds1 = dt - Adz;
      ds2 = dt + Adz;
      dl1 = gg1 - D1.cwiseProduct(ds1);
      dl2 = gg2 - D2.cwiseProduct(ds2);
    };

    // predictor
    g1 = -l1;
    g2 = -l2;
    direction(g1, g2);
    double a_aff = std::min({max_step(s1, ds1), max_step(s2, ds2), max_step(l1, dl1), max_step(l2, dl2)});
    const double mu_aff = ((s1 + a_aff * ds1).dot(l1 + a_aff * dl1) + (s2 + a_aff * ds2).dot(l2 + a_aff * dl2)) / (2.0 * m);
    const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);

    // corrector
    g1 = (VecX::Constant(m, sigma * mu) - ds1.cwiseProduct(dl1)).cwiseQuotient(s1) - l1;
    g2 = (VecX::Constant(m, sigma * mu) - ds2.cwiseProduct(dl2)).cwiseQuotient(s2) - l2;
    direction(g1, g2);
    const double amax = std::min({max_step(s1, ds1), max_step(s2, ds2), max_step(l1, dl1), max_step(l2, dl2)});
    const double alpha = std::min(1.0, 0.995 * amax);
    z += alpha * dz;
    t += alpha * dt;
    l1 += alpha * dl1;
    l2 += alpha * dl2;
    r = A * z + c;
    // keep strict interiority against rounding
    for (int i = 0; i < m; ++i) {
      const double floor_t = std::abs(r(i)) * (1.0 + 1e-15) + 1e-300;
      if (t(i) <= floor_t) t(i) = floor_t;
      l1(i) = std::max(l1(i), 1e-300);
      l2(i) = std::max(l2(i), 1e-300);
    }
  }
  res.z = best_z;
  res.residual = best_res;
  res.status = best_res <= opt.tol ? QPStatus::optimal : QPStatus::iteration_limit;
  return res;
}

}  // namespace

QPSolution solve_quad_l1(const QuadL1Problem& p, const QPOptions& opt) {
  QPSolution sol;
  const AffineReduction red = eliminate_affine(p);
  if (!red.feasible) {
    sol.status = QPStatus::infeasible;
    sol.beta = red.beta0;
    sol.objective = std::numeric_limits<double>::infinity();
    return sol;
  }
  const QuadL1Problem& u = red.reduced;
  const int n = u.dim();

  // split off zero rows: they contribute constants only
  std::vector<int> keep;
  for (int i = 0; i < u.l1_rows(); ++i)
    if (u.L.row(i).nonZeros() > 0 && u.L.row(i).cwiseAbs().sum() > 0.0) keep.push_back(i);
  SparseRows A(static_cast<Eigen::Index>(keep.size()), n);
  VecX c(static_cast<Eigen::Index>(keep.size()));
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      for (SparseRows::InnerIterator it(u.L, keep[k]); it; ++it)
        if (it.value() != 0.0) trip.emplace_back(static_cast<int>(k), it.col(), it.value());
      c(static_cast<Eigen::Index>(k)) = u.c(keep[k]);
    }
    A.setFromTriplets(trip.begin(), trip.end());
  }

  const IpmResult r = ipm(u.Q, u.q, A, c, opt);
  sol.beta = red.reconstruct(r.z);
  sol.objective = quad_l1_objective(p, sol.beta);
  sol.status = r.status;
  sol.kkt_residual = r.residual;
  sol.iterations = r.iterations;
  return sol;
}

QPSolution solve_kkt_enumeration(const QuadL1Problem& p, int d_max) {
  const int d = p.dim();
  if (d > d_max) throw std::invalid_argument("solve_kkt_enumeration: dimension exceeds d_max");
  const int m = p.l1_rows();
  if (m > 13) throw std::invalid_argument("solve_kkt_enumeration: too many l1 rows");
  const MatX L = MatX(p.L);
  const int j = static_cast<int>(p.B.rows());

  QPSolution best;
  best.status = QPStatus::infeasible;
  best.objective = std::numeric_limits<double>::infinity();
  best.beta = VecX::Zero(d);

  long total = 1;
  for (int i = 0; i < m; ++i) total *= 3;
  std::vector<int> state(m);
  const double scale = 1.0 + p.Q.cwiseAbs().sum() + p.q.cwiseAbs().sum() + L.cwiseAbs().sum() + p.c.cwiseAbs().sum() +
                       p.B.cwiseAbs().sum() + p.rhs.cwiseAbs().sum();
  const double tol = 1e-9 * scale;

  for (long code = 0; code < total; ++code) {
    long rem = code;
    int zeros = 0;
    for (int i = 0; i < m; ++i) {
      state[i] = static_cast<int>(rem % 3);  // 0: row = 0, 1: row >= 0, 2: row <= 0
      rem /= 3;
      if (state[i] == 0) ++zeros;
    }
    if (zeros + j > d) continue;
    VecX lin = p.q;
    for (int i = 0; i < m; ++i) {
      if (state[i] == 1) lin += L.row(i).transpose();
      if (state[i] == 2) lin -= L.row(i).transpose();
    }
    const int k = zeros + j;
    MatX K = MatX::Zero(d + k, d + k);
    VecX rhs = VecX::Zero(d + k);
    K.topLeftCorner(d, d) = 2.0 * p.Q;
    rhs.head(d) = -lin;
    int row = d;
    std::vector<int> zero_rows;
    for (int i = 0; i < m; ++i) {
      if (state[i] != 0) continue;
      K.block(row, 0, 1, d) = L.row(i);
      K.block(0, row, d, 1) = L.row(i).transpose();
      rhs(row) = -p.c(i);
      zero_rows.push_back(i);
      ++row;
    }
    for (int e = 0; e < j; ++e) {
      K.block(row, 0, 1, d) = p.B.row(e);
      K.block(0, row, d, 1) = p.B.row(e).transpose();
      rhs(row) = p.rhs(e);
      ++row;
    }
    Eigen::CompleteOrthogonalDecomposition<MatX> cod(K);
    const VecX sol = cod.solve(rhs);
    if (!sol.allFinite() || (K * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    const VecX beta = sol.head(d);
    bool consistent = true;
    for (int i = 0; i < m && consistent; ++i) {
      const double v = L.row(i).dot(beta) + p.c(i);
      if (state[i] == 1 && v < -tol) consistent = false;
      if (state[i] == 2 && v > tol) consistent = false;
    }
    if (!consistent) continue;
    const double obj = quad_l1_objective(p, beta);
    if (obj < best.objective - 1e-12 * (1.0 + std::abs(obj))) {
      best.objective = obj;
      best.beta = beta;
      best.status = QPStatus::optimal;
      // multipliers of the kink rows must lie in [-1, 1]
      double viol = 0.0;
      for (std::size_t z = 0; z < zero_rows.size(); ++z)
        viol = std::max(viol, std::abs(sol(d + static_cast<Eigen::Index>(z))) - 1.0);
      best.kkt_residual = std::max(0.0, viol);
    }
  }
  return best;
}

}  // namespace c2plus
