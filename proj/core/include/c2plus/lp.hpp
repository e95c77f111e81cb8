#pragma once

#include "c2plus/qp_solver.hpp"

#include <string>
#include <vector>

namespace c2plus {

enum class LPStatus { optimal, infeasible, unbounded };
std::string to_string(LPStatus s);

struct LPResult {
  LPStatus status = LPStatus::optimal;
  VecX z;
  double objective = 0.0;
  int pivots = 0;
};

// maximize c'z subject to G z <= h, A z = a, z free.
// Dense two-phase tableau simplex with Bland's rule, run on the dual standard form.
LPResult solve_lp(const VecX& c, const MatX& G, const VecX& h, const MatX& A = MatX(), const VecX& a = VecX());

// One inequality row g . z <= h with few nonzeros.
struct SparseIneq {
  std::vector<int> idx;
  std::vector<double> val;
  double rhs = 0.0;
  double dot(const VecX& z) const {
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * z(idx[k]);
    return s;
  }
};

// Primal simplex over vertices of {z : G z <= h}. Keeps its current vertex between calls so a
// sequence of objectives over the same polytope is warm-started.
class VertexSimplex {
 public:
  VertexSimplex(int n, std::vector<SparseIneq> rows);

  // z must be feasible and the listed rows must be tight at z and linearly independent.
  void start(const VecX& z, const std::vector<int>& active);

  LPStatus maximize(const VecX& c);

  const VecX& point() const { return z_; }
  double value(const VecX& c) const { return c.dot(z_); }
  int pivots() const { return pivots_; }

 private:
  void refactor();

  int n_;
  std::vector<SparseIneq> rows_;
  VecX z_;
  VecX slack_;
  std::vector<int> active_;
  std::vector<char> is_active_;
  MatX binv_;
  int pivots_ = 0;
  int since_refactor_ = 0;
  double feas_tol_ = 1e-12;
};

}  // namespace c2plus
