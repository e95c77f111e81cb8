#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>

namespace c2plus {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// minimize  b'Qb + q'b + sum_i |L_i b + c_i|   subject to  B b = rhs
// Q must be symmetric PSD. The quadratic term carries no factor 1/2.
struct QuadL1Problem {
  MatX Q;
  VecX q;
  SparseRows L;
  VecX c;
  MatX B;    // zero rows when unconstrained
  VecX rhs;

  int dim() const { return static_cast<int>(q.size()); }
  int l1_rows() const { return static_cast<int>(c.size()); }
  bool constrained() const { return B.rows() > 0; }

  static QuadL1Problem unconstrained(MatX Q, VecX q, const MatX& L, VecX c);
  // Throws std::invalid_argument on inconsistent shapes or an indefinite Q.
  void validate() const;
};

double quad_l1_objective(const QuadL1Problem& p, const VecX& beta);

enum class QPStatus { optimal, infeasible, unbounded, iteration_limit };
std::string to_string(QPStatus s);

struct QPSolution {
  VecX beta;
  double objective = 0.0;
  QPStatus status = QPStatus::optimal;
  double kkt_residual = 0.0;
  int iterations = 0;
};

// beta = beta0 + null_basis * z turns the constrained problem into an unconstrained one whose
// objective differs from the original by `offset`.
struct AffineReduction {
  bool feasible = true;
  QuadL1Problem reduced;
  VecX beta0;
  MatX null_basis;
  double offset = 0.0;

  VecX reconstruct(const VecX& z) const { return beta0 + null_basis * z; }
};

AffineReduction eliminate_affine(const QuadL1Problem& p);

struct QPOptions {
  double tol = 1e-6;
  int max_iter = 100000;
};

// Primal-dual interior point method on the epigraph form of the l1 terms.
QPSolution solve_quad_l1(const QuadL1Problem& p, const QPOptions& opt = {});

// Exact minimizer by enumerating the sign state (+, -, 0) of every l1 row and solving the
// equality-constrained KKT system of each state. Intended for small instances only.
QPSolution solve_kkt_enumeration(const QuadL1Problem& p, int d_max = 8);

}  // namespace c2plus
