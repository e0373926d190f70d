#pragma once
// Quadrature rules, difference stencils and symmetric-definite generalized
// eigensolvers.  Everything here is a pure function of its inputs.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace wspectra::numlin {

using SpMat = Eigen::SparseMatrix<double>;

// Symmetric band matrix stored by diagonals: diagonal j holds A(i, i+j).
class BandedSym {
 public:
  BandedSym(int order, int bandwidth);

  int order() const { return n_; }
  int bandwidth() const { return p_; }

  double get(int i, int j) const;
  void set(int i, int j, double v);
  void add(int i, int j, double v);

  Eigen::MatrixXd dense() const;
  SpMat sparse() const;

  // Rejects matrices whose asymmetry exceeds rel_tol * max|entry|.
  static BandedSym from_dense(const Eigen::MatrixXd& m, double rel_tol = 1e-12);
  static BandedSym from_sparse(const SpMat& m, double rel_tol = 1e-12);

 private:
  int n_, p_;
  std::vector<double> diag_;
};

struct EigReport {
  std::vector<double> eigenvalues;     // ascending
  std::vector<double> residual_norms;  // ||Av - lambda Bv|| / ((||A|| + |lambda| ||B||) ||v||)
  std::vector<bool> converged;
  Eigen::MatrixXd vectors;             // columns, B-normalized

  bool all_converged() const;
};

// Which matrix of the pencil is Cholesky-reduced.  Reducing A (when it is
// positive definite) computes the smallest eigenvalues as reciprocals of the
// largest ones of the swapped pencil, which keeps them accurate when B is
// strongly graded.
enum class Reduce { B, A };

struct EigOptions {
  double tol = 1e-9;
  Reduce reduce = Reduce::B;
  int dense_limit = 800;  // sparse pencils above this order go to Lanczos
  bool want_vectors = true;
};

// k smallest eigenvalues of A v = lambda B v.
EigReport solve_geneig_sym(const BandedSym& A, const BandedSym& B, int k, double tol = 1e-9);
EigReport solve_geneig_sym(const BandedSym& A, const BandedSym& B, int k, const EigOptions& opt);
EigReport solve_geneig_dense(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k,
                             const EigOptions& opt = {});
// Shift-invert Lanczos with full reorthogonalisation above opt.dense_limit,
// dense reduction below it.
EigReport solve_geneig_sparse(const SpMat& A, const SpMat& B, int k, const EigOptions& opt = {});

struct UniformGrid {
  double lo = 0.0, hi = 1.0;
  int nodes = 3;
  double h() const { return (hi - lo) / (nodes - 1); }
  double node(int i) const { return lo + i * h(); }
};

enum class Rule { trapezoid, simpson };
std::vector<double> quadrature_weights(const UniformGrid& grid, Rule rule);

enum class Deriv { first, second };
// Central second-order stencils inside, one-sided second-order at the ends.
SpMat stencil_matrix(Deriv kind, int nodes, double h);
std::vector<double> stencil_apply(Deriv kind, const UniformGrid& grid, const std::vector<double>& values);

SpMat diagonal(const std::vector<double>& d);
SpMat identity(int n);

}  // namespace wspectra::numlin
