#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wspectra/errors.hpp"
#include "wspectra/numlin.hpp"

using namespace wspectra;
using namespace wspectra::numlin;

TEST_CASE("simpson weights integrate cubics exactly, trapezoid integrates lines") {
  const UniformGrid g{0.0, 2.0, 9};
  const auto ws = quadrature_weights(g, Rule::simpson);
  const auto wt = quadrature_weights(g, Rule::trapezoid);
  double cubic = 0.0, line = 0.0;
  for (int i = 0; i < g.nodes; ++i) {
    const double x = g.node(i);
    cubic += ws[i] * (x * x * x - x + 1.0);
    line += wt[i] * (3.0 * x - 1.0);
  }
  CHECK(cubic == doctest::Approx(4.0 - 2.0 + 2.0).epsilon(1e-13));
  CHECK(line == doctest::Approx(6.0 - 2.0).epsilon(1e-13));
  CHECK_THROWS_AS(quadrature_weights(UniformGrid{0.0, 1.0, 8}, Rule::simpson), Error);
  CHECK_THROWS_AS(quadrature_weights(UniformGrid{0.0, 1.0, 2}, Rule::trapezoid), Error);
}

TEST_CASE("second-order stencils are exact on quadratics, ends included") {
  const UniformGrid g{-1.0, 1.0, 21};
  std::vector<double> v(g.nodes);
  for (int i = 0; i < g.nodes; ++i) v[i] = 2.0 * g.node(i) * g.node(i) - g.node(i);
  const auto d1 = stencil_apply(Deriv::first, g, v);
  const auto d2 = stencil_apply(Deriv::second, g, v);
  for (int i = 0; i < g.nodes; ++i) {
    CHECK(d1[i] == doctest::Approx(4.0 * g.node(i) - 1.0).epsilon(1e-10));
    CHECK(d2[i] == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("banded storage is symmetric and rejects asymmetric input") {
  BandedSym b(5, 2);
  b.set(0, 2, 3.0);
  b.add(2, 0, 1.0);
  CHECK(b.get(2, 0) == 4.0);
  CHECK(b.get(0, 2) == 4.0);
  CHECK(b.get(0, 4) == 0.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(BandedSym::from_dense(m), Error);
  m(1, 0) = 1.0;
  const auto s = BandedSym::from_dense(m);
  CHECK(s.bandwidth() == 1);
  CHECK((s.dense() - m).norm() == 0.0);
}

TEST_CASE("generalized eigenvalues of a diagonal pencil") {
  Eigen::MatrixXd A = Eigen::Vector3d(6.0, 2.0, 9.0).asDiagonal();
  Eigen::MatrixXd B = Eigen::Vector3d(2.0, 1.0, 3.0).asDiagonal();
  const auto r = solve_geneig_dense(A, B, 3);
  REQUIRE(r.eigenvalues.size() == 3);
  CHECK(r.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(3.0));
  CHECK(r.eigenvalues[2] == doctest::Approx(3.0));
  CHECK(r.all_converged());
}

TEST_CASE("Lanczos on a large path Laplacian matches the closed-form spectrum") {
  const int n = 1200;  // above the dense limit
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  const auto r = solve_geneig_sparse(A, identity(n), 4);
  REQUIRE(r.all_converged());
  for (int k = 1; k <= 4; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1));
    CHECK(r.eigenvalues[k - 1] == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("banded and dense paths agree, and vectors are B-normalized") {
  const int n = 40;
  BandedSym A(n, 1), B(n, 0);
  for (int i = 0; i < n; ++i) {
    A.set(i, i, 2.0 + 0.01 * i);
    if (i + 1 < n) A.set(i, i + 1, -1.0);
    B.set(i, i, 1.0 + 0.5 * std::sin(i));
  }
  const auto r1 = solve_geneig_sym(A, B, 3);
  const auto r2 = solve_geneig_dense(A.dense(), B.dense(), 3);
  for (int k = 0; k < 3; ++k) CHECK(r1.eigenvalues[k] == doctest::Approx(r2.eigenvalues[k]).epsilon(1e-10));
  const Eigen::VectorXd v = r1.vectors.col(0);
  CHECK(v.dot(B.dense() * v) == doctest::Approx(1.0).epsilon(1e-10));
}
