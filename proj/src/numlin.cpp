#include "wspectra/numlin.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>

#include "wspectra/errors.hpp"

namespace wspectra {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::SingularAtOrigin: return "SingularAtOrigin";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::FluxNotZero: return "FluxNotZero";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::BadT: return "BadT";
    case ErrorCode::NegativeModes: return "NegativeModes";
    case ErrorCode::HypothesisFails: return "HypothesisFails";
    case ErrorCode::MeasureMismatch: return "MeasureMismatch";
    case ErrorCode::BadMode: return "BadMode";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::BadBeta: return "BadBeta";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::InadmissibleL: return "InadmissibleL";
    case ErrorCode::SourceSingular: return "SourceSingular";
    case ErrorCode::BadParam: return "BadParam";
    case ErrorCode::NotConformal: return "NotConformal";
    case ErrorCode::CenterOnSurface: return "CenterOnSurface";
    case ErrorCode::ContourOutOfChart: return "ContourOutOfChart";
    case ErrorCode::OpenSurfaceWithoutClamp: return "OpenSurfaceWithoutClamp";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RingOutOfChart: return "RingOutOfChart";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace wspectra

namespace wspectra::numlin {

BandedSym::BandedSym(int order, int bandwidth) : n_(order), p_(bandwidth) {
  if (order < 1 || bandwidth < 0 || bandwidth > order - 1)
    throw Error(ErrorCode::BadParam, "band shape");
  diag_.assign(static_cast<std::size_t>(n_) * (p_ + 1), 0.0);
}

double BandedSym::get(int i, int j) const {
  if (i > j) std::swap(i, j);
  const int d = j - i;
  if (d > p_) return 0.0;
  return diag_[static_cast<std::size_t>(d) * n_ + i];
}

void BandedSym::set(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  const int d = j - i;
  if (d > p_) throw Error(ErrorCode::BadParam, "entry outside band");
  diag_[static_cast<std::size_t>(d) * n_ + i] = v;
}

void BandedSym::add(int i, int j, double v) { set(i, j, get(i, j) + v); }

Eigen::MatrixXd BandedSym::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int d = 0; d <= p_; ++d)
    for (int i = 0; i + d < n_; ++i) {
      const double v = diag_[static_cast<std::size_t>(d) * n_ + i];
      m(i, i + d) = v;
      m(i + d, i) = v;
    }
  return m;
}

SpMat BandedSym::sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  for (int d = 0; d <= p_; ++d)
    for (int i = 0; i + d < n_; ++i) {
      const double v = diag_[static_cast<std::size_t>(d) * n_ + i];
      if (v == 0.0) continue;
      t.emplace_back(i, i + d, v);
      if (d) t.emplace_back(i + d, i, v);
    }
  SpMat m(n_, n_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

BandedSym BandedSym::from_dense(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(ErrorCode::ShapeMismatch, "square matrix expected");
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale)
        throw Error(ErrorCode::BadParam, "matrix not symmetric");
      if (m(i, j) != 0.0 || m(j, i) != 0.0) p = std::max(p, j - i);
    }
  BandedSym b(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = i; j <= std::min(n - 1, i + p); ++j) b.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return b;
}

BandedSym BandedSym::from_sparse(const SpMat& m, double rel_tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeMismatch, "square matrix expected");
  const int n = static_cast<int>(m.rows());
  double scale = 1e-300;
  int p = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
      p = std::max(p, static_cast<int>(std::abs(it.row() - it.col())));
    }
  SpMat asym = m - SpMat(m.transpose());
  for (int k = 0; k < asym.outerSize(); ++k)
    for (SpMat::InnerIterator it(asym, k); it; ++it)
      if (std::abs(it.value()) > rel_tol * scale) throw Error(ErrorCode::BadParam, "matrix not symmetric");
  BandedSym b(n, std::min(p, n - 1));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (it.row() <= it.col()) b.set(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  return b;
}

bool EigReport::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

namespace {

template <class Mat>
double inf_norm(const Mat& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  if constexpr (std::is_same_v<Mat, SpMat>) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
  } else {
    rows = m.cwiseAbs().rowwise().sum();
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

template <class Mat>
void fill_residuals(const Mat& A, const Mat& B, EigReport& rep, double tol) {
  const double na = inf_norm(A), nb = inf_norm(B);
  const int k = static_cast<int>(rep.eigenvalues.size());
  rep.residual_norms.assign(k, 0.0);
  rep.converged.assign(k, false);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd v = rep.vectors.col(i);
    const double lam = rep.eigenvalues[i];
    const Eigen::VectorXd r = A * v - lam * (B * v);
    const double denom = (na + std::abs(lam) * nb) * std::max(v.norm(), 1e-300);
    rep.residual_norms[i] = r.norm() / std::max(denom, 1e-300);
    rep.converged[i] = std::isfinite(rep.residual_norms[i]) && rep.residual_norms[i] <= tol;
  }
}

}  // namespace

EigReport solve_geneig_dense(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k, const EigOptions& opt) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw Error(ErrorCode::ShapeMismatch, "pencil shapes differ");
  if (k < 1 || k > n) throw Error(ErrorCode::BadParam, "k out of range");

  const Eigen::MatrixXd& F = opt.reduce == Reduce::B ? B : A;  // factored
  const Eigen::MatrixXd& G = opt.reduce == Reduce::B ? A : B;
  // Symmetric diagonal equilibration: a congruence, so the spectrum is unchanged.
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    if (!(F(i, i) > 0.0))
      throw Error(ErrorCode::NotPositiveDefinite, opt.reduce == Reduce::B ? "B diagonal" : "A diagonal");
    d(i) = 1.0 / std::sqrt(F(i, i));
  }
  const Eigen::MatrixXd Fs = d.asDiagonal() * F * d.asDiagonal();
  Eigen::MatrixXd Gs = d.asDiagonal() * G * d.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(Fs);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
  const auto L = llt.matrixL();
  Eigen::MatrixXd C = L.solve(Gs);
  C = L.solve(C.transpose()).transpose();
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "dense eigensolver");

  EigReport rep;
  rep.eigenvalues.resize(k);
  rep.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    int col;
    double lam;
    if (opt.reduce == Reduce::B) {
      col = i;
      lam = es.eigenvalues()(col);
    } else {
      col = n - 1 - i;
      const double mu = es.eigenvalues()(col);
      lam = mu != 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
    }
    rep.eigenvalues[i] = lam;
    Eigen::VectorXd y = es.eigenvectors().col(col);
    Eigen::VectorXd x = d.asDiagonal() * Eigen::VectorXd(L.transpose().solve(y));
    const double bn = std::sqrt(std::max(x.dot(B * x), 1e-300));
    rep.vectors.col(i) = x / bn;
  }
  if (opt.reduce == Reduce::A) {
    // Reciprocals of a descending list come out ascending, except for sign
    // changes; enforce the contract explicitly.
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return rep.eigenvalues[a] < rep.eigenvalues[b]; });
    EigReport s;
    s.vectors.resize(n, k);
    for (int i = 0; i < k; ++i) {
      s.eigenvalues.push_back(rep.eigenvalues[idx[i]]);
      s.vectors.col(i) = rep.vectors.col(idx[i]);
    }
    rep = std::move(s);
  }
  fill_residuals(A, B, rep, opt.tol);
  if (!opt.want_vectors) rep.vectors.resize(0, 0);
  return rep;
}

EigReport solve_geneig_sym(const BandedSym& A, const BandedSym& B, int k, double tol) {
  EigOptions opt;
  opt.tol = tol;
  return solve_geneig_sym(A, B, k, opt);
}

EigReport solve_geneig_sym(const BandedSym& A, const BandedSym& B, int k, const EigOptions& opt) {
  if (A.order() != B.order()) throw Error(ErrorCode::ShapeMismatch, "pencil orders differ");
  return solve_geneig_dense(A.dense(), B.dense(), k, opt);
}

namespace {

using LDLT = Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>;

int negative_pivots(const LDLT& f) {
  const Eigen::VectorXd D = f.vectorD();
  int c = 0;
  for (int i = 0; i < D.size(); ++i) c += D(i) < 0.0;
  return c;
}

}  // namespace

EigReport solve_geneig_sparse(const SpMat& A, const SpMat& B, int k, const EigOptions& opt) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw Error(ErrorCode::ShapeMismatch, "pencil shapes differ");
  if (k < 1 || k > n) throw Error(ErrorCode::BadParam, "k out of range");
  if (n <= opt.dense_limit) return solve_geneig_dense(Eigen::MatrixXd(A), Eigen::MatrixXd(B), k, opt);

  {
    LDLT fb(B);
    if (fb.info() != Eigen::Success || negative_pivots(fb) > 0 || fb.vectorD().minCoeff() <= 0.0)
      throw Error(ErrorCode::NotPositiveDefinite, "B factorization failed");
  }

  // Shift below the spectrum: the inertia of A - sigma B counts eigenvalues
  // under sigma (Sylvester), so move sigma down until none remain.
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(A.coeff(i, i)) / B.coeff(i, i));
  double sigma = -1e-12 * std::max(scale, 1e-300);
  LDLT fac;
  for (int attempt = 0;; ++attempt) {
    SpMat S = A - sigma * B;
    fac.compute(S);
    if (fac.info() == Eigen::Success && negative_pivots(fac) == 0) break;
    if (attempt > 60) throw Error(ErrorCode::NoConvergence, "no shift below the spectrum");
    sigma *= 4.0;
  }

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  int m = std::min(n, std::max(2 * k + 40, 80));
  for (;;) {
    Eigen::MatrixXd V(n, m + 1);
    Eigen::VectorXd alpha(m), beta(m);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    v /= std::sqrt(v.dot(B * v));
    V.col(0) = v;
    int steps = m;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w = fac.solve(B * V.col(j));
      alpha(j) = w.dot(B * V.col(j));
      // full B-orthogonalisation, twice
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd Bw = B * w;
        const Eigen::VectorXd c = V.leftCols(j + 1).transpose() * Bw;
        w -= V.leftCols(j + 1) * c;
      }
      const double b = std::sqrt(std::max(w.dot(B * w), 0.0));
      beta(j) = b;
      if (b < 1e-14 * std::abs(alpha(j)) || j + 1 == m) {
        steps = j + 1;
        break;
      }
      V.col(j + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int j = 0; j < steps; ++j) {
      T(j, j) = alpha(j);
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int kk = std::min(k, steps);
    EigReport rep;
    rep.vectors.resize(n, kk);
    for (int i = 0; i < kk; ++i) {
      const int col = steps - 1 - i;  // largest theta <-> eigenvalue nearest sigma from above
      const double theta = es.eigenvalues()(col);
      rep.eigenvalues.push_back(sigma + 1.0 / theta);
      Eigen::VectorXd x = V.leftCols(steps) * es.eigenvectors().col(col);
      rep.vectors.col(i) = x / std::sqrt(std::max(x.dot(B * x), 1e-300));
    }
    fill_residuals(A, B, rep, opt.tol);
    if (kk == k && rep.all_converged()) {
      if (!opt.want_vectors) rep.vectors.resize(0, 0);
      return rep;
    }
    if (m >= n || m >= 3000) {
      if (!opt.want_vectors) rep.vectors.resize(0, 0);
      throw Error(ErrorCode::NoConvergence, "Lanczos residuals above tolerance");
    }
    m = std::min(n, 2 * m);
  }
}

std::vector<double> quadrature_weights(const UniformGrid& grid, Rule rule) {
  const int n = grid.nodes;
  if (n < 3) throw Error(ErrorCode::BadGrid, "need at least 3 nodes");
  if (!(grid.hi > grid.lo)) throw Error(ErrorCode::BadGrid, "empty interval");
  const double h = grid.h();
  std::vector<double> w(n, h);
  if (rule == Rule::trapezoid) {
    w.front() = w.back() = 0.5 * h;
    return w;
  }
  if (n % 2 == 0) throw Error(ErrorCode::BadGrid, "simpson needs an odd node count");
  for (int i = 0; i < n; ++i) w[i] = h / 3.0 * (i == 0 || i == n - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0));
  return w;
}

SpMat stencil_matrix(Deriv kind, int n, double h) {
  if (n < 4) throw Error(ErrorCode::BadGrid, "stencil needs at least 4 nodes");
  std::vector<Eigen::Triplet<double>> t;
  if (kind == Deriv::first) {
    const double c = 1.0 / (2.0 * h);
    t.emplace_back(0, 0, -3 * c);
    t.emplace_back(0, 1, 4 * c);
    t.emplace_back(0, 2, -c);
    for (int i = 1; i < n - 1; ++i) {
      t.emplace_back(i, i - 1, -c);
      t.emplace_back(i, i + 1, c);
    }
    t.emplace_back(n - 1, n - 1, 3 * c);
    t.emplace_back(n - 1, n - 2, -4 * c);
    t.emplace_back(n - 1, n - 3, c);
  } else {
    const double c = 1.0 / (h * h);
    const double ends[4] = {2, -5, 4, -1};
    for (int j = 0; j < 4; ++j) {
      t.emplace_back(0, j, ends[j] * c);
      t.emplace_back(n - 1, n - 1 - j, ends[j] * c);
    }
    for (int i = 1; i < n - 1; ++i) {
      t.emplace_back(i, i - 1, c);
      t.emplace_back(i, i, -2 * c);
      t.emplace_back(i, i + 1, c);
    }
  }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<double> stencil_apply(Deriv kind, const UniformGrid& grid, const std::vector<double>& values) {
  if (grid.nodes < 5 || static_cast<int>(values.size()) != grid.nodes || !(grid.hi > grid.lo))
    throw Error(ErrorCode::BadGrid, "stencil needs a uniform grid with at least 5 nodes");
  const SpMat D = stencil_matrix(kind, grid.nodes, grid.h());
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), grid.nodes);
  const Eigen::VectorXd r = D * v;
  return {r.data(), r.data() + r.size()};
}

SpMat diagonal(const std::vector<double>& d) {
  SpMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < static_cast<int>(d.size()); ++i) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

}  // namespace wspectra::numlin
