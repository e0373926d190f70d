// Galerkin assembly of the Willmore second variation on a chart grid.

#include "wspectra/willmore_hessian.hpp"

#include <algorithm>
#include <cmath>

#include "wspectra/errors.hpp"

namespace wspectra::hessian {

namespace {
using geometry::AxisKind;
using geometry::Vec3;
using Tri = Eigen::Triplet<double>;
using numlin::SpMat;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Row i + di of column j, following periodic wrap and pole reflection.
int shifted(const ConformalPatch& p, int i, int di, int j) {
  const int n0 = p.n0(), n1 = p.n1(), r = i + di;
  if (p.ax0.kind == AxisKind::periodic) return p.idx(wrap(r, n0), j);
  if (p.ax0.kind == AxisKind::pole_capped) {
    if (r < 0) return p.idx(-1 - r, wrap(j + n1 / 2, n1));
    if (r >= n0) return p.idx(2 * n0 - 1 - r, wrap(j + n1 / 2, n1));
  }
  return p.idx(r, j);
}

// Second-order node gradients in the conformal variables.
SpMat grad_x(const ConformalPatch& p) {
  const int n0 = p.n0(), n1 = p.n1();
  const double h = p.ax0.h();
  std::vector<Tri> t;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const int k = p.idx(i, j);
      const double s = 1.0 / (p.xprime(i) * h);
      if (p.ax0.kind == AxisKind::bounded && i == 0) {
        t.emplace_back(k, p.idx(0, j), -1.5 * s);
        t.emplace_back(k, p.idx(1, j), 2.0 * s);
        t.emplace_back(k, p.idx(2, j), -0.5 * s);
      } else if (p.ax0.kind == AxisKind::bounded && i == n0 - 1) {
        t.emplace_back(k, p.idx(n0 - 1, j), 1.5 * s);
        t.emplace_back(k, p.idx(n0 - 2, j), -2.0 * s);
        t.emplace_back(k, p.idx(n0 - 3, j), 0.5 * s);
      } else {
        t.emplace_back(k, shifted(p, i, 1, j), 0.5 * s);
        t.emplace_back(k, shifted(p, i, -1, j), -0.5 * s);
      }
    }
  SpMat D(p.nodes(), p.nodes());
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SpMat grad_y(const ConformalPatch& p) {
  const int n0 = p.n0(), n1 = p.n1();
  const double s = 0.5 / p.ax1.h();
  std::vector<Tri> t;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      t.emplace_back(p.idx(i, j), p.idx(i, wrap(j + 1, n1)), s);
      t.emplace_back(p.idx(i, j), p.idx(i, wrap(j - 1, n1)), -s);
    }
  SpMat D(p.nodes(), p.nodes());
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

// \int c |grad u|^2 dx dy with c averaged to faces (edge-based Dirichlet form).
SpMat face_dirichlet(const ConformalPatch& p, const std::vector<double>& c) {
  const int n0 = p.n0(), n1 = p.n1();
  const double h0 = p.ax0.h(), h1 = p.ax1.h();
  std::vector<Tri> t;
  auto edge = [&](int a, int b, double w) {
    if (w == 0.0) return;
    t.emplace_back(a, a, w);
    t.emplace_back(b, b, w);
    t.emplace_back(a, b, -w);
    t.emplace_back(b, a, -w);
  };
  // axis-0 faces: between rows i and i + 1 (face index i + 1)
  const int faces = p.ax0.kind == AxisKind::periodic ? n0 : n0 - 1;
  for (int i = 0; i < faces; ++i) {
    const int face = i + 1;
    const double X = p.xprime_face(p.ax0.kind == AxisKind::periodic ? wrap(face, n0) : face);
    for (int j = 0; j < n1; ++j) {
      const int a = p.idx(i, j), b = p.idx(wrap(i + 1, n0), j);
      edge(a, b, 0.5 * (c[a] + c[b]) * h1 / (X * h0));
    }
  }
  // axis-1 faces
  for (int i = 0; i < n0; ++i) {
    const double area = p.xprime(i) * h0 * p.ax0.weight(i);
    for (int j = 0; j < n1; ++j) {
      const int a = p.idx(i, j), b = p.idx(i, wrap(j + 1, n1));
      edge(a, b, 0.5 * (c[a] + c[b]) * area / h1);
    }
  }
  SpMat A(p.nodes(), p.nodes());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SpMat diag(const std::vector<double>& d) { return numlin::diagonal(d); }

SpMat prolongation(const ConformalPatch& p, Closure bc) {
  if (bc == Closure::closed) return numlin::identity(p.nodes());
  const SpMat Px = spectra::clamped_prolongation(p.n0());
  const int n1 = p.n1();
  std::vector<Tri> t;
  for (int k = 0; k < Px.outerSize(); ++k)
    for (SpMat::InnerIterator it(Px, k); it; ++it)
      for (int j = 0; j < n1; ++j) t.emplace_back(it.row() * n1 + j, it.col() * n1 + j, it.value());
  SpMat P(p.nodes(), Px.cols() * n1);
  P.setFromTriplets(t.begin(), t.end());
  return P;
}

Eigen::Map<const Eigen::VectorXd> as_vec(const std::vector<double>& v) { return {v.data(), (Eigen::Index)v.size()}; }
}  // namespace

SpMat weighted_dirichlet(const ConformalPatch& p, const std::vector<double>& c) {
  if (static_cast<int>(c.size()) != p.nodes()) throw Error(ErrorCode::ShapeMismatch, "coefficient does not match patch");
  return face_dirichlet(p, c);
}

SpMat HessianAssembly::mass() const { return SpMat(P.transpose() * diag(node_mass) * P); }

SpMat HessianAssembly::weighted_mass(const spectra::WeightSpec& w) const {
  w.validate();
  std::vector<double> d(node_mass.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = w.density(chart_radius[k]) * node_mass[k];
  return SpMat(P.transpose() * diag(d) * P);
}

HessianAssembly assemble_Q(const ConformalPatch& p, const GeometryFields& f) {
  return assemble_Q(p, f, p.ax0.kind == AxisKind::bounded ? Closure::clamped_annulus : Closure::closed);
}

HessianAssembly assemble_Q(const ConformalPatch& p, const GeometryFields& f, Closure bc) {
  if (static_cast<int>(f.H.size()) != p.nodes()) throw Error(ErrorCode::ShapeMismatch, "fields do not match patch");
  if (p.ax0.kind == AxisKind::bounded && bc == Closure::closed)
    throw Error(ErrorCode::OpenSurfaceWithoutClamp, "open chart needs clamped boundary conditions");
  if (p.ax0.kind != AxisKind::bounded && bc == Closure::clamped_annulus)
    throw Error(ErrorCode::BadParam, "clamping needs a bounded chart direction");
  const int N = p.nodes();
  std::vector<double> cell(N), mass(N), e2l_inv(N);
  for (int i = 0; i < p.n0(); ++i)
    for (int j = 0; j < p.n1(); ++j) {
      const int k = p.idx(i, j);
      cell[k] = p.cell(i);
      mass[k] = f.e2l[k] * cell[k];
      e2l_inv[k] = 1.0 / f.e2l[k];
    }

  // 1/2 \int (Delta_g u + |A|^2 u)^2 dvol
  const SpMat G = SpMat(diag(e2l_inv) * geometry::laplacian_matrix(p)) + diag(f.A2);
  SpMat Q = 0.5 * SpMat(G.transpose() * diag(mass) * G);

  // \int H^2 |grad u|^2 dx dy
  std::vector<double> H2(N);
  for (int k = 0; k < N; ++k) H2[k] = f.H[k] * f.H[k];
  Q += face_dirichlet(p, H2);

  // \int (4 |h0|^2_WP - |A|^2) H^2 u^2 dvol
  std::vector<double> zero(N);
  for (int k = 0; k < N; ++k) zero[k] = (4.0 * f.wp_h0_sq(k) - f.A2[k]) * H2[k] * mass[k];
  Q += diag(zero);

  // -2 \int e^{-2 lambda} H [(u_x^2 - u_y^2) Re h0 - 2 u_x u_y Im h0] dx dy
  const SpMat Dx = grad_x(p), Dy = grad_y(p);
  std::vector<double> c(N), d(N), s1(N), s2(N);
  const auto Hx = geometry::d_x(p, f.H), Hy = geometry::d_y(p, f.H);
  for (int k = 0; k < N; ++k) {
    const double w = f.H[k] * e2l_inv[k] * cell[k];
    c[k] = w * f.h0[k].real();
    d[k] = w * f.h0[k].imag();
    // -4 \int e^{-2 lambda} u (u_x X1 + u_y X2),  X1 = H_x Re h0 - H_y Im h0, X2 = -(H_x Im h0 + H_y Re h0)
    const double re = f.h0[k].real(), im = f.h0[k].imag();
    s1[k] = e2l_inv[k] * cell[k] * (Hx[k] * re - Hy[k] * im);
    s2[k] = -e2l_inv[k] * cell[k] * (Hx[k] * im + Hy[k] * re);
  }
  const SpMat C = diag(c), Dd = diag(d), S1 = diag(s1), S2 = diag(s2);
  Q += -2.0 * SpMat(SpMat(Dx.transpose() * C * Dx) - SpMat(Dy.transpose() * C * Dy) -
                    SpMat(Dx.transpose() * Dd * Dy) - SpMat(Dy.transpose() * Dd * Dx));
  // bilinear polarisation of the cubic-looking term: B(u, v) = -2 \int (u v_x + v u_x) X1 + ...
  Q += -2.0 * SpMat(SpMat(S1 * Dx) + SpMat(Dx.transpose() * S1) + SpMat(S2 * Dy) + SpMat(Dy.transpose() * S2));

  HessianAssembly a;
  a.boundary = bc;
  a.Q_nodes = 0.5 * SpMat(Q + SpMat(Q.transpose()));  // removes round-off asymmetry only
  a.Q_nodes.prune(0.0);
  a.P = prolongation(p, bc);
  a.Q = SpMat(a.P.transpose() * a.Q_nodes * a.P);
  a.node_mass = mass;
  a.chart_radius.resize(N);
  for (int i = 0; i < p.n0(); ++i)
    for (int j = 0; j < p.n1(); ++j) a.chart_radius[p.idx(i, j)] = p.chart_radius(i, j);
  return a;
}

double q_value(const HessianAssembly& a, const std::vector<double>& u) {
  const auto v = as_vec(u);
  for (double x : u)
    if (!std::isfinite(x)) throw Error(ErrorCode::BadParam, "field has non-finite entries");
  if (v.size() == a.nodes()) return v.dot(a.Q_nodes * v);
  if (v.size() == a.unknowns()) return v.dot(a.Q * v);
  throw Error(ErrorCode::ShapeMismatch, "field length matches neither nodes nor unknowns");
}

double mass_value(const HessianAssembly& a, const std::vector<double>& u) {
  const auto v = as_vec(u);
  if (v.size() == a.nodes()) {
    double acc = 0.0;
    for (int k = 0; k < a.nodes(); ++k) acc += a.node_mass[k] * v(k) * v(k);
    return acc;
  }
  if (v.size() == a.unknowns()) return v.dot(a.mass() * v);
  throw Error(ErrorCode::ShapeMismatch, "field length matches neither nodes nor unknowns");
}

std::vector<std::vector<double>> mobius_null_fields(const ConformalPatch& p, const GeometryFields& f) {
  const int N = p.nodes();
  std::vector<std::vector<double>> out(10, std::vector<double>(N));
  for (int k = 0; k < N; ++k) {
    const Vec3& phi = p.jet[k].p;
    const Vec3& n = f.normal[k];
    for (int i = 0; i < 3; ++i) {
      const Vec3 e = Vec3::Unit(i);
      out[i][k] = e.dot(n);
      out[3 + i][k] = e.cross(phi).dot(n);
      out[7 + i][k] = (phi.squaredNorm() * e - 2.0 * phi.dot(e) * phi).dot(n);
    }
    out[6][k] = phi.dot(n);
  }
  return out;
}

SpectralCounts count_spectrum(std::vector<double> eig, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::BadParam, "tol_null must be non-negative");
  std::sort(eig.begin(), eig.end());
  SpectralCounts c;
  c.tol_null = tol;
  for (double l : eig) {
    if (l < -tol)
      ++c.index;
    else if (l <= tol)
      ++c.nullity;
  }
  c.eigenvalues = std::move(eig);
  c.converged = true;
  return c;
}

std::pair<int, int> index_nullity(const SpectralCounts& c) { return {c.index, c.nullity}; }

SpectralCounts spectrum(const HessianAssembly& a, const std::optional<spectra::WeightSpec>& weight, int k,
                        double tol_null) {
  if (k < 1 || k > 200) throw Error(ErrorCode::BadParam, "k must lie in [1, 200]");
  k = std::min(k, a.unknowns());
  const SpMat M = weight ? a.weighted_mass(*weight) : a.mass();
  numlin::EigOptions opt;
  opt.want_vectors = false;
  const auto rep = numlin::solve_geneig_sparse(a.Q, M, k, opt);
  SpectralCounts c = count_spectrum(rep.eigenvalues, tol_null);
  c.converged = rep.all_converged();
  if (!c.converged) throw Error(ErrorCode::NoConvergence, "Hessian eigenpairs did not converge");
  return c;
}

double tol_null_from_refinement(const std::vector<double>& coarse, const std::vector<double>& fine) {
  const std::size_t n = std::min(coarse.size(), fine.size());
  if (n == 0) throw Error(ErrorCode::BadParam, "empty spectra");
  double big = 0.0;
  for (std::size_t i = 0; i < n; ++i) big = std::max(big, std::abs(coarse[i]));
  // Tracked: eigenvalues heading to zero under refinement (at least halving),
  // or already at round-off level.
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool roundoff = std::abs(coarse[i]) <= 1e-9 * big && std::abs(fine[i]) <= 1e-9 * big;
    const bool decaying = std::abs(fine[i]) <= 0.5 * std::abs(coarse[i]);
    if (roundoff || decaying) worst = std::max(worst, std::abs(coarse[i] - fine[i]));
  }
  return 10.0 * worst;
}

CalibratedSpectrum calibrated_spectrum(const geometry::SurfaceId& id, int res,
                                       const std::optional<spectra::WeightSpec>& weight, int k) {
  auto run = [&](int r) {
    const auto patch = geometry::build_surface(id, r);
    const auto fields = geometry::derive_geometry(patch);
    return spectrum(assemble_Q(patch, fields), weight, k, 0.0).eigenvalues;
  };
  CalibratedSpectrum out;
  out.resolution = res;
  const auto coarse = run(res);
  out.fine = run(2 * res);
  out.tol_null = tol_null_from_refinement(coarse, out.fine);
  out.coarse = count_spectrum(coarse, out.tol_null);
  return out;
}

spectra::WeightSpec chart_power_weight(double beta, double b, double L) {
  spectra::WeightSpec w;
  w.kind = spectra::WeightKind::power_weight;
  w.beta = beta;
  w.m = 1;
  w.b = b;
  w.a = b * std::exp(-L);
  w.validate();
  return w;
}

}  // namespace wspectra::hessian
