// Residues of the Willmore conservation laws along chart circles.
//
// With w = x + i y and V = d_w(H n) + H^2 phi_w + 2 e^{-2 lambda} H h0 phi_wbar,
//   gamma0 = (1/4pi) Im \oint V dw
//   gamma1 = (1/4pi) Im \oint [phi x V + e^{-2 lambda} h0 n x phi_wbar] dw
//   gamma2 = (1/4pi) Im \oint <V, phi> dw
// The two normalisations (2 inside V, 1 in the h0 term of gamma1) are the
// ones for which all three 1-forms are closed on Willmore surfaces.

#include <cmath>
#include <numbers>

#include "wspectra/errors.hpp"
#include "wspectra/immersion_geometry.hpp"

namespace wspectra::geometry {

namespace {
using CVec3 = Eigen::Vector3cd;
constexpr double pi = std::numbers::pi;
constexpr double kGInverse = 2.0;  // inside V
constexpr double kH0Term = 1.0;    // h0 wedge term of gamma1

CVec3 c3(const Vec3& v) { return v.cast<std::complex<double>>(); }
}  // namespace

Contour contour_at_radius(const ConformalPatch& p, double rho) {
  if (!p.log_polar) throw Error(ErrorCode::ContourOutOfChart, "chart has no radial coordinate");
  if (!(rho > 0.0)) throw Error(ErrorCode::ContourOutOfChart, "radius must be positive");
  const double x = std::log(rho);
  int best = -1;
  double gap = 0.0;
  for (int i = 0; i < p.n0(); ++i) {
    const double g = std::abs(p.x(i) - x);
    if (best < 0 || g < gap) {
      best = i;
      gap = g;
    }
  }
  // strictly inside: the difference stencil of H must fit without one-sided rows
  const bool bounded = p.ax0.kind == AxisKind::bounded;
  const bool outside = x < p.x(0) || x > p.x(p.n0() - 1);
  if (outside || (bounded && (best < 2 || best > p.n0() - 3)))
    throw Error(ErrorCode::ContourOutOfChart, "contour |z| = " + std::to_string(rho) + " is not inside the chart");
  return {best};
}

ResidueReport second_residue(const ConformalPatch& p, const GeometryFields& f, const Contour& c) {
  const int i = c.row;
  if (i < 0 || i >= p.n0()) throw Error(ErrorCode::ContourOutOfChart, "contour row outside the chart");
  if (!p.has_jet) throw Error(ErrorCode::BadParam, "residues need a patch with jets");
  const auto Hx = d_x(p, f.H), Hy = d_y(p, f.H);
  const double h1 = p.ax1.h();
  const std::complex<double> I(0.0, 1.0);
  CVec3 g0 = CVec3::Zero(), g1 = CVec3::Zero();
  std::complex<double> g2 = 0.0;
  for (int j = 0; j < p.n1(); ++j) {
    const int k = p.idx(i, j);
    const Jet& J = p.jet[k];
    const Vec3& px = J.px;
    const Vec3& py = J.py;
    const double e2l = f.e2l[k], H = f.H[k];
    const auto& L = f.L[k];
    const Vec3& n = f.normal[k];
    // Weingarten: n_x = -(L11 phi_x + L12 phi_y) / e2l, n_y = -(L12 phi_x + L22 phi_y) / e2l
    const Vec3 nx = -(L[0] * px + L[1] * py) / e2l, ny = -(L[1] * px + L[2] * py) / e2l;
    const Vec3 Hn_x = Hx[k] * n + H * nx, Hn_y = Hy[k] * n + H * ny;
    const CVec3 d_w = 0.5 * (c3(Hn_x) - I * c3(Hn_y));
    const CVec3 phi_w = 0.5 * (c3(px) - I * c3(py));
    const CVec3 phi_wb = 0.5 * (c3(px) + I * c3(py));
    const std::complex<double> h0 = f.h0[k];
    const CVec3 V = d_w + H * H * phi_w + kGInverse * H * h0 / e2l * phi_wb;
    const CVec3 phi = c3(J.p);
    const CVec3 n_x_phiwb = c3(n).cross(phi_wb);
    const std::complex<double> dw = I * h1;  // along the circle x = const
    g0 += V * dw;
    g1 += (phi.cross(V) + kH0Term * h0 / e2l * n_x_phiwb) * dw;
    g2 += (phi.transpose() * V)(0) * dw;
  }
  ResidueReport r;
  r.gamma0 = g0.imag() / (4.0 * pi);
  r.gamma1 = g1.imag() / (4.0 * pi);
  r.gamma2 = g2.imag() / (4.0 * pi);
  r.radius = p.log_polar ? std::exp(p.x(i)) : 0.0;
  return r;
}

}  // namespace wspectra::geometry
