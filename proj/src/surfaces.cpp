// Built-in conformal charts with exact jets.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wspectra/errors.hpp"
#include "wspectra/immersion_geometry.hpp"

namespace wspectra::geometry {

namespace {
constexpr double pi = std::numbers::pi;

ConformalPatch blank(const SurfaceId& id, Axis a0, Axis a1) {
  ConformalPatch p;
  p.id = id;
  p.ax0 = a0;
  p.ax1 = a1;
  p.jet.resize(p.nodes());
  return p;
}

// Mercator chart of the unit sphere: sigma is the polar angle, x = log tan(sigma/2),
// phi = (sech x cos y, sech x sin y, tanh x).
ConformalPatch sphere(const SurfaceId& id, int n0, int n1) {
  if (n1 % 2) throw Error(ErrorCode::BadParam, "sphere chart needs an even angular resolution");
  auto p = blank(id, {AxisKind::pole_capped, 0.0, pi, n0}, {AxisKind::periodic, 0.0, 2.0 * pi, n1});
  p.log_polar = true;
  p.orientation = -1;  // outward normal n = phi, H = -1
  p.stretch.resize(n0);
  p.stretch_face.resize(n0 + 1);
  for (int i = 0; i < n0; ++i) p.stretch[i] = 1.0 / std::sin(p.ax0.coord(i));
  for (int i = 0; i <= n0; ++i) {
    const double s = std::sin(i * p.ax0.h());
    p.stretch_face[i] = (i == 0 || i == n0) ? std::numeric_limits<double>::infinity() : 1.0 / s;
  }
  for (int i = 0; i < n0; ++i) {
    const double f = std::sin(p.ax0.coord(i)), tau = -std::cos(p.ax0.coord(i));
    for (int j = 0; j < n1; ++j) {
      const double c = std::cos(p.ax1.coord(j)), s = std::sin(p.ax1.coord(j));
      Jet& J = p.jet[p.idx(i, j)];
      J.p = Vec3(f * c, f * s, tau);
      J.px = Vec3(-f * tau * c, -f * tau * s, f * f);
      J.py = Vec3(-f * s, f * c, 0.0);
      J.pxx = Vec3(f * (tau * tau - f * f) * c, f * (tau * tau - f * f) * s, -2.0 * f * f * tau);
      J.pxy = Vec3(f * tau * s, -f * tau * c, 0.0);
      J.pyy = Vec3(-f * c, -f * s, 0.0);
    }
  }
  return p;
}

// Flat torus in S^3 followed by stereographic projection from (0,0,0,1).
ConformalPatch clifford(const SurfaceId& id, int n0, int n1) {
  auto p = blank(id, {AxisKind::periodic, 0.0, 2.0 * pi, n0}, {AxisKind::periodic, 0.0, 2.0 * pi, n1});
  using V4 = Eigen::Vector4d;
  const double k = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const double x = p.ax0.coord(i), y = p.ax1.coord(j);
      const V4 X = k * V4(std::cos(x), std::sin(x), std::cos(y), std::sin(y));
      const V4 Xx = k * V4(-std::sin(x), std::cos(x), 0, 0), Xy = k * V4(0, 0, -std::sin(y), std::cos(y));
      const V4 Xxx = k * V4(-std::cos(x), -std::sin(x), 0, 0), Xyy = k * V4(0, 0, -std::cos(y), -std::sin(y));
      const V4 Xxy = V4::Zero();
      const double q = 1.0 / (1.0 - X(3));
      const Vec3 Xh = X.head<3>();
      auto D1 = [&](const V4& v) { return Vec3(q * v.head<3>() + q * q * v(3) * Xh); };
      auto D2 = [&](const V4& v, const V4& w) {
        return Vec3(q * q * (v.head<3>() * w(3) + w.head<3>() * v(3)) + 2.0 * q * q * q * v(3) * w(3) * Xh);
      };
      Jet& J = p.jet[p.idx(i, j)];
      J.p = q * Xh;
      J.px = D1(Xx);
      J.py = D1(Xy);
      J.pxx = D1(Xxx) + D2(Xx, Xx);
      J.pxy = D1(Xxy) + D2(Xx, Xy);
      J.pyy = D1(Xyy) + D2(Xy, Xy);
    }
  return p;
}

// Isothermal angle of the torus of revolution: sigma(v) = \int_0^v r / (R + r cos w) dw,
// by composite Gauss-Legendre quadrature, inverted by Newton.
class IsothermalAngle {
 public:
  IsothermalAngle(double R, double r) : R_(R), r_(r) {}

  double sigma(double v) const {
    static const double xg[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double wg[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    const int panels = 64;
    const double hp = v / panels;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double mid = (k + 0.5) * hp;
      for (int g = 0; g < 8; ++g) acc += wg[g] * r_ / (R_ + r_ * std::cos(mid + 0.5 * hp * xg[g]));
    }
    return 0.5 * hp * acc;
  }

  double invert(double s, double guess) const {
    double v = guess;
    for (int it = 0; it < 50; ++it) {
      const double dv = (sigma(v) - s) * (R_ + r_ * std::cos(v)) / r_;
      v -= dv;
      if (std::abs(dv) < 1e-15) break;
    }
    return v;
  }

 private:
  double R_, r_;
};

ConformalPatch torus(const SurfaceId& id, int n0, int n1) {
  const double R = id.R, r = id.r;
  if (!(r > 0.0) || !(R > r)) throw Error(ErrorCode::BadParam, "torus of revolution needs 0 < r < R");
  const double T = 2.0 * pi * r / std::sqrt(R * R - r * r);
  auto p = blank(id, {AxisKind::periodic, 0.0, T, n0}, {AxisKind::periodic, 0.0, 2.0 * pi, n1});
  p.orientation = -1;  // outward
  const IsothermalAngle iso(R, r);
  for (int i = 0; i < n0; ++i) {
    const double s = p.ax0.coord(i);
    const double v = iso.invert(s, 2.0 * pi * s / T);
    const double v1 = (R + r * std::cos(v)) / r;
    const double v2 = -std::sin(v) * v1;
    const double rho = R + r * std::cos(v), rho1 = -r * std::sin(v) * v1;
    const double rho2 = -r * (std::cos(v) * v1 * v1 + std::sin(v) * v2);
    const double z = r * std::sin(v), z1 = r * std::cos(v) * v1;
    const double z2 = r * (-std::sin(v) * v1 * v1 + std::cos(v) * v2);
    for (int j = 0; j < n1; ++j) {
      const double c = std::cos(p.ax1.coord(j)), sn = std::sin(p.ax1.coord(j));
      Jet& J = p.jet[p.idx(i, j)];
      J.p = Vec3(rho * c, rho * sn, z);
      J.px = Vec3(rho1 * c, rho1 * sn, z1);
      J.py = Vec3(-rho * sn, rho * c, 0.0);
      J.pxx = Vec3(rho2 * c, rho2 * sn, z2);
      J.pxy = Vec3(-rho1 * sn, rho1 * c, 0.0);
      J.pyy = Vec3(-rho * c, -rho * sn, 0.0);
    }
  }
  return p;
}

// Surfaces of revolution over a log-polar annular chart a < |z| < b:
// phi = (rho(x) cos y, rho(x) sin y, Z(x)), x = log|z|.
struct Profile {
  double rho, rho1, rho2, z, z1, z2;
};

template <class F>
ConformalPatch revolution(const SurfaceId& id, int n0, int n1, double a, double b, F&& profile) {
  if (!(a > 0.0) || !(b > a)) throw Error(ErrorCode::BadParam, "annular chart needs 0 < a < b");
  auto p = blank(id, {AxisKind::bounded, std::log(a), std::log(b), n0}, {AxisKind::periodic, 0.0, 2.0 * pi, n1});
  p.id.a = a;
  p.id.b = b;
  p.log_polar = true;
  for (int i = 0; i < n0; ++i) {
    const Profile q = profile(p.ax0.coord(i));
    for (int j = 0; j < n1; ++j) {
      const double c = std::cos(p.ax1.coord(j)), s = std::sin(p.ax1.coord(j));
      Jet& J = p.jet[p.idx(i, j)];
      J.p = Vec3(q.rho * c, q.rho * s, q.z);
      J.px = Vec3(q.rho1 * c, q.rho1 * s, q.z1);
      J.py = Vec3(-q.rho * s, q.rho * c, 0.0);
      J.pxx = Vec3(q.rho2 * c, q.rho2 * s, q.z2);
      J.pxy = Vec3(-q.rho1 * s, q.rho1 * c, 0.0);
      J.pyy = Vec3(-q.rho * c, -q.rho * s, 0.0);
    }
  }
  return p;
}

// Quintic smoothstep and its integral on [0, 1].
double step(double u) { return u <= 0 ? 0 : u >= 1 ? 1 : u * u * u * (10.0 - 15.0 * u + 6.0 * u * u); }
double step1(double u) { return u <= 0 || u >= 1 ? 0 : 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double step_int(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 0.5 + (u - 1.0);
  return u * u * u * u * (2.5 - 3.0 * u + u * u);
}
}  // namespace

// Height of the graft: slope 1 (catenoid) for |s| < kGraftStart, flattened to
// slope 0 over two units of s by a C^2 blend.
constexpr double kGraftStart = 4.5, kGraftWidth = 2.0;

ConformalPatch build_surface(const SurfaceId& id, int n0, int n1) {
  if (n0 < 32 || n1 < 32) throw Error(ErrorCode::BadGrid, "resolution must be at least 32 per direction");
  switch (id.kind) {
    case SurfaceKind::round_sphere: return sphere(id, n0, n1);
    case SurfaceKind::clifford_torus: return clifford(id, n0, n1);
    case SurfaceKind::torus_of_revolution: return torus(id, n0, n1);
    case SurfaceKind::flat_plane: {
      const double a = id.a > 0 ? id.a : std::exp(-4.0), b = id.b > 0 ? id.b : 1.0;
      return revolution(id, n0, n1, a, b, [](double x) {
        const double e = std::exp(x);
        return Profile{e, e, e, 0.0, 0.0, 0.0};
      });
    }
    case SurfaceKind::catenoid: {
      const double t = id.t;
      if (!(t > 0.0)) throw Error(ErrorCode::BadParam, "catenoid scale must be positive");
      const double a = id.a > 0 ? id.a : t * std::exp(-2.0), b = id.b > 0 ? id.b : t * std::exp(2.0);
      const double lt = std::log(t);
      return revolution(id, n0, n1, a, b, [=](double x) {
        const double s = x - lt, ch = std::cosh(s), sh = std::sinh(s);
        return Profile{t * ch, t * sh, t * ch, t * s, t, 0.0};
      });
    }
    case SurfaceKind::graft: {
      const double t = id.t;
      if (!(t > 0.0)) throw Error(ErrorCode::BadParam, "graft scale must be positive");
      const double a = id.a > 0 ? id.a : t * std::exp(-8.0), b = id.b > 0 ? id.b : t * std::exp(8.0);
      const double lt = std::log(t);
      auto p = revolution(id, n0, n1, a, b, [=](double x) {
        const double s = x - lt, ch = std::cosh(s), sh = std::sinh(s);
        const double sg = s < 0 ? -1.0 : 1.0, u = (std::abs(s) - kGraftStart) / kGraftWidth;
        const double F = sg * (std::min(std::abs(s), kGraftStart) + kGraftWidth * (u > 0 ? std::max(0.0, u) - step_int(u) : 0.0));
        const double F1 = 1.0 - step(u);
        const double F2 = -sg * step1(u) / kGraftWidth;
        return Profile{t * ch, t * sh, t * ch, t * F, t * F1, t * F2};
      });
      p.analytic = false;  // conformal only up to sech^2 of the blend start
      return p;
    }
    case SurfaceKind::inverted: break;
  }
  throw Error(ErrorCode::BadParam, "inverted patches come from apply_mobius");
}

}  // namespace wspectra::geometry
