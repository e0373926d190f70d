// Curvature fields of a conformal chart, energies, the Willmore residual,
// Moebius transforms, grid differencing and patch I/O.

#include "wspectra/immersion_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "wspectra/errors.hpp"

namespace wspectra::geometry {

namespace {
constexpr double pi = std::numbers::pi;
using Tri = Eigen::Triplet<double>;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Node (i, j) with i possibly outside [0, n0) on periodic or pole-capped axes.
int neighbour(const ConformalPatch& p, int i, int j) {
  const int n0 = p.n0(), n1 = p.n1();
  if (p.ax0.kind == AxisKind::periodic) return p.idx(wrap(i, n0), wrap(j, n1));
  if (p.ax0.kind == AxisKind::pole_capped) {
    if (i < 0) return p.idx(-1 - i, wrap(j + n1 / 2, n1));
    if (i >= n0) return p.idx(2 * n0 - 1 - i, wrap(j + n1 / 2, n1));
  }
  return p.idx(i, wrap(j, n1));
}

template <class T>
std::vector<T> diff_x(const ConformalPatch& p, const std::vector<T>& f) {
  const int n0 = p.n0(), n1 = p.n1();
  const double h = p.ax0.h();
  std::vector<T> out(f.size());
  const bool bounded = p.ax0.kind == AxisKind::bounded;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      auto at = [&](int di) { return f[neighbour(p, i + di, j)]; };
      T d;
      if (bounded && i == 0)
        d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      else if (bounded && i == n0 - 1)
        d = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
      else if (bounded && (i == 1 || i == n0 - 2))
        d = (at(1) - at(-1)) / (2.0 * h);
      else
        d = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
      out[p.idx(i, j)] = d / p.xprime(i);
    }
  return out;
}

template <class T>
std::vector<T> diff_y(const ConformalPatch& p, const std::vector<T>& f) {
  const int n0 = p.n0(), n1 = p.n1();
  const double h = p.ax1.h();
  std::vector<T> out(f.size());
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      auto at = [&](int dj) { return f[p.idx(i, wrap(j + dj, n1))]; };
      out[p.idx(i, j)] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
    }
  return out;
}

double tolerance(const ConformalPatch& p) { return p.analytic ? 1e-6 : 1e-3; }

const char* axis_name(AxisKind k) {
  switch (k) {
    case AxisKind::periodic: return "periodic";
    case AxisKind::bounded: return "bounded";
    case AxisKind::pole_capped: return "pole_capped";
  }
  return "?";
}
AxisKind axis_kind(const std::string& s) {
  if (s == "periodic") return AxisKind::periodic;
  if (s == "bounded") return AxisKind::bounded;
  if (s == "pole_capped") return AxisKind::pole_capped;
  throw Error(ErrorCode::BadParam, "unknown axis kind '" + s + "'");
}
}  // namespace

// ---------------------------------------------------------------- axes

double Axis::h() const {
  if (kind == AxisKind::bounded) return (hi - lo) / (n - 1);
  return (hi - lo) / n;
}

double Axis::coord(int i) const {
  if (kind == AxisKind::pole_capped) return lo + (i + 0.5) * h();
  return lo + i * h();
}

double Axis::weight(int i) const {
  if (kind == AxisKind::bounded && (i == 0 || i == n - 1)) return 0.5;
  return 1.0;
}

double ConformalPatch::cell(int i) const { return xprime(i) * ax0.h() * ax1.h() * ax0.weight(i); }

double ConformalPatch::x(int i) const {
  // pole-capped charts are Mercator: sigma is the polar angle, x = log tan(sigma / 2)
  if (ax0.kind == AxisKind::pole_capped) return std::log(std::tan(0.5 * (ax0.coord(i) - ax0.lo) * pi / (ax0.hi - ax0.lo)));
  return ax0.coord(i);
}

double ConformalPatch::chart_radius(int i, int j) const {
  if (log_polar) return std::exp(x(i));
  const double px = ax0.hi - ax0.lo, py = ax1.hi - ax1.lo;
  double dx = ax0.coord(i) - ax0.lo, dy = ax1.coord(j) - ax1.lo;
  dx = std::min(dx, px - dx);
  dy = std::min(dy, py - dy);
  return std::hypot(dx, dy);
}

std::string SurfaceId::name() const {
  switch (kind) {
    case SurfaceKind::round_sphere: return "round_sphere";
    case SurfaceKind::clifford_torus: return "clifford_torus";
    case SurfaceKind::torus_of_revolution: return "torus_of_revolution";
    case SurfaceKind::catenoid: return "catenoid";
    case SurfaceKind::flat_plane: return "flat_plane";
    case SurfaceKind::graft: return "graft";
    case SurfaceKind::inverted: return "inverted(" + base + ")";
  }
  return "?";
}

SurfaceId SurfaceId::parse(const std::string& text) {
  SurfaceId id;
  if (text == "round_sphere" || text == "sphere")
    id.kind = SurfaceKind::round_sphere;
  else if (text == "clifford_torus" || text == "clifford")
    id.kind = SurfaceKind::clifford_torus;
  else if (text == "torus_of_revolution" || text == "torus")
    id.kind = SurfaceKind::torus_of_revolution;
  else if (text == "catenoid")
    id.kind = SurfaceKind::catenoid;
  else if (text == "flat_plane" || text == "plane")
    id.kind = SurfaceKind::flat_plane;
  else if (text == "graft")
    id.kind = SurfaceKind::graft;
  else
    throw Error(ErrorCode::BadParam, "unknown surface '" + text + "'");
  return id;
}

// ---------------------------------------------------------------- fields

double conformality_residual(const ConformalPatch& patch) {
  double worst = 0.0;
  if (!patch.has_jet) {
    std::vector<Vec3> p(patch.nodes());
    for (int k = 0; k < patch.nodes(); ++k) p[k] = patch.jet[k].p;
    const auto px = d_x(patch, p), py = d_y(patch, p);
    for (int k = 0; k < patch.nodes(); ++k) {
      const double e = px[k].squaredNorm();
      worst = std::max(worst, std::max(std::abs(e - py[k].squaredNorm()), std::abs(px[k].dot(py[k]))) / e);
    }
    return worst;
  }
  for (const auto& J : patch.jet) {
    const double e = J.px.squaredNorm();
    if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::max(std::abs(e - J.py.squaredNorm()), std::abs(J.px.dot(J.py))) / e);
  }
  return worst;
}

GeometryFields derive_geometry(const ConformalPatch& patch) {
  const int N = patch.nodes();
  if (patch.n0() < 5 || patch.n1() < 5 || static_cast<int>(patch.jet.size()) != N)
    throw Error(ErrorCode::BadGrid, "patch grid is too small or inconsistent");
  const double res = conformality_residual(patch);
  if (!(res <= tolerance(patch)))
    throw Error(ErrorCode::NotConformal, "conformality residual " + std::to_string(res));

  std::vector<Jet> J = patch.jet;
  if (!patch.has_jet) {
    std::vector<Vec3> p(N);
    for (int k = 0; k < N; ++k) p[k] = J[k].p;
    const auto px = d_x(patch, p), py = d_y(patch, p);
    const auto pxx = d_x(patch, px), pxy = d_y(patch, px), pyy = d_y(patch, py);
    for (int k = 0; k < N; ++k) {
      J[k].px = px[k];
      J[k].py = py[k];
      J[k].pxx = pxx[k];
      J[k].pxy = pxy[k];
      J[k].pyy = pyy[k];
    }
  }

  GeometryFields f;
  f.lambda.resize(N);
  f.e2l.resize(N);
  f.H.resize(N);
  f.K.resize(N);
  f.A2.resize(N);
  f.h0.resize(N);
  f.normal.resize(N);
  f.L.resize(N);
  for (int k = 0; k < N; ++k) {
    const Jet& j = J[k];
    const double e2l = 0.5 * (j.px.squaredNorm() + j.py.squaredNorm());
    const Vec3 n = patch.orientation * j.px.cross(j.py).normalized();
    const double L11 = j.pxx.dot(n), L12 = j.pxy.dot(n), L22 = j.pyy.dot(n);
    f.e2l[k] = e2l;
    f.lambda[k] = 0.5 * std::log(e2l);
    f.normal[k] = n;
    f.L[k] = {L11, L12, L22};
    f.H[k] = (L11 + L22) / (2.0 * e2l);
    f.h0[k] = cplx(0.5 * (L11 - L22), -L12);
    f.K[k] = (L11 * L22 - L12 * L12) / (e2l * e2l);
    f.A2[k] = 4.0 * f.H[k] * f.H[k] - 2.0 * f.K[k];
  }
  // Liouville: K = -e^{-2 lambda} Delta lambda, kept as a cross-check.
  const auto lap = laplacian(patch, f.lambda);
  f.K_liouville.resize(N);
  for (int k = 0; k < N; ++k) f.K_liouville[k] = -lap[k] / f.e2l[k];
  return f;
}

namespace {
template <class F>
double integrate(const ConformalPatch& p, F&& g) {
  double acc = 0.0;
  for (int i = 0; i < p.n0(); ++i) {
    const double c = p.cell(i);
    for (int j = 0; j < p.n1(); ++j) acc += g(p.idx(i, j)) * c;
  }
  return acc;
}
}  // namespace

double area(const ConformalPatch& p, const GeometryFields& f) {
  return integrate(p, [&](int k) { return f.e2l[k]; });
}
double willmore_energy(const ConformalPatch& p, const GeometryFields& f) {
  return integrate(p, [&](int k) { return f.H[k] * f.H[k] * f.e2l[k]; });
}
double conformal_energy(const ConformalPatch& p, const GeometryFields& f) {
  return integrate(p, [&](int k) { return (f.H[k] * f.H[k] - f.K[k]) * f.e2l[k]; });
}
double gauss_bonnet(const ConformalPatch& p, const GeometryFields& f) {
  return integrate(p, [&](int k) { return f.K[k] * f.e2l[k]; });
}
double normal_energy(const ConformalPatch& p, const GeometryFields& f) {
  return integrate(p, [&](int k) { return f.A2[k] * f.e2l[k]; });
}
double normal_energy_direct(const ConformalPatch& p, const GeometryFields& f) {
  const auto nx = d_x(p, f.normal), ny = d_y(p, f.normal);
  return integrate(p, [&](int k) { return nx[k].squaredNorm() + ny[k].squaredNorm(); });
}

ResidualReport willmore_residual(const ConformalPatch& p, const GeometryFields& f) {
  const auto lap = laplacian(p, f.H);
  ResidualReport r;
  r.field.resize(p.nodes());
  for (int k = 0; k < p.nodes(); ++k) r.field[k] = lap[k] / f.e2l[k] + 2.0 * f.H[k] * (f.H[k] * f.H[k] - f.K[k]);
  const double num = integrate(p, [&](int k) { return r.field[k] * r.field[k] * f.e2l[k]; });
  r.rms = std::sqrt(num / area(p, f));
  return r;
}

// ---------------------------------------------------------------- Moebius

ConformalPatch apply_mobius(const ConformalPatch& patch, const Mobius& m) {
  ConformalPatch out = patch;
  switch (m.kind) {
    case Mobius::translation:
      for (auto& J : out.jet) J.p += m.v;
      return out;
    case Mobius::dilation:
      if (!(m.c > 0.0) || !std::isfinite(m.c)) throw Error(ErrorCode::BadParam, "dilation factor must be positive");
      for (auto& J : out.jet) {
        J.p *= m.c;
        J.px *= m.c;
        J.py *= m.c;
        J.pxx *= m.c;
        J.pxy *= m.c;
        J.pyy *= m.c;
      }
      return out;
    case Mobius::inversion: break;
  }
  // Inversion phi -> c + (phi - c) / |phi - c|^2.
  Vec3 lo = patch.jet.front().p, hi = lo;
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& J : patch.jet) {
    lo = lo.cwiseMin(J.p);
    hi = hi.cwiseMax(J.p);
    dmin = std::min(dmin, (J.p - m.v).norm());
  }
  if (dmin <= 1e-3 * (hi - lo).norm()) throw Error(ErrorCode::CenterOnSurface, "inversion centre on the surface");
  auto DI = [](const Vec3& y, const Vec3& v) {
    const double r2 = y.squaredNorm();
    return Vec3(v / r2 - 2.0 * y.dot(v) * y / (r2 * r2));
  };
  auto D2I = [](const Vec3& y, const Vec3& v, const Vec3& w) {
    const double r2 = y.squaredNorm(), r4 = r2 * r2;
    return Vec3(-2.0 * (y.dot(w) * v + y.dot(v) * w + v.dot(w) * y) / r4 + 8.0 * y.dot(v) * y.dot(w) * y / (r4 * r2));
  };
  for (auto& J : out.jet) {
    const Vec3 y = J.p - m.v;
    const Jet s = J;
    J.p = m.v + y / y.squaredNorm();
    if (!patch.has_jet) continue;
    J.px = DI(y, s.px);
    J.py = DI(y, s.py);
    J.pxx = DI(y, s.pxx) + D2I(y, s.px, s.px);
    J.pxy = DI(y, s.pxy) + D2I(y, s.px, s.py);
    J.pyy = DI(y, s.pyy) + D2I(y, s.py, s.py);
  }
  if (out.id.kind != SurfaceKind::inverted) {
    out.id.base = patch.id.name();
    out.id.kind = SurfaceKind::inverted;
  }
  return out;
}

// ---------------------------------------------------------------- stencils

std::vector<double> d_x(const ConformalPatch& p, const std::vector<double>& f) { return diff_x(p, f); }
std::vector<double> d_y(const ConformalPatch& p, const std::vector<double>& f) { return diff_y(p, f); }
std::vector<Vec3> d_x(const ConformalPatch& p, const std::vector<Vec3>& f) { return diff_x(p, f); }
std::vector<Vec3> d_y(const ConformalPatch& p, const std::vector<Vec3>& f) { return diff_y(p, f); }

Eigen::SparseMatrix<double> laplacian_matrix(const ConformalPatch& p) {
  const int n0 = p.n0(), n1 = p.n1(), N = p.nodes();
  const double h0 = p.ax0.h(), h1 = p.ax1.h();
  std::vector<Tri> t;
  t.reserve(6 * N);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const int k = p.idx(i, j);
      const double cy = 1.0 / (h1 * h1);
      t.emplace_back(k, p.idx(i, wrap(j + 1, n1)), cy);
      t.emplace_back(k, p.idx(i, wrap(j - 1, n1)), cy);
      t.emplace_back(k, k, -2.0 * cy);
      if (p.ax0.kind == AxisKind::bounded && (i == 0 || i == n0 - 1)) {
        const int s = i == 0 ? 1 : -1;
        const double c = 1.0 / (h0 * h0);
        t.emplace_back(k, k, 2.0 * c);
        t.emplace_back(k, p.idx(i + s, j), -5.0 * c);
        t.emplace_back(k, p.idx(i + 2 * s, j), 4.0 * c);
        t.emplace_back(k, p.idx(i + 3 * s, j), -1.0 * c);
        continue;
      }
      const double scale = 1.0 / (p.xprime(i) * h0 * h0);
      // face i - 1/2 (index i) and i + 1/2 (index i + 1)
      for (int side : {0, 1}) {
        const int face = i + side;
        const bool pole = p.ax0.kind == AxisKind::pole_capped && (face == 0 || face == n0);
        if (pole) continue;
        const double c = scale / p.xprime_face(p.ax0.kind == AxisKind::periodic ? wrap(face, n0) : face);
        const int other = neighbour(p, side == 0 ? i - 1 : i + 1, j);
        t.emplace_back(k, other, c);
        t.emplace_back(k, k, -c);
      }
    }
  Eigen::SparseMatrix<double> L(N, N);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

std::vector<double> laplacian(const ConformalPatch& p, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != p.nodes()) throw Error(ErrorCode::ShapeMismatch, "field size");
  const Eigen::Map<const Eigen::VectorXd> v(f.data(), f.size());
  const Eigen::VectorXd r = laplacian_matrix(p) * v;
  return {r.data(), r.data() + r.size()};
}

// ---------------------------------------------------------------- I/O

void export_patch(const ConformalPatch& p, const std::string& stem) {
  nlohmann::ordered_json h;
  h["kind"] = p.id.name();
  h["params"] = {{"R", p.id.R}, {"r", p.id.r}, {"t", p.id.t}, {"a", p.id.a}, {"b", p.id.b}};
  h["resolution"] = {p.n0(), p.n1()};
  h["periodicity"] = {p.ax0.kind == AxisKind::periodic, true};
  for (const Axis* a : {&p.ax0, &p.ax1})
    h["axes"].push_back({{"kind", axis_name(a->kind)}, {"lo", a->lo}, {"hi", a->hi}, {"n", a->n}});
  h["stretch"] = p.stretch;
  std::vector<double> faces;
  for (double v : p.stretch_face) faces.push_back(std::isfinite(v) ? v : 0.0);  // 0 marks a pole face
  h["stretch_face"] = faces;
  h["orientation"] = p.orientation;
  h["log_polar"] = p.log_polar;
  h["nodes"] = stem + ".csv";
  std::ofstream js(stem + ".json", std::ios::binary);
  if (!js) throw Error(ErrorCode::IoError, "cannot write " + stem + ".json");
  js << h.dump(2) << '\n';
  std::ofstream cs(stem + ".csv", std::ios::binary);
  if (!cs) throw Error(ErrorCode::IoError, "cannot write " + stem + ".csv");
  cs << "i,j,x,y,z\n" << std::setprecision(17);
  for (int i = 0; i < p.n0(); ++i)
    for (int j = 0; j < p.n1(); ++j) {
      const Vec3& v = p.jet[p.idx(i, j)].p;
      cs << i << ',' << j << ',' << v.x() << ',' << v.y() << ',' << v.z() << '\n';
    }
}

ConformalPatch import_patch(const std::string& stem) {
  std::ifstream js(stem + ".json");
  if (!js) throw Error(ErrorCode::IoError, "cannot read " + stem + ".json");
  nlohmann::json h;
  try {
    js >> h;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::IoError, std::string("bad patch header: ") + e.what());
  }
  ConformalPatch p;
  p.id.kind = SurfaceKind::inverted;  // provenance unknown: treat as a generic sampled chart
  p.id.base = h.value("kind", std::string("sampled"));
  Axis* axes[2] = {&p.ax0, &p.ax1};
  for (int a = 0; a < 2; ++a) {
    const auto& ax = h.at("axes").at(a);
    axes[a]->kind = axis_kind(ax.at("kind").get<std::string>());
    axes[a]->lo = ax.at("lo").get<double>();
    axes[a]->hi = ax.at("hi").get<double>();
    axes[a]->n = ax.at("n").get<int>();
  }
  p.stretch = h.value("stretch", std::vector<double>{});
  p.stretch_face = h.value("stretch_face", std::vector<double>{});
  for (double& v : p.stretch_face)
    if (v == 0.0) v = std::numeric_limits<double>::infinity();
  p.orientation = h.value("orientation", 1);
  p.log_polar = h.value("log_polar", false);
  p.has_jet = false;
  p.analytic = false;
  p.jet.assign(p.nodes(), Jet{});
  std::ifstream cs(stem + ".csv");
  if (!cs) throw Error(ErrorCode::IoError, "cannot read " + stem + ".csv");
  std::string line;
  std::getline(cs, line);
  int count = 0;
  while (std::getline(cs, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    int i, j;
    double x, y, z;
    if (!(in >> i >> j >> x >> y >> z) || i < 0 || i >= p.n0() || j < 0 || j >= p.n1())
      throw Error(ErrorCode::IoError, "bad node row: " + line);
    p.jet[p.idx(i, j)].p = Vec3(x, y, z);
    ++count;
  }
  if (count != p.nodes()) throw Error(ErrorCode::ShapeMismatch, "node block does not fill the grid");
  return p;
}

void export_fields(const ConformalPatch& p, const GeometryFields& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
  os << "i,j,x,y,lambda,H,K,A2,h0_re,h0_im,n_x,n_y,n_z\n" << std::setprecision(17);
  for (int i = 0; i < p.n0(); ++i)
    for (int j = 0; j < p.n1(); ++j) {
      const int k = p.idx(i, j);
      os << i << ',' << j << ',' << p.x(i) << ',' << p.ax1.coord(j) << ',' << f.lambda[k] << ',' << f.H[k] << ','
         << f.K[k] << ',' << f.A2[k] << ',' << f.h0[k].real() << ',' << f.h0[k].imag() << ',' << f.normal[k].x()
         << ',' << f.normal[k].y() << ',' << f.normal[k].z() << '\n';
    }
}

}  // namespace wspectra::geometry
