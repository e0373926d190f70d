#pragma once
// Conformal immersions of a rectangular chart into R^3, their curvature
// fields, energies, the Willmore residual, Moebius transforms and the
// residue contour integrals.
//
// Conventions.  The chart grid has coordinates (sigma, y).  Axis 1 is always
// periodic (y in [0, period)).  Axis 0 carries a stretch x = X(sigma) so that
// (x, y) is conformal:  |phi_x|^2 = |phi_y|^2 = e^{2 lambda}, <phi_x, phi_y> = 0.
// Jets are stored in the conformal variables (x, y).

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace wspectra::geometry {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

enum class AxisKind { periodic, bounded, pole_capped };

// periodic: n nodes lo + i h, h = (hi - lo) / n
// bounded: n nodes including both ends, h = (hi - lo) / (n - 1)
// pole_capped: n cell centres lo + (i + 1/2) h; the ends are poles where
//              the periodic direction collapses (ghost of row -1 is row 0
//              shifted by half a period).
struct Axis {
  AxisKind kind = AxisKind::periodic;
  double lo = 0.0, hi = 1.0;
  int n = 32;

  double h() const;
  double coord(int i) const;
  // trapezoid / midpoint weight of node i (without h)
  double weight(int i) const;
};

enum class SurfaceKind { round_sphere, clifford_torus, torus_of_revolution, catenoid, flat_plane, graft, inverted };

struct SurfaceId {
  SurfaceKind kind = SurfaceKind::round_sphere;
  double R = 2.0, r = 1.0;   // torus of revolution
  double t = 1.0;            // catenoid / graft neck scale
  double a = 0.0, b = 0.0;   // annular chart radii (catenoid, flat_plane, graft); 0 = defaults
  std::string base;          // surface an inverted patch came from
  std::string name() const;
  static SurfaceId parse(const std::string& text);  // e.g. "catenoid", "torus_of_revolution"
};

struct Jet {
  Vec3 p, px, py, pxx, pxy, pyy;
};

struct ConformalPatch {
  SurfaceId id;
  Axis ax0, ax1;
  std::vector<double> stretch;       // dX/dsigma at the nodes of axis 0 (empty: identity)
  std::vector<double> stretch_face;  // dX/dsigma at faces i - 1/2, size n0 + 1
  std::vector<Jet> jet;              // row-major, index i * n1 + j
  bool has_jet = true;               // false: only .p is meaningful
  bool analytic = true;              // chart conformal to round-off (tolerance 1e-6 vs 1e-3)
  int orientation = 1;               // n = orientation * normalize(phi_x x phi_y)
  bool log_polar = false;            // axis 0 is log|z| of a planar chart, axis 1 the angle

  int n0() const { return ax0.n; }
  int n1() const { return ax1.n; }
  int nodes() const { return n0() * n1(); }
  int idx(int i, int j) const { return i * n1() + j; }
  double xprime(int i) const { return stretch.empty() ? 1.0 : stretch[i]; }
  double xprime_face(int i) const { return stretch_face.empty() ? 1.0 : stretch_face[i]; }
  // Node cell measure in (x, y):  X'(sigma_i) h0 h1 w_i.
  double cell(int i) const;
  // |z| of the chart point (planar radius used by the power weight): e^x on
  // log-polar and Mercator charts, the periodic distance to (0, 0) on flat tori.
  double chart_radius(int i, int j) const;
  double x(int i) const;  // conformal coordinate of row i
};

// max over nodes of max(| |phi_x|^2 - |phi_y|^2 |, |<phi_x, phi_y>|) / |phi_x|^2
double conformality_residual(const ConformalPatch& patch);

struct GeometryFields {
  std::vector<double> lambda, e2l, H, K, K_liouville, A2;
  std::vector<cplx> h0;
  std::vector<Vec3> normal;
  std::vector<std::array<double, 3>> L;  // L11, L12, L22 in (x, y)

  double wp_h0_sq(int k) const { return std::norm(h0[k]) / (e2l[k] * e2l[k]); }
};

// Requires at least 32 nodes per direction.
ConformalPatch build_surface(const SurfaceId& id, int n0, int n1);
inline ConformalPatch build_surface(const SurfaceId& id, int res) { return build_surface(id, res, res); }

GeometryFields derive_geometry(const ConformalPatch& patch);

double area(const ConformalPatch& patch, const GeometryFields& f);
double willmore_energy(const ConformalPatch& patch, const GeometryFields& f);
double conformal_energy(const ConformalPatch& patch, const GeometryFields& f);
double gauss_bonnet(const ConformalPatch& patch, const GeometryFields& f);
double normal_energy(const ConformalPatch& patch, const GeometryFields& f);
// \int |grad n|^2 with the normal differentiated on the grid.
double normal_energy_direct(const ConformalPatch& patch, const GeometryFields& f);

struct ResidualReport {
  std::vector<double> field;  // Delta_g H + 2 H (H^2 - K)
  double rms = 0.0;           // L^2(dvol) average
};
ResidualReport willmore_residual(const ConformalPatch& patch, const GeometryFields& f);

struct Mobius {
  enum Kind { translation, dilation, inversion } kind = translation;
  Vec3 v = Vec3::Zero();  // translation vector or inversion centre
  double c = 1.0;         // dilation factor
};
ConformalPatch apply_mobius(const ConformalPatch& patch, const Mobius& m);

// ---- differencing on the chart grid ----

// d/dx of a node field (fourth-order central where the stencil fits).
std::vector<double> d_x(const ConformalPatch& patch, const std::vector<double>& f);
std::vector<double> d_y(const ConformalPatch& patch, const std::vector<double>& f);
std::vector<Vec3> d_x(const ConformalPatch& patch, const std::vector<Vec3>& f);
std::vector<Vec3> d_y(const ConformalPatch& patch, const std::vector<Vec3>& f);
// Flux-form Laplacian in (x, y), zero flux through poles, one-sided rows at bounded ends.
Eigen::SparseMatrix<double> laplacian_matrix(const ConformalPatch& patch);
std::vector<double> laplacian(const ConformalPatch& patch, const std::vector<double>& f);

// ---- residues ----

struct Contour {
  int row = 0;  // circle x = x(row) of the chart
};
// Nearest row to the chart circle |z| = rho (log-polar and Mercator charts).
Contour contour_at_radius(const ConformalPatch& patch, double rho);

struct ResidueReport {
  Vec3 gamma1 = Vec3::Zero();
  Vec3 gamma0 = Vec3::Zero();
  double gamma2 = 0.0;
  double radius = 0.0;  // |z| of the contour used
};
ResidueReport second_residue(const ConformalPatch& patch, const GeometryFields& f, const Contour& c);

// ---- export / import ----

void export_patch(const ConformalPatch& patch, const std::string& stem);  // stem.json + stem.csv
ConformalPatch import_patch(const std::string& stem);                    // sampled, no jets
void export_fields(const ConformalPatch& patch, const GeometryFields& f, const std::string& path);

}  // namespace wspectra::geometry
