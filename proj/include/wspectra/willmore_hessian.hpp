#pragma once
// Second variation of the Willmore energy for normal variations u n, on a
// discrete conformal chart:
//
//   Q(u) = 1/2 \int (Delta_g u + |A|^2 u)^2 dvol + \int |grad u|^2 H^2 dx dy
//        + \int (4 |h0|^2_WP - |A|^2) H^2 u^2 dvol
//        - 8 \int <du (x) du, h0>_WP H dvol - 16 \int <du (x) dH, h0>_WP u dvol
//
// and its generalized spectra against area masses, plain or weighted.

#include <optional>
#include <utility>
#include <vector>

#include "wspectra/immersion_geometry.hpp"
#include "wspectra/numlin.hpp"
#include "wspectra/singular_spectra.hpp"

namespace wspectra::hessian {

using geometry::ConformalPatch;
using geometry::GeometryFields;

enum class Closure { closed, clamped_annulus };

struct HessianAssembly {
  Closure boundary = Closure::closed;
  numlin::SpMat Q_nodes;            // form on all grid nodes
  numlin::SpMat P;                  // unknowns -> nodes (identity when closed)
  numlin::SpMat Q;                  // P^T Q_nodes P
  std::vector<double> node_mass;    // e^{2 lambda} * cell
  std::vector<double> chart_radius; // |z| per node
  int nodes() const { return static_cast<int>(node_mass.size()); }
  int unknowns() const { return static_cast<int>(Q.rows()); }
  numlin::SpMat mass() const;                                         // P^T diag(node_mass) P
  numlin::SpMat weighted_mass(const spectra::WeightSpec& w) const;    // P^T diag(omega node_mass) P
};

// Closed charts (no bounded axis) give Closure::closed; bounded charts need
// Closure::clamped_annulus.
HessianAssembly assemble_Q(const ConformalPatch& patch, const GeometryFields& fields);
HessianAssembly assemble_Q(const ConformalPatch& patch, const GeometryFields& fields, Closure bc);

// \int c |grad u|^2 dx dy on grid nodes, c averaged to cell faces.
numlin::SpMat weighted_dirichlet(const ConformalPatch& patch, const std::vector<double>& c);

// u^T Q u for a node field (size nodes()) or an unknown vector (size unknowns()).
double q_value(const HessianAssembly& a, const std::vector<double>& u);
// u^T M u with the plain area mass.
double mass_value(const HessianAssembly& a, const std::vector<double>& u);

// <w, n> for w among e_1..e_3, e_i x phi, phi, |phi|^2 e_i - 2 <phi, e_i> phi.
std::vector<std::vector<double>> mobius_null_fields(const ConformalPatch& patch, const GeometryFields& fields);

struct SpectralCounts {
  std::vector<double> eigenvalues;  // ascending
  int index = 0;
  int nullity = 0;
  double tol_null = 0.0;
  bool converged = false;
};

SpectralCounts count_spectrum(std::vector<double> eigenvalues, double tol_null);
std::pair<int, int> index_nullity(const SpectralCounts& c);

// Smallest k eigenvalues of Q v = lambda M v (weight empty) or Q v = lambda M_w v.
SpectralCounts spectrum(const HessianAssembly& a, const std::optional<spectra::WeightSpec>& weight, int k,
                        double tol_null);

// 10 max |lambda_i(h) - lambda_i(h/2)| over the eigenvalues that head to zero
// (|lambda_i(h/2)| <= |lambda_i(h)| / 2) or sit at round-off level.
double tol_null_from_refinement(const std::vector<double>& coarse, const std::vector<double>& fine);

struct CalibratedSpectrum {
  SpectralCounts coarse;  // counts at the requested resolution
  std::vector<double> fine;
  double tol_null = 0.0;
  int resolution = 0;
};
// Runs the surface at res and 2 res and counts the coarse spectrum with the calibrated tolerance.
CalibratedSpectrum calibrated_spectrum(const geometry::SurfaceId& id, int res,
                                       const std::optional<spectra::WeightSpec>& weight, int k);

// Power weight used for the Sylvester comparison on closed surfaces:
// beta, order 1, chart radii b and b e^{-L}.
spectra::WeightSpec chart_power_weight(double beta = 0.75, double b = 0.5, double L = 3.0);

}  // namespace wspectra::hessian
