#pragma once
// Degenerating neck families over a fixed annular chart a < |z| < b:
// dyadic energy profiles of the Gauss map, pointwise decay ratios, Hessian
// positivity on clamped neck-supported fields, and the L^{2,1} quantization
// criterion |gamma_1| l -> 0.  Everything here is a diagnostic on analytic
// model necks, not a statement about Willmore sequences.

#include <numbers>
#include <string>
#include <vector>

#include "wspectra/immersion_geometry.hpp"
#include "wspectra/parallel.hpp"

namespace wspectra::neck {

using geometry::ConformalPatch;
using geometry::GeometryFields;

enum class FamilyKind { scaled_catenoid, plane_with_catenoid_graft, flat_plane };

struct NeckFamily {
  FamilyKind kind = FamilyKind::scaled_catenoid;
  double a = 1e-5, b = 1.0;  // fixed chart radii
  std::vector<double> t_list;  // decreasing neck scales

  geometry::SurfaceId surface(double t) const;
  ConformalPatch patch(double t, int n0, int n1) const;
  void validate() const;
  static FamilyKind parse_kind(const std::string& text);
};

// ---- dyadic profile ----

struct RingEnergy {
  int ring = 0;           // |z| in [b 2^{-ring-1}, b 2^{-ring}]
  double r_lo = 0.0, r_hi = 0.0;
  double energy = 0.0;    // \int |grad n|^2 over the ring
};

struct NeckProfile {
  double t = 0.0;
  std::vector<RingEnergy> rings;
  double total = 0.0;     // sum over rings
};

// rings >= 4; the innermost ring must stay inside the chart.
NeckProfile neck_energy_profile(const NeckFamily& family, double t, int rings, int n0 = 512, int n1 = 32);
NeckProfile neck_energy_profile(const ConformalPatch& patch, const GeometryFields& f, int rings);

// ---- pointwise decay ----

struct DecayReport {
  double beta = 0.0;
  std::vector<double> radius, ratio;  // one entry per chart circle
  double C_emp = 0.0;                 // max ratio
  double gauss_energy = 0.0;          // ||grad n||^2_{L^2}
};
// ratio = sup_circle |z| |grad n| / [((|z|/b)^beta + (a/|z|)^beta + 1/log(b/(4a))) ||grad n||_{L^2}]
DecayReport pointwise_decay_diagnostic(const ConformalPatch& patch, const GeometryFields& f, double beta);
// max_r w_{beta_hi}(r) / w_{beta_lo}(r) over the chart circles.
double decay_weight_ratio(const ConformalPatch& patch, double beta_lo, double beta_hi);

// ---- Hessian positivity ----

struct SuiteField {
  std::string label;      // window:mode:cos|sin
  std::vector<double> u;  // node values, clamped at both chart ends
};
// 4 radial windows x 8 angular modes = 32 fields.
std::vector<SuiteField> neck_suite(const ConformalPatch& patch);

struct PositivityReport {
  double beta1 = 0.0, beta2 = 0.0;
  double lambda1 = 0.0;      // min of Q / \int u^2 w_1 over clamped fields
  double lambda2 = 0.0;      // min of Q / \int |grad u|^2 w_2 over clamped fields
  std::vector<std::string> labels;
  std::vector<double> Q, W1, W2, margin;  // margin = Q - (lambda1 W1 + lambda2 W2) / 2
  double min_margin = 0.0;
  bool all_positive = false;  // Q(u) > 0 on the whole suite
  double gauss_energy = 0.0;
  bool asserted = false;      // gauss_energy <= kEpsReport
};

// Frozen "small neck energy" threshold: the total Gauss-map energy 8 pi of a
// full catenoid, below which every calibration window had a positive suite
// (see calibrate_eps_report).
inline constexpr double kEpsReport = 8.0 * std::numbers::pi;

PositivityReport neck_positivity_test(const ConformalPatch& patch, const GeometryFields& f, double beta1,
                                      double beta2);
// Largest energy E in the sweep such that every patch with energy <= E has
// all suite values positive (0 if the lowest-energy patch already fails).
double calibrate_eps_report(const std::vector<PositivityReport>& sweep);

// ---- quantization ----

// ||grad n||_{L^{2,1}} over the chart, with the planar measure.
double gauss_map_l21(const ConformalPatch& patch, const GeometryFields& f);
// ||grad log|z|||_{L^{2,1}(B_1 \ B_{e^{-l}})} sampled by lorentz_norms, and its closed form.
double log_gradient_l21(double l, int radial = 1024, int angular = 512);
double log_gradient_l21_exact(double l);

struct QuantRow {
  double t = 0.0, gamma1 = 0.0, l = 0.0, product = 0.0, l21 = 0.0;
};
struct QuantReport {
  std::vector<QuantRow> rows;  // in the given t order
  bool decreasing = false;     // products non-increasing (up to kResidueZero)
  bool criterion_holds = false;  // decreasing and the last product is below the first (or all vanish)
};
inline constexpr double kResidueZero = 1e-10;

QuantReport quantization_criterion(const std::vector<double>& ts, const std::vector<double>& gamma1,
                                   const std::vector<double>& neck_lengths, const std::vector<double>& l21 = {});

// Catenoid / graft family: gamma_1 on the circle |z| = e t of the chart
// t e^{-2} < |z| < b, neck length l = log(b / t).
QuantReport quantization_sweep(const NeckFamily& family, int n0 = 256, int n1 = 64, Exec exec = Exec::parallel);

// ---- sweep ----

struct SweepSlice {
  double t = 0.0;
  NeckProfile profile;
  DecayReport decay;
  PositivityReport positivity;
};
struct NeckSweep {
  std::vector<SweepSlice> slices;  // t order
  bool margins_monotone = true;    // margins do not decrease as the neck energy decreases
};
NeckSweep neck_sweep(const NeckFamily& family, int rings, double beta, double beta1, double beta2, int res,
                     Exec exec = Exec::parallel);

}  // namespace wspectra::neck
