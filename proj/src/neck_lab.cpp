// Neck families: ring energies, decay ratios, suite positivity, residue trends.

#include "wspectra/neck_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wspectra/errors.hpp"
#include "wspectra/lorentz_norms.hpp"
#include "wspectra/singular_spectra.hpp"
#include "wspectra/willmore_hessian.hpp"

namespace wspectra::neck {

namespace {
using geometry::AxisKind;
using geometry::SurfaceKind;
using numlin::SpMat;
constexpr double pi = std::numbers::pi;

void require_annulus(const ConformalPatch& p) {
  if (!p.log_polar || p.ax0.kind != AxisKind::bounded)
    throw Error(ErrorCode::BadParam, "neck diagnostics need an annular log-polar chart");
}

// \int_0^{2pi} |grad n|^2 dy per chart circle, in the conformal variables.
std::vector<double> circle_density(const ConformalPatch& p, const GeometryFields& f) {
  std::vector<double> g(p.n0(), 0.0);
  const double h1 = p.ax1.h();
  for (int i = 0; i < p.n0(); ++i)
    for (int j = 0; j < p.n1(); ++j) {
      const int k = p.idx(i, j);
      g[i] += f.A2[k] * f.e2l[k] * h1;
    }
  return g;
}

// \int_{x_lo}^{x_hi} of the piecewise linear interpolant of g on the rows.
double integrate_rows(const ConformalPatch& p, const std::vector<double>& g, double x_lo, double x_hi) {
  double acc = 0.0;
  for (int i = 0; i + 1 < p.n0(); ++i) {
    const double x0 = p.x(i), x1 = p.x(i + 1);
    const double lo = std::max(x0, x_lo), hi = std::min(x1, x_hi);
    if (hi <= lo) continue;
    auto at = [&](double x) { return g[i] + (g[i + 1] - g[i]) * (x - x0) / (x1 - x0); };
    acc += 0.5 * (at(lo) + at(hi)) * (hi - lo);
  }
  return acc;
}

double decay_weight(double r, double a, double b, double beta) {
  return std::pow(r / b, beta) + std::pow(a / r, beta) + 1.0 / std::log(b / (4.0 * a));
}

spectra::WeightSpec neck_weight(spectra::WeightKind kind, const ConformalPatch& p, double beta1, double beta2) {
  spectra::WeightSpec w;
  w.kind = kind;
  w.beta = beta1;
  w.beta2 = beta2;
  w.a = p.id.a;
  w.b = p.id.b;
  w.validate();
  return w;
}

double quad(const SpMat& A, const std::vector<double>& u) {
  const Eigen::Map<const Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
  return v.dot(A * v);
}

double lowest(const SpMat& Q, const SpMat& M) {
  numlin::EigOptions opt;
  opt.want_vectors = false;
  const auto rep = numlin::solve_geneig_sparse(Q, M, 1, opt);
  if (!rep.all_converged()) throw Error(ErrorCode::NoConvergence, "neck pencil did not converge");
  return rep.eigenvalues.front();
}
}  // namespace

// ---------------------------------------------------------------- family

FamilyKind NeckFamily::parse_kind(const std::string& text) {
  if (text == "scaled_catenoid" || text == "catenoid") return FamilyKind::scaled_catenoid;
  if (text == "plane_with_catenoid_graft" || text == "graft") return FamilyKind::plane_with_catenoid_graft;
  if (text == "flat_plane" || text == "flat") return FamilyKind::flat_plane;
  throw Error(ErrorCode::BadParam, "unknown neck family '" + text + "'");
}

void NeckFamily::validate() const {
  if (!(a > 0.0 && b > a)) throw Error(ErrorCode::BadParam, "neck chart needs 0 < a < b");
  for (double t : t_list)
    if (!(t > 0.0)) throw Error(ErrorCode::BadParam, "neck scales must be positive");
}

geometry::SurfaceId NeckFamily::surface(double t) const {
  geometry::SurfaceId id;
  id.kind = kind == FamilyKind::scaled_catenoid ? SurfaceKind::catenoid
            : kind == FamilyKind::flat_plane    ? SurfaceKind::flat_plane
                                                : SurfaceKind::graft;
  id.t = t;
  id.a = a;
  id.b = b;
  return id;
}

ConformalPatch NeckFamily::patch(double t, int n0, int n1) const {
  validate();
  return geometry::build_surface(surface(t), n0, n1);
}

// ---------------------------------------------------------------- profile

NeckProfile neck_energy_profile(const ConformalPatch& p, const GeometryFields& f, int rings) {
  require_annulus(p);
  if (rings < 4) throw Error(ErrorCode::RingOutOfChart, "need at least 4 dyadic rings");
  const double b = p.id.b;
  const double x_in = std::log(b) - rings * std::log(2.0);
  if (x_in < p.x(0) - 1e-12 || std::log(b) > p.x(p.n0() - 1) + 1e-12)
    throw Error(ErrorCode::RingOutOfChart, std::to_string(rings) + " dyadic rings leave the chart");
  const auto g = circle_density(p, f);
  NeckProfile out;
  out.t = p.id.t;
  for (int k = 0; k < rings; ++k) {
    RingEnergy r;
    r.ring = k;
    r.r_hi = b * std::pow(2.0, -k);
    r.r_lo = b * std::pow(2.0, -k - 1);
    r.energy = integrate_rows(p, g, std::log(r.r_lo), std::log(r.r_hi));
    out.total += r.energy;
    out.rings.push_back(r);
  }
  return out;
}

NeckProfile neck_energy_profile(const NeckFamily& family, double t, int rings, int n0, int n1) {
  const auto p = family.patch(t, n0, n1);
  auto prof = neck_energy_profile(p, geometry::derive_geometry(p), rings);
  prof.t = t;
  return prof;
}

// ---------------------------------------------------------------- decay

DecayReport pointwise_decay_diagnostic(const ConformalPatch& p, const GeometryFields& f, double beta) {
  require_annulus(p);
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::BadBeta, "decay exponent must lie in (0, 1)");
  const double a = p.id.a, b = p.id.b;
  DecayReport out;
  out.beta = beta;
  out.gauss_energy = geometry::normal_energy(p, f);
  const double norm = std::sqrt(std::max(out.gauss_energy, 0.0));
  for (int i = 0; i < p.n0(); ++i) {
    const double r = std::exp(p.x(i));
    double sup = 0.0;
    // |z| |grad_z n| equals |grad n| in the conformal variables (x, y)
    for (int j = 0; j < p.n1(); ++j) {
      const int k = p.idx(i, j);
      sup = std::max(sup, std::sqrt(std::max(f.A2[k] * f.e2l[k], 0.0)));
    }
    const double ratio = norm > 0.0 ? sup / (decay_weight(r, a, b, beta) * norm) : 0.0;
    out.radius.push_back(r);
    out.ratio.push_back(ratio);
    out.C_emp = std::max(out.C_emp, ratio);
  }
  return out;
}

double decay_weight_ratio(const ConformalPatch& p, double beta_lo, double beta_hi) {
  require_annulus(p);
  double worst = 0.0;
  for (int i = 0; i < p.n0(); ++i) {
    const double r = std::exp(p.x(i));
    worst = std::max(worst, decay_weight(r, p.id.a, p.id.b, beta_hi) / decay_weight(r, p.id.a, p.id.b, beta_lo));
  }
  return worst;
}

// ---------------------------------------------------------------- positivity

std::vector<SuiteField> neck_suite(const ConformalPatch& p) {
  require_annulus(p);
  const int n0 = p.n0(), n1 = p.n1();
  const double X0 = p.x(0), X1 = p.x(n0 - 1), span = X1 - X0;
  struct Window {
    const char* name;
    double lo, hi;
  };
  const Window windows[] = {{"full", X0, X1},
                            {"inner", X0, X0 + 0.6 * span},
                            {"outer", X1 - 0.6 * span, X1},
                            {"middle", X0 + 0.2 * span, X1 - 0.2 * span}};
  struct Mode {
    int n;
    bool sine;
  };
  const Mode modes[] = {{0, false}, {1, false}, {1, true}, {2, false}, {2, true}, {3, false}, {3, true}, {4, false}};
  const SpMat Px = spectra::clamped_prolongation(n0);
  std::vector<SuiteField> out;
  for (const auto& w : windows)
    for (const auto& m : modes) {
      // bump ((x - lo)(hi - x))^2 sampled on the free rows, then prolongated
      Eigen::VectorXd radial_free(Px.cols());
      const double half = 0.5 * (w.hi - w.lo);
      for (int c = 0; c < Px.cols(); ++c) {
        const double x = p.x(c + 2);
        const double q = x > w.lo && x < w.hi ? (x - w.lo) * (w.hi - x) / (half * half) : 0.0;
        radial_free(c) = q * q;
      }
      const Eigen::VectorXd radial = Px * radial_free;
      SuiteField s;
      s.label = std::string(w.name) + ":" + std::to_string(m.n) + (m.sine ? ":sin" : ":cos");
      s.u.resize(p.nodes());
      for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
          const double y = p.ax1.coord(j);
          s.u[p.idx(i, j)] = radial(i) * (m.sine ? std::sin(m.n * y) : std::cos(m.n * y));
        }
      out.push_back(std::move(s));
    }
  return out;
}

PositivityReport neck_positivity_test(const ConformalPatch& p, const GeometryFields& f, double beta1, double beta2) {
  require_annulus(p);
  if (!(beta1 > 0.5 && beta1 < 1.0)) throw Error(ErrorCode::BadBeta, "need 1/2 < beta_1 < 1");
  if (!(beta2 > std::sqrt(2.0) - 1.0 && beta2 < 1.0)) throw Error(ErrorCode::BadBeta, "need sqrt2 - 1 < beta_2 < 1");
  const auto w1 = neck_weight(spectra::WeightKind::neck_w1, p, beta1, beta2);
  const auto w2 = neck_weight(spectra::WeightKind::neck_w2, p, beta1, beta2);
  const auto a = hessian::assemble_Q(p, f, hessian::Closure::clamped_annulus);

  // planar measures: d^2z = |z|^2 dx dy, and |grad_z u|^2 d^2z = |grad u|^2 dx dy
  std::vector<double> m1(p.nodes()), c2(p.nodes());
  for (int i = 0; i < p.n0(); ++i)
    for (int j = 0; j < p.n1(); ++j) {
      const int k = p.idx(i, j);
      const double r = std::exp(p.x(i));
      m1[k] = w1.density(r) * r * r * p.cell(i);
      c2[k] = w2.density(r);
    }
  const SpMat M1n = numlin::diagonal(m1);
  const SpMat G2n = hessian::weighted_dirichlet(p, c2);
  const SpMat M1 = a.P.transpose() * M1n * a.P;
  const SpMat G2 = a.P.transpose() * G2n * a.P;

  PositivityReport out;
  out.beta1 = beta1;
  out.beta2 = beta2;
  out.lambda1 = lowest(a.Q, M1);
  out.lambda2 = lowest(a.Q, G2);
  out.gauss_energy = geometry::normal_energy(p, f);
  out.asserted = out.gauss_energy <= kEpsReport;
  out.all_positive = true;
  out.min_margin = INFINITY;
  for (const auto& s : neck_suite(p)) {
    const double q = hessian::q_value(a, s.u), W1 = quad(M1n, s.u), W2 = quad(G2n, s.u);
    const double margin = q - 0.5 * (out.lambda1 * W1 + out.lambda2 * W2);
    out.labels.push_back(s.label);
    out.Q.push_back(q);
    out.W1.push_back(W1);
    out.W2.push_back(W2);
    out.margin.push_back(margin);
    out.min_margin = std::min(out.min_margin, margin);
    out.all_positive = out.all_positive && q > 0.0;
  }
  return out;
}

double calibrate_eps_report(const std::vector<PositivityReport>& sweep) {
  std::vector<const PositivityReport*> order;
  for (const auto& r : sweep) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->gauss_energy < y->gauss_energy; });
  double eps = 0.0;
  for (const auto* r : order) {
    if (!r->all_positive) break;
    eps = r->gauss_energy;
  }
  return eps;
}

// ---------------------------------------------------------------- quantization

double gauss_map_l21(const ConformalPatch& p, const GeometryFields& f) {
  require_annulus(p);
  lorentz::SampledField s;
  for (int i = 0; i < p.n0(); ++i) {
    const double r = std::exp(p.x(i));
    for (int j = 0; j < p.n1(); ++j) {
      const int k = p.idx(i, j);
      s.values.push_back(std::sqrt(std::max(f.A2[k] * f.e2l[k], 0.0)) / r);
      s.measures.push_back(r * r * p.cell(i));
    }
  }
  return lorentz::norm_l21(s);
}

double log_gradient_l21(double l, int radial, int angular) {
  if (!(l > 0.0)) throw Error(ErrorCode::BadParam, "neck length must be positive");
  return lorentz::norm_l21(lorentz::inverse_radius_field(std::exp(-l), 1.0, radial, angular));
}

double log_gradient_l21_exact(double l) {
  return 4.0 * std::sqrt(pi) * (l + std::log(1.0 + std::sqrt(1.0 - std::exp(-2.0 * l))));
}

QuantReport quantization_criterion(const std::vector<double>& ts, const std::vector<double>& gamma1,
                                   const std::vector<double>& ls, const std::vector<double>& l21) {
  if (ts.size() != gamma1.size() || ts.size() != ls.size() || (!l21.empty() && l21.size() != ts.size()))
    throw Error(ErrorCode::ShapeMismatch, "quantization inputs differ in length");
  QuantReport out;
  double biggest = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    QuantRow row;
    row.t = ts[k];
    row.gamma1 = std::abs(gamma1[k]);
    row.l = ls[k];
    row.product = row.gamma1 * row.l;
    row.l21 = l21.empty() ? 0.0 : l21[k];
    biggest = std::max(biggest, row.product);
    out.rows.push_back(row);
  }
  out.decreasing = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k)
    if (out.rows[k].product > out.rows[k - 1].product + kResidueZero) out.decreasing = false;
  const bool vanish = biggest <= kResidueZero;
  out.criterion_holds =
      out.decreasing && (vanish || (!out.rows.empty() && out.rows.back().product < out.rows.front().product));
  return out;
}

QuantReport quantization_sweep(const NeckFamily& family, int n0, int n1, Exec exec) {
  family.validate();
  const auto& ts = family.t_list;
  std::vector<double> g(ts.size()), l(ts.size()), n21(ts.size());
  for_each_index(ts.size(), exec, [&](std::size_t k) {
    const double t = ts[k];
    auto id = family.surface(t);
    id.a = t * std::exp(-2.0);
    const auto p = geometry::build_surface(id, n0, n1);
    const auto f = geometry::derive_geometry(p);
    const auto res = geometry::second_residue(p, f, geometry::contour_at_radius(p, std::numbers::e * t));
    g[k] = res.gamma1.norm();
    l[k] = std::log(family.b / t);
    n21[k] = gauss_map_l21(p, f);
  });
  return quantization_criterion(ts, g, l, n21);
}

// ---------------------------------------------------------------- sweep

NeckSweep neck_sweep(const NeckFamily& family, int rings, double beta, double beta1, double beta2, int res,
                     Exec exec) {
  family.validate();
  NeckSweep out;
  out.slices.resize(family.t_list.size());
  for_each_index(family.t_list.size(), exec, [&](std::size_t k) {
    const double t = family.t_list[k];
    SweepSlice& s = out.slices[k];
    s.t = t;
    const auto fine = family.patch(t, 4 * res, 32);
    const auto ff = geometry::derive_geometry(fine);
    s.profile = neck_energy_profile(fine, ff, rings);
    s.profile.t = t;
    s.decay = pointwise_decay_diagnostic(fine, ff, beta);
    const auto coarse = family.patch(t, res, 32);
    s.positivity = neck_positivity_test(coarse, geometry::derive_geometry(coarse), beta1, beta2);
  });
  std::vector<const SweepSlice*> order;
  for (const auto& s : out.slices) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](auto* x, auto* y) { return x->positivity.gauss_energy > y->positivity.gauss_energy; });
  // slices whose energies agree to 1e-9 are ties and impose no order
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& hi = order[k - 1]->positivity;
    const auto& lo = order[k]->positivity;
    if (hi.gauss_energy - lo.gauss_energy <= 1e-9 * hi.gauss_energy) continue;
    if (lo.min_margin < hi.min_margin - 1e-9 * std::max(1.0, std::abs(hi.min_margin))) out.margins_monotone = false;
  }
  return out;
}

}  // namespace wspectra::neck
