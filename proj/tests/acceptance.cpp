// Acceptance run: one PASS/FAIL line per criterion.  Reference values are
// closed forms evaluated here, never the library's own bound functions.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wspectra/annulus_harmonics.hpp"
#include "wspectra/errors.hpp"
#include "wspectra/immersion_geometry.hpp"
#include "wspectra/lorentz_norms.hpp"
#include "wspectra/neck_lab.hpp"
#include "wspectra/singular_spectra.hpp"
#include "wspectra/willmore_hessian.hpp"

using namespace wspectra;
constexpr double pi = std::numbers::pi;

namespace {

double rel(double v, double ref) { return std::abs(v - ref) / std::abs(ref); }

struct Verdict {
  bool pass = true;
  std::string detail;
  void need(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---- closed-form oracles ----
double q_of(double L) { return pi * pi / (L * L); }
double u4_2d(int m, double L) { return 4.0 * m * m * q_of(L); }
double grad_2d(int m, double L) { return (4.0 * m * m + q_of(L)) * q_of(L) / (4.0 * (m * m + 1.0) + 2.0 * q_of(L)); }
double rellich_u4(int d, double L) { return (d * d / 4.0 + q_of(L)) * ((d - 4.0) * (d - 4.0) / 4.0 + q_of(L)); }
double rellich_grad_d3(double L) {
  const double q = q_of(L);
  return (25.0 + 104.0 * q + 16.0 * q * q) / (36.0 + 16.0 * q);
}

// Smallest first eigenvalue over the modes 0..n_max.
double min_over_modes(int n_max, const std::function<double(int)>& f) {
  double best = INFINITY;
  for (int n = 0; n <= n_max; ++n) best = std::min(best, f(n));
  return best;
}

Verdict c1_lorentz() {
  Verdict v;
  const auto f = lorentz::inverse_radius_field(0.1, 1.0, 1024, 512);
  const auto g = lorentz::inverse_radius_field(0.001, 1.0, 1024, 512);
  const double l2 = lorentz::norm_l2(f), l21 = lorentz::norm_l21(f), weak = lorentz::norm_l2_weak(g);
  const double e2 = std::sqrt(2.0 * pi * std::log(10.0));
  const double e21 = 4.0 * std::sqrt(pi) * (std::log(10.0) + std::log(1.0 + std::sqrt(1.0 - 0.01)));
  const double ew = 2.0 * std::sqrt(pi);
  v.need(rel(l2, e2) <= 0.002, "L2");
  v.need(rel(l21, e21) <= 0.005, "L21");
  v.need(rel(weak, ew) <= 0.005, "weak L2");
  v.note(fmt("rel errs %.2e %.2e %.2e", rel(l2, e2), rel(l21, e21), rel(weak, ew)));
  return v;
}

Verdict c2_singular_2d() {
  Verdict v;
  double worst = INFINITY;
  for (int m : {1, 2})
    for (double L : {2.0, 4.0, 8.0}) {
      const auto g = spectra::RadialGrid::centred(L, 400);
      std::vector<double> u4(9), gr(9);
      for_each_index(9, Exec::parallel, [&](std::size_t n) {
        const auto op = spectra::assemble_mode_operator_2d(m, static_cast<int>(n), g);
        u4[n] = spectra::first_eigenvalue(op, spectra::Denom::u4);
        gr[n] = spectra::first_eigenvalue(op, spectra::Denom::grad2);
      });
      const double r4 = *std::min_element(u4.begin(), u4.end()) / u4_2d(m, L);
      const double rg = *std::min_element(gr.begin(), gr.end()) / grad_2d(m, L);
      worst = std::min({worst, r4, rg});
      v.need(r4 >= 0.995, fmt("m=%g L=%g u4 ratio %.4f", m, L, r4));
      v.need(rg >= 0.995, fmt("m=%g L=%g grad ratio %.4f", m, L, rg));
    }
  v.note(fmt("min lambda/bound %.4f", worst));
  return v;
}

Verdict c3_d4_bracket() {
  Verdict v;
  for (double L : {2.0, 4.0, 8.0}) {
    const auto g = spectra::RadialGrid::centred(L, 400);
    const double lam = min_over_modes(8, [&](int l) {
      return spectra::first_eigenvalue(spectra::assemble_mode_operator_dim(4, l, g), spectra::Denom::u4);
    });
    const double lo = (4.0 + q_of(L)) * q_of(L), hi = (4.0 + 4.0 * q_of(L)) * 4.0 * q_of(L);
    v.need(lam >= lo * 0.995 && lam <= hi, fmt("L=%g lambda %.5g outside [%.5g, ...]", L, lam, lo));
    v.note(fmt("L=%g: %.5g in [%.5g", L, lam, lo) + fmt(", %.5g]", hi));
  }
  return v;
}

Verdict c4_rellich() {
  Verdict v;
  const auto g16 = spectra::RadialGrid::centred(16.0, 400);
  const double lam5 = min_over_modes(8, [&](int l) {
    return spectra::first_eigenvalue(spectra::assemble_mode_operator_dim(5, l, g16), spectra::Denom::u4);
  });
  const double b5 = rellich_u4(5, 16.0);
  v.need(lam5 >= b5 * 0.995, "d=5 lower bound");
  v.need(lam5 <= 1.05 * b5, "d=5 not within 5% of the bound");
  v.note(fmt("d=5 L=16 lambda/bound %.4f (classical 25/16 = %.4f, lambda %.5f)", lam5 / b5, 25.0 / 16.0, lam5));
  const auto g8 = spectra::RadialGrid::centred(8.0, 400);
  const double lam3 = min_over_modes(8, [&](int l) {
    return spectra::first_eigenvalue(spectra::assemble_mode_operator_dim(3, l, g8), spectra::Denom::grad2);
  });
  v.need(lam3 >= rellich_grad_d3(8.0) * 0.995, "d=3 gradient bound");
  v.note(fmt("d=3 L=8 grad ratio %.4f", lam3 / rellich_grad_d3(8.0)));
  return v;
}

Verdict c5_weighted_poincare() {
  Verdict v;
  const std::vector<double> Ls{2.0, 4.0, 8.0, 16.0};
  auto spread = [](const std::vector<double>& c) {
    if (c.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    return *hi / *lo;
  };
  for (double beta : {0.6, 0.75, 0.9}) {
    const auto r = spectra::verify_weighted_poincare(1, beta, Ls, 8, 400);
    const double s = std::max(spread(r.C_u4), spread(r.C_grad));
    v.need(s <= 10.0, fmt("m=1 beta=%g spread %.3g", beta, s));
    v.note(fmt("m=1 beta=%g spread %.3g", beta, s));
  }
  const auto r2 = spectra::verify_weighted_poincare(2, 0.5, Ls, 8, 400);
  const double s2 = spread(r2.C_combined);
  v.need(!r2.C_combined.empty() && s2 <= 10.0, fmt("m=2 spread %.3g", s2));
  v.note(fmt("m=2 alpha=0.5 spread %.3g", s2));
  return v;
}

Verdict c6_harmonics() {
  Verdict v;
  const auto r = harmonics::verify_harmonic_suite(1, 100, {0.01, 1.0});
  v.need(r.pass(), "suite failures");
  v.need(std::abs(r.equality_ratio - 1.0) <= 1e-9, "equality case");
  v.note(fmt("equality ratio %.12f, pointwise max %.3f", r.equality_ratio, r.pointwise_max));
  return v;
}

Verdict c7_sequences() {
  Verdict v;
  const auto s = harmonics::verify_sequence_suite(2, 1000);
  v.need(s.sequence_fail == 0, "sequence failures");
  v.note(fmt("max ratio %.3f", s.sequence_max));
  return v;
}

Verdict c8_divergence() {
  Verdict v;
  for (double alpha : {3.0, 4.0}) {
    std::mt19937_64 rng(7);
    std::vector<spectra::DivSource> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back(spectra::random_div_source(rng));
    const auto r = spectra::verify_div_weight_bound(alpha, corpus, 400);
    const double q = (alpha * alpha + 1.0) / (alpha * alpha - 8.0);
    v.need(std::abs(spectra::cz_constant(alpha) - 25.0 * q * q) <= 1e-12 * 25.0 * q * q, "constant");
    v.need(r.pass, fmt("alpha=%g max ratio %.3g", alpha, r.max_ratio));
    v.note(fmt("alpha=%g max ratio %.3g", alpha, r.max_ratio));
  }
  return v;
}

Verdict c9_geometry() {
  using namespace geometry;
  Verdict v;
  SurfaceId s, c;
  s.kind = SurfaceKind::round_sphere;
  c.kind = SurfaceKind::clifford_torus;
  const auto sp = build_surface(s, 64);
  const auto sf = derive_geometry(sp);
  const auto cp = build_surface(c, 64);
  const auto cf = derive_geometry(cp);
  const auto cp2 = build_surface(c, 128);
  const auto cf2 = derive_geometry(cp2);
  const double Ws = willmore_energy(sp, sf), Wc = willmore_energy(cp, cf), NE = normal_energy(sp, sf);
  const double GBs = gauss_bonnet(sp, sf), GBc = gauss_bonnet(cp, cf);
  const double ratio = willmore_residual(cp, cf).rms / willmore_residual(cp2, cf2).rms;
  v.need(rel(Ws, 4.0 * pi) <= 0.001, "sphere W");
  v.need(rel(Wc, 2.0 * pi * pi) <= 0.005, "Clifford W");
  v.need(rel(NE, 8.0 * pi) <= 0.005, "sphere normal energy");
  v.need(rel(GBs, 4.0 * pi) <= 0.005, "sphere Gauss-Bonnet");
  v.need(std::abs(GBc) <= 0.05, "torus Gauss-Bonnet");
  v.need(std::abs(ratio - 4.0) <= 1.2, "residual refinement");
  v.note(fmt("W errs %.1e %.1e, residual ratio %.3f", rel(Ws, 4.0 * pi), rel(Wc, 2.0 * pi * pi), ratio));
  return v;
}

Verdict c10_inversion() {
  using namespace geometry;
  Verdict v;
  SurfaceId t;
  t.kind = SurfaceKind::torus_of_revolution;
  t.R = 2.0;
  t.r = 1.0;
  const auto p = build_surface(t, 64);
  const double ce = conformal_energy(p, derive_geometry(p));
  for (const Vec3 centre : {Vec3(0.0, 0.0, 0.5), Vec3(0.4, -0.3, 2.0), Vec3(4.0, 1.0, 0.0)}) {
    Mobius m;
    m.kind = Mobius::inversion;
    m.v = centre;
    const auto q = apply_mobius(p, m);
    const double e = rel(conformal_energy(q, derive_geometry(q)), ce);
    v.need(e <= 0.01, fmt("centre (%g, %g, %g)", centre.x(), centre.y(), centre.z()));
    v.note(fmt("rel err %.2e", e));
  }
  return v;
}

Verdict c11_hessian() {
  using namespace hessian;
  using geometry::SurfaceKind;
  Verdict v;
  geometry::SurfaceId sphere, torus;
  sphere.kind = SurfaceKind::round_sphere;
  torus.kind = SurfaceKind::clifford_torus;

  // eps_h from refinement pairs, and its decay under h -> h/2
  const auto s32 = calibrated_spectrum(sphere, 32, std::nullopt, 16);
  const auto s64 = calibrated_spectrum(sphere, 64, std::nullopt, 16);
  const double eps = s64.tol_null, decay = s32.tol_null / s64.tol_null;
  v.need(std::abs(decay - 4.0) <= 1.2, fmt("eps_h decay %.3f", decay));
  v.need(s64.coarse.eigenvalues.front() >= -eps, "sphere min eigenvalue below -eps_h");
  v.note(fmt("eps_h %.3g (x%.2f), sphere min %.2e", eps, decay, s64.coarse.eigenvalues.front()));

  const auto w = chart_power_weight(0.75, 0.5, 3.0);
  for (const auto& id : {sphere, torus}) {
    const auto u = id.kind == SurfaceKind::round_sphere ? s64 : calibrated_spectrum(id, 64, std::nullopt, 16);
    const auto cw = calibrated_spectrum(id, 64, w, 16);
    const auto p = geometry::build_surface(id, 64);
    const auto f = geometry::derive_geometry(p);
    const auto a = assemble_Q(p, f);
    double mob = 0.0;
    for (const auto& fld : mobius_null_fields(p, f)) {
      const double m = mass_value(a, fld);
      if (m > 1e-12) mob = std::max(mob, std::abs(q_value(a, fld)) / m);
    }
    const std::string name = id.name();
    v.need(mob <= u.tol_null, name + " Moebius ratio above eps_h");
    v.need(u.coarse.index == cw.coarse.index && u.coarse.nullity == cw.coarse.nullity, name + " Sylvester");
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s (i,n) uniform (%d,%d) weighted (%d,%d), Moebius %.2e", name.c_str(),
                  u.coarse.index, u.coarse.nullity, cw.coarse.index, cw.coarse.nullity, mob);
    v.note(buf);
  }

  // flat annulus: Hessian spectrum against the one-mode reductions (m = 1)
  geometry::SurfaceId flat;
  flat.kind = SurfaceKind::flat_plane;
  flat.a = std::exp(-2.0);
  flat.b = 1.0;
  const int n0 = 64, n1 = 32;
  const auto p = geometry::build_surface(flat, n0, n1);
  const auto s = spectrum(assemble_Q(p, geometry::derive_geometry(p)), std::nullopt, 16, 0.0);
  spectra::RadialGrid g{flat.a, flat.b, n0 - 2};
  spectra::WeightSpec uniform;
  const double h = 2.0 * pi / n1;
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n) {
    const double sym = std::pow(2.0 * std::sin(n * h / 2.0) / h, 2);
    const auto op = spectra::assemble_mode_operator_2d(1, n, g, spectra::Boundary::clamped, &uniform, sym);
    const double l = 0.5 * spectra::first_eigenvalue(op, spectra::Denom::weight);
    double best = INFINITY;
    for (double e : s.eigenvalues) best = std::min(best, rel(e, l));
    worst = std::max(worst, best);
  }
  v.need(worst <= 1e-8, fmt("flat match %.2e", worst));
  v.note(fmt("flat match %.1e", worst));
  return v;
}

Verdict c12_residues() {
  using namespace geometry;
  Verdict v;
  SurfaceId s;
  s.kind = SurfaceKind::round_sphere;
  const auto sp = build_surface(s, 64);
  const auto sf = derive_geometry(sp);
  double contractible = 0.0;
  for (int i = 4; i < sp.n0() - 4; i += 8)
    contractible = std::max(contractible, second_residue(sp, sf, {i}).gamma1.norm());
  v.need(contractible <= 1e-6, "contractible residue");

  SurfaceId c;
  c.kind = SurfaceKind::catenoid;
  c.t = 0.5;
  const auto cp = build_surface(c, 256, 64);
  const auto cf = derive_geometry(cp);
  const auto gi = second_residue(cp, cf, contour_at_radius(cp, 0.5 * std::exp(-1.0))).gamma1;
  const auto go = second_residue(cp, cf, contour_at_radius(cp, 0.5 * std::exp(1.0))).gamma1;
  v.need((gi - go).norm() <= 1e-6, "homotopy invariance");
  v.note(fmt("contractible %.1e, homotopy %.1e", contractible, (gi - go).norm()));

  for (double l : {2.0, 4.0, 8.0}) {
    const double exact = 4.0 * std::sqrt(pi) * (l + std::log(1.0 + std::sqrt(1.0 - std::exp(-2.0 * l))));
    const double e = rel(neck::log_gradient_l21(l), exact);
    v.need(e <= 0.01, fmt("l=%g log-gradient L21", l));
    v.note(fmt("l=%g err %.1e", l, e));
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"Lorentz closed forms", c1_lorentz},
      {"2-D singular eigenvalue bounds", c2_singular_2d},
      {"d = 4 two-sided bracket", c3_d4_bracket},
      {"Rellich limit", c4_rellich},
      {"weighted Poincare boundedness", c5_weighted_poincare},
      {"harmonic annulus suite", c6_harmonics},
      {"sequence lemma", c7_sequences},
      {"weighted divergence bound", c8_divergence},
      {"geometry golden values", c9_geometry},
      {"conformal invariance under inversion", c10_inversion},
      {"Hessian properties", c11_hessian},
      {"residues and log-gradient norm", c12_residues},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %-40s %s  [%.1fs] %s\n", k + 1, criteria[k].first.c_str(), v.pass ? "PASS" : "FAIL",
                sec, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
