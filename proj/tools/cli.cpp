#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>

#include "wspectra/annulus_harmonics.hpp"
#include "wspectra/errors.hpp"
#include "wspectra/immersion_geometry.hpp"
#include "wspectra/lorentz_norms.hpp"
#include "wspectra/neck_lab.hpp"
#include "wspectra/report.hpp"
#include "wspectra/singular_spectra.hpp"
#include "wspectra/willmore_hessian.hpp"

namespace wspectra::cli {

namespace {
using report::Cell;
using report::Table;
using Json = nlohmann::ordered_json;
constexpr double pi = std::numbers::pi;

struct Outcome {
  Table table;
  Json summary = Json::object();
  bool pass = true;
};

struct Common {
  std::string out = "wspectra_out";
  std::string format = "csv";
  std::string config;
  bool serial = false;
  bool quiet = false;
};

using Handler = std::function<Outcome(const Common&)>;

struct Sub {
  CLI::App* app = nullptr;
  Handler handler;
};

double rel_err(double v, double ref) { return std::abs(v - ref) / std::abs(ref); }

Cell integer(long long v) { return v; }

void usage_if(bool bad, const std::string& what) {
  if (bad) throw Error(ErrorCode::Usage, what);
}

Exec exec_of(const Common& c) { return c.serial ? Exec::serial : Exec::parallel; }

// Flat `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Usage, "cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Usage, path + ":" + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_config(CLI::App* app, const std::string& path) {
  for (const auto& [key, value] : read_config(path)) {
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (!opt) throw Error(ErrorCode::Usage, "unknown config key '" + key + "'");
    if (opt->count() > 0) continue;  // the flag wins
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw Error(ErrorCode::Usage, "bad value for '" + key + "': " + e.what());
    }
  }
}

Table sweep_table(const std::vector<spectra::ReportRow>& rows) {
  Table t;
  t.columns = {"family", "denom", "mode", "L", "N", "lambda1", "bound", "ratio", "asserted", "pass"};
  t.plot_x = "L";
  t.plot_y = "ratio";
  for (const auto& r : rows)
    t.add({integer(r.family), r.denom, integer(r.mode), r.L, integer(r.N), r.lambda1, r.bound, r.ratio, r.asserted,
           r.pass});
  return t;
}

bool rows_pass(const std::vector<spectra::ReportRow>& rows) {
  for (const auto& r : rows)
    if (r.asserted && !r.pass) return false;
  return true;
}

// ------------------------------------------------------------------ harmonics

struct HarmonicOpts {
  std::uint64_t seed = 1, seq_seed = 2;
  int count = 100, seq_count = 1000, K = 8;
  double a = 0.01, b = 1.0;
};

Outcome harmonic_props(const HarmonicOpts& o) {
  usage_if(o.count < 1 || o.seq_count < 1, "counts must be positive");
  const auto h = harmonics::verify_harmonic_suite(o.seed, o.count, harmonics::AnnulusSpec{o.a, o.b}, o.K);
  const auto s = harmonics::verify_sequence_suite(o.seq_seed, o.seq_count);
  Outcome out;
  out.table.columns = {"check", "instances", "failures", "max_ratio", "pass"};
  auto row = [&](const char* name, int n, int fail, double mx) { out.table.add({name, integer(n), integer(fail), mx, fail == 0}); };
  row("pointwise", h.count, h.pointwise_fail, h.pointwise_max);
  row("average", h.count, h.average_fail, h.average_max);
  row("monotonicity", 4 * h.count, h.mono_fail, h.mono_max);
  row("ball_decay", h.count, h.ball_fail, h.ball_max);
  row("sequence_lemma", s.count, s.sequence_fail, s.sequence_max);
  const bool eq = std::abs(h.equality_ratio - 1.0) <= 1e-9;
  out.table.add({"equality_case", integer(1), integer(eq ? 0 : 1), h.equality_ratio, eq});
  out.summary["equality_ratio"] = h.equality_ratio;
  out.pass = h.pass() && s.pass();
  return out;
}

// ------------------------------------------------------------------ lorentz

struct LorentzOpts {
  double a = 0.1, b = 1.0, weak_a = 0.001;
  int radial = 1024, angular = 512;
};

Outcome lorentz_forms(const LorentzOpts& o) {
  usage_if(!(o.a > 0 && o.b > o.a && o.weak_a > 0 && o.weak_a < o.b), "need 0 < a < b");
  const auto f = lorentz::inverse_radius_field(o.a, o.b, o.radial, o.angular);
  const auto g = lorentz::inverse_radius_field(o.weak_a, o.b, o.radial, o.angular);
  const double l = std::log(o.b / o.a), q = (o.a / o.b) * (o.a / o.b);
  Outcome out;
  out.table.columns = {"norm", "value", "exact", "rel_err", "tol", "pass"};
  auto row = [&](const char* name, double v, double ex, double tol) {
    const double e = rel_err(v, ex);
    out.table.add({name, v, ex, e, tol, e <= tol});
    out.pass = out.pass && e <= tol;
  };
  row("l2", lorentz::norm_l2(f), std::sqrt(2.0 * pi * l), 0.002);
  row("l21", lorentz::norm_l21(f), 4.0 * std::sqrt(pi) * (l + std::log(1.0 + std::sqrt(1.0 - q))), 0.005);
  row("l2_weak", lorentz::norm_l2_weak(g), 2.0 * std::sqrt(pi), 0.005);
  return out;
}

// ------------------------------------------------------------------ spectra

struct SpectraOpts {
  int m = 1, d = 5, N = 400, modes = 8;
  std::vector<double> L{2, 4, 8};
  double beta = 0.75, gamma = 0.6;
};

Outcome eig_2d(const SpectraOpts& o, const Common& c) {
  usage_if(o.m < 1, "--m must be at least 1");
  usage_if(o.N < 16 || o.modes < 0, "need N >= 16 and modes >= 0");
  const auto rep = spectra::verify_singular_2d(o.m, o.L, o.modes, o.N, exec_of(c));
  Outcome out{sweep_table(rep.rows), Json::object(), rows_pass(rep.rows)};
  return out;
}

Outcome eig_dim(const SpectraOpts& o, const Common& c) {
  usage_if(o.d < 3, "--d must be at least 3");
  usage_if(o.N < 16 || o.modes < 0, "need N >= 16 and modes >= 0");
  auto rows = spectra::verify_rellich_dim(o.d, o.L, o.modes, o.N, exec_of(c)).rows;
  if (o.d == 4) {
    const auto br = spectra::verify_d4_bracket(o.L, o.modes, o.N, exec_of(c)).rows;
    rows.insert(rows.end(), br.begin(), br.end());
  }
  return {sweep_table(rows), Json::object(), rows_pass(rows)};
}

Outcome weighted_poincare(const SpectraOpts& o, const Common& c) {
  usage_if(o.m < 1, "--m must be at least 1");
  const auto rep = spectra::verify_weighted_poincare(o.m, o.beta, o.L, o.modes, o.N, exec_of(c));
  Outcome out;
  out.table.columns = {"L", "C_u4", "C_grad", "C_combined"};
  out.table.plot_x = "L";
  out.table.plot_y = o.m == 1 ? "C_u4" : "C_combined";
  auto at = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : std::nan(""); };
  for (std::size_t k = 0; k < rep.Ls.size(); ++k)
    out.table.add({rep.Ls[k], at(rep.C_u4, k), at(rep.C_grad, k), at(rep.C_combined, k)});
  out.summary["ratio_u4"] = rep.ratio_u4;
  out.summary["ratio_grad"] = rep.ratio_grad;
  out.summary["ratio_combined"] = rep.ratio_combined;
  out.summary["bounded"] = rep.bounded;
  out.pass = rep.bounded;
  return out;
}

Outcome interp_const(const SpectraOpts& o, const Common& c) {
  const auto rep = spectra::interpolation_constant(o.beta, o.gamma, o.L, o.modes, o.N, exec_of(c));
  Outcome out;
  out.table.columns = {"L", "C", "argmax_mode"};
  out.table.plot_x = "L";
  out.table.plot_y = "C";
  for (std::size_t k = 0; k < rep.Ls.size(); ++k) out.table.add({rep.Ls[k], rep.C[k], integer(rep.argmax_mode[k])});
  out.summary["min_L"] = spectra::interpolation_min_L(o.beta);
  out.summary["ratio"] = rep.ratio;
  out.summary["bounded"] = rep.bounded;
  out.pass = rep.bounded;
  return out;
}

struct DivOpts {
  std::vector<double> alpha{3, 4};
  int count = 50, cells = 400;
  std::uint64_t seed = 7;
  double slack = 0.01;
};

Outcome div_bound(const DivOpts& o, const Common& c) {
  usage_if(o.count < 1 || o.cells < 16, "need count >= 1 and cells >= 16");
  Outcome out;
  out.table.columns = {"alpha", "source", "ratio", "pass"};
  for (double al : o.alpha) {
    std::mt19937_64 rng(o.seed);
    std::vector<spectra::DivSource> corpus;
    for (int i = 0; i < o.count; ++i) corpus.push_back(spectra::random_div_source(rng));
    const auto rep = spectra::verify_div_weight_bound(al, corpus, o.cells, o.slack, exec_of(c));
    for (std::size_t k = 0; k < rep.ratios.size(); ++k)
      out.table.add({al, integer(static_cast<long long>(k)), rep.ratios[k], rep.ratios[k] <= 1.0 + o.slack});
    out.summary["max_ratio_alpha_" + report::format_double(al)] = rep.max_ratio;
    out.pass = out.pass && rep.pass;
  }
  return out;
}

// ------------------------------------------------------------------ geometry

struct GeometryOpts {
  std::string surface = "round_sphere";
  int res = 64;
  double R = 2.0, r = 1.0, t = 1.0, a = 0.0, b = 0.0;
  std::vector<double> invert;  // inversion centre
  bool refine = false;
  std::string export_stem;
};

geometry::SurfaceId surface_id(const GeometryOpts& o) {
  auto id = geometry::SurfaceId::parse(o.surface);
  id.R = o.R;
  id.r = o.r;
  id.t = o.t;
  id.a = o.a;
  id.b = o.b;
  return id;
}

Outcome surface_geometry(const GeometryOpts& o) {
  using namespace geometry;
  const auto id = surface_id(o);
  usage_if(!o.invert.empty() && o.invert.size() != 3, "--invert takes three coordinates");
  const auto p = build_surface(id, o.res);
  const auto f = derive_geometry(p);
  Outcome out;
  out.table.columns = {"quantity", "value", "reference", "rel_err", "tol", "asserted", "pass"};
  auto report_only = [&](const std::string& q, double v) {
    out.table.add({q, v, std::nan(""), std::nan(""), std::nan(""), false, true});
    out.summary[q] = v;
  };
  auto check_rel = [&](const std::string& q, double v, double ref, double tol) {
    const double e = rel_err(v, ref);
    out.table.add({q, v, ref, e, tol, true, e <= tol});
    out.summary[q] = v;
    out.pass = out.pass && e <= tol;
  };
  auto check_abs = [&](const std::string& q, double v, double tol) {
    out.table.add({q, v, 0.0, std::abs(v), tol, true, std::abs(v) <= tol});
    out.summary[q] = v;
    out.pass = out.pass && std::abs(v) <= tol;
  };
  out.summary["surface"] = id.name();
  out.summary["res"] = o.res;
  report_only("area", area(p, f));
  const double W = willmore_energy(p, f), GB = gauss_bonnet(p, f), NE = normal_energy(p, f);
  switch (id.kind) {
    case SurfaceKind::round_sphere:
      check_rel("willmore_energy", W, 4.0 * pi, 0.001);
      check_rel("normal_energy", NE, 8.0 * pi, 0.005);
      check_rel("gauss_bonnet", GB, 4.0 * pi, 0.005);
      break;
    case SurfaceKind::clifford_torus:
      check_rel("willmore_energy", W, 2.0 * pi * pi, 0.005);
      report_only("normal_energy", NE);
      check_abs("gauss_bonnet", GB, 0.05);
      break;
    case SurfaceKind::torus_of_revolution:
      report_only("willmore_energy", W);
      report_only("normal_energy", NE);
      check_abs("gauss_bonnet", GB, 0.05);
      break;
    default:
      report_only("willmore_energy", W);
      report_only("normal_energy", NE);
      report_only("gauss_bonnet", GB);
  }
  report_only("normal_energy_direct", normal_energy_direct(p, f));
  const double CE = conformal_energy(p, f);
  report_only("conformal_energy", CE);
  const double rms = willmore_residual(p, f).rms;
  report_only("willmore_residual_rms", rms);
  report_only("conformality_residual", conformality_residual(p));
  if (o.refine) {
    const auto p2 = build_surface(id, 2 * o.res);
    const double rms2 = willmore_residual(p2, derive_geometry(p2)).rms;
    report_only("willmore_residual_rms_fine", rms2);
    if (id.kind == SurfaceKind::clifford_torus) {
      const double ratio = rms / rms2;
      const bool ok = std::abs(ratio - 4.0) <= 0.3 * 4.0;
      out.table.add({"residual_refinement_ratio", ratio, 4.0, rel_err(ratio, 4.0), 0.3, true, ok});
      out.summary["residual_refinement_ratio"] = ratio;
      out.pass = out.pass && ok;
    } else {
      report_only("residual_refinement_ratio", rms / rms2);
    }
  }
  if (!o.invert.empty()) {
    Mobius m;
    m.kind = Mobius::inversion;
    m.v = Vec3(o.invert[0], o.invert[1], o.invert[2]);
    const auto q = apply_mobius(p, m);
    check_rel("conformal_energy_inverted", conformal_energy(q, derive_geometry(q)), CE, 0.01);
  }
  if (!o.export_stem.empty()) export_patch(p, o.export_stem);
  return out;
}

// ------------------------------------------------------------------ hessian

struct HessianOpts {
  std::string surface = "round_sphere";
  int res = 64, k = 16;
  double beta = 0.75, weight_b = 0.5, weight_L = 3.0;
};

Outcome hessian_index(const HessianOpts& o) {
  using namespace hessian;
  usage_if(o.k < 1 || o.k > 200, "--k must lie in [1, 200]");
  Outcome out;
  auto id = geometry::SurfaceId::parse(o.surface);
  if (id.kind == geometry::SurfaceKind::flat_plane) {
    // flat annulus against the one-mode reductions with the matching angular symbol
    id.a = std::exp(-2.0);
    id.b = 1.0;
    const int n1 = 32;
    const auto p = geometry::build_surface(id, o.res, n1);
    const auto a = assemble_Q(p, geometry::derive_geometry(p));
    const auto s = spectrum(a, std::nullopt, o.k, 0.0);
    spectra::RadialGrid g;
    g.a = id.a;
    g.b = id.b;
    g.N = o.res - 2;
    spectra::WeightSpec uni;
    const double h = 2.0 * pi / n1;
    out.table.columns = {"mode", "reduced_half_lambda", "hessian_lambda", "rel_err", "pass"};
    double worst = 0.0;
    for (int n = 0; n <= 4; ++n) {
      const double sym = std::pow(2.0 * std::sin(n * h / 2.0) / h, 2);
      const auto op = spectra::assemble_mode_operator_2d(1, n, g, spectra::Boundary::clamped, &uni, sym);
      const double l = 0.5 * spectra::first_eigenvalue(op, spectra::Denom::weight);
      double best = INFINITY, hit = 0.0;
      for (double e : s.eigenvalues)
        if (std::abs(e - l) / l < best) {
          best = std::abs(e - l) / l;
          hit = e;
        }
      worst = std::max(worst, best);
      out.table.add({integer(n), l, hit, best, best <= 1e-8});
    }
    out.summary["max_rel_err"] = worst;
    out.pass = worst <= 1e-8;
    return out;
  }
  usage_if(id.kind != geometry::SurfaceKind::round_sphere && id.kind != geometry::SurfaceKind::clifford_torus,
           "hessian-index supports round_sphere, clifford_torus and flat_plane");
  const auto w = chart_power_weight(o.beta, o.weight_b, o.weight_L);
  const auto cu = calibrated_spectrum(id, o.res, std::nullopt, o.k);
  const auto cw = calibrated_spectrum(id, o.res, w, o.k);
  const double eps = cu.tol_null;
  const auto p = geometry::build_surface(id, o.res);
  const auto f = geometry::derive_geometry(p);
  const auto a = assemble_Q(p, f);
  double mobius = 0.0;
  for (const auto& u : mobius_null_fields(p, f)) {
    const double m = mass_value(a, u);
    if (m > 1e-12) mobius = std::max(mobius, std::abs(q_value(a, u)) / m);
  }
  out.table.columns = {"i", "uniform", "uniform_fine", "weighted", "weighted_fine"};
  out.table.plot_x = "i";
  out.table.plot_y = "uniform";
  for (std::size_t i = 0; i < cu.coarse.eigenvalues.size(); ++i)
    out.table.add({integer(static_cast<long long>(i)), cu.coarse.eigenvalues[i], cu.fine[i], cw.coarse.eigenvalues[i],
                   cw.fine[i]});
  const bool sylvester = cu.coarse.index == cw.coarse.index && cu.coarse.nullity == cw.coarse.nullity;
  const bool mob_ok = mobius <= eps;
  const bool min_ok = cu.coarse.eigenvalues.front() >= -eps;
  out.summary["surface"] = id.name();
  out.summary["res"] = o.res;
  out.summary["eps_h"] = eps;
  out.summary["uniform_index"] = cu.coarse.index;
  out.summary["uniform_nullity"] = cu.coarse.nullity;
  out.summary["weighted_index"] = cw.coarse.index;
  out.summary["weighted_nullity"] = cw.coarse.nullity;
  out.summary["weighted_tol_null"] = cw.tol_null;
  out.summary["mobius_max_ratio"] = mobius;
  out.summary["sylvester"] = sylvester;
  out.summary["mobius_null"] = mob_ok;
  out.summary["min_eigenvalue_ok"] = min_ok;
  out.pass = sylvester && mob_ok && (id.kind != geometry::SurfaceKind::round_sphere || min_ok);
  return out;
}

// ------------------------------------------------------------------ neck

struct NeckOpts {
  std::string family = "scaled_catenoid";
  std::vector<double> t{1e-2, 1e-3};
  std::vector<double> l{2, 4, 8};
  double a = 1e-5, b = 1.0;
  int rings = 12, res = 64;
  double beta = 0.75, beta1 = 0.75, beta2 = 0.6;
  std::optional<double> inject_gamma;
};

neck::NeckFamily family_of(const NeckOpts& o) {
  neck::NeckFamily fam;
  fam.kind = neck::NeckFamily::parse_kind(o.family);
  fam.a = o.a;
  fam.b = o.b;
  fam.t_list = o.t;
  fam.validate();
  return fam;
}

Outcome neck_sweep(const NeckOpts& o, const Common& c) {
  const auto fam = family_of(o);
  const auto sw = neck::neck_sweep(fam, o.rings, o.beta, o.beta1, o.beta2, o.res, exec_of(c));
  Outcome out;
  out.table.columns = {"t", "ring", "r_lo", "r_hi", "energy"};
  out.table.plot_x = "ring";
  out.table.plot_y = "energy";
  auto slices = Json::array();
  for (const auto& s : sw.slices) {
    for (const auto& r : s.profile.rings) out.table.add({s.t, integer(r.ring), r.r_lo, r.r_hi, r.energy});
    Json j;
    j["t"] = s.t;
    j["ring_total"] = s.profile.total;
    j["C_emp"] = s.decay.C_emp;
    j["gauss_energy"] = s.positivity.gauss_energy;
    j["lambda1_hat"] = s.positivity.lambda1;
    j["lambda2_hat"] = s.positivity.lambda2;
    j["min_margin"] = s.positivity.min_margin;
    j["all_positive"] = s.positivity.all_positive;
    j["asserted"] = s.positivity.asserted;
    slices.push_back(j);
    if (s.positivity.asserted) out.pass = out.pass && s.positivity.all_positive;
  }
  out.summary["eps_report"] = neck::kEpsReport;
  out.summary["slices"] = slices;
  out.summary["margins_monotone"] = sw.margins_monotone;
  return out;
}

Outcome quantization(const NeckOpts& o, const Common& c) {
  using namespace geometry;
  const auto fam = family_of(o);
  auto q = neck::quantization_sweep(fam, 256, 64, exec_of(c));
  if (o.inject_gamma) {
    std::vector<double> ts, g, l, n21;
    for (const auto& r : q.rows) {
      ts.push_back(r.t);
      g.push_back(*o.inject_gamma);
      l.push_back(r.l);
      n21.push_back(r.l21);
    }
    q = neck::quantization_criterion(ts, g, l, n21);
  }
  Outcome out;
  out.table.columns = {"t", "gamma1", "l", "product", "l21_gauss_map"};
  out.table.plot_x = "l";
  out.table.plot_y = "product";
  for (const auto& r : q.rows) out.table.add({r.t, r.gamma1, r.l, r.product, r.l21});
  out.summary["criterion_holds"] = q.criterion_holds;
  out.summary["decreasing"] = q.decreasing;
  out.pass = q.criterion_holds;

  auto logs = Json::array();
  for (double l : o.l) {
    const double v = neck::log_gradient_l21(l), ex = neck::log_gradient_l21_exact(l);
    const bool ok = rel_err(v, ex) <= 0.01;
    logs.push_back({{"l", l}, {"value", v}, {"exact", ex}, {"rel_err", rel_err(v, ex)}, {"pass", ok}});
    out.pass = out.pass && ok;
  }
  out.summary["log_gradient_l21"] = logs;

  // contractible circles on the sphere chart, and two circles around a catenoid neck
  const auto sp = build_surface(SurfaceId::parse("round_sphere"), 64);
  const auto sf = derive_geometry(sp);
  double contractible = 0.0;
  for (int i = 4; i < sp.n0() - 4; i += 8) contractible = std::max(contractible, second_residue(sp, sf, {i}).gamma1.norm());
  SurfaceId cid = SurfaceId::parse("catenoid");
  cid.t = 0.5;
  const auto cp = build_surface(cid, 256, 64);
  const auto cf = derive_geometry(cp);
  const auto g_in = second_residue(cp, cf, contour_at_radius(cp, 0.5 * std::exp(-1.0))).gamma1;
  const auto g_out = second_residue(cp, cf, contour_at_radius(cp, 0.5 * std::exp(1.0))).gamma1;
  const double homotopy = (g_in - g_out).norm();
  out.summary["contractible_gamma1_max"] = contractible;
  out.summary["neck_homotopy_defect"] = homotopy;
  out.pass = out.pass && contractible <= 1e-6 && homotopy <= 1e-6;
  return out;
}

void write_outputs(const std::string& name, const Outcome& o, const Common& c) {
  const auto fmt = report::parse_format(c.format);
  const std::string stem = (std::filesystem::path(c.out) / name).string();
  report::emit_report(o.table, fmt, stem + (fmt == report::Format::csv ? ".csv" : ".json"));
  Json summary = Json::object();
  summary["subcommand"] = name;
  summary["pass"] = o.pass;
  for (const auto& [k, v] : o.summary.items()) summary[k] = v;
  report::write_json(summary, stem + ".summary.json");
}
}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "harmonic-props", "lorentz-forms",    "eig-2d",        "eig-dim",    "weighted-poincare", "interp-const",
      "div-bound",      "surface-geometry", "hessian-index", "neck-sweep", "quantization"};
  return names;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Weighted spectra and Willmore Hessian laboratory"};
  app.require_subcommand(1);
  Common common;
  HarmonicOpts ho;
  LorentzOpts lo;
  SpectraOpts so;
  DivOpts dv;
  GeometryOpts go;
  HessianOpts hs;
  NeckOpts nk;
  double inject = 0.0;

  std::map<std::string, Sub> subs;
  auto add = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--out", common.out, "output directory");
    s->add_option("--format", common.format, "csv or json");
    s->add_option("--config", common.config, "flat key = value file; flags override it");
    s->add_flag("--serial", common.serial, "use the serial reference path");
    s->add_flag("--quiet", common.quiet, "log warnings only");
    subs[name] = {s, std::move(h)};
    return s;
  };

  auto* s = add("harmonic-props", "harmonic annulus estimates and the sequence lemma",
                [&](const Common&) { return harmonic_props(ho); });
  s->add_option("--seed", ho.seed);
  s->add_option("--count", ho.count);
  s->add_option("--seq-seed", ho.seq_seed);
  s->add_option("--seq-count", ho.seq_count);
  s->add_option("--K", ho.K);
  s->add_option("--a", ho.a);
  s->add_option("--b", ho.b);

  s = add("lorentz-forms", "closed-form Lorentz norms of 1/|x|", [&](const Common&) { return lorentz_forms(lo); });
  s->add_option("--a", lo.a);
  s->add_option("--b", lo.b);
  s->add_option("--weak-a", lo.weak_a);
  s->add_option("--radial", lo.radial);
  s->add_option("--angular", lo.angular);

  auto spectra_opts = [&](CLI::App* a) {
    a->add_option("--L", so.L)->delimiter(',');
    a->add_option("--N", so.N);
    a->add_option("--modes", so.modes, "largest |n| or ell swept");
  };
  s = add("eig-2d", "2-D singular eigenvalue bounds", [&](const Common& c) { return eig_2d(so, c); });
  s->add_option("--m", so.m);
  spectra_opts(s);
  s = add("eig-dim", "bilaplacian bounds in dimension d", [&](const Common& c) { return eig_dim(so, c); });
  s->add_option("--d", so.d);
  spectra_opts(s);
  s = add("weighted-poincare", "weighted Poincare constants across conformal classes",
          [&](const Common& c) { return weighted_poincare(so, c); });
  s->add_option("--m", so.m);
  s->add_option("--beta", so.beta);
  spectra_opts(s);
  s = add("interp-const", "interpolation constant across conformal classes",
          [&](const Common& c) { return interp_const(so, c); });
  s->add_option("--beta", so.beta);
  s->add_option("--gamma", so.gamma);
  spectra_opts(s);

  s = add("div-bound", "weighted divergence estimate on random sources", [&](const Common& c) { return div_bound(dv, c); });
  s->add_option("--alpha", dv.alpha)->delimiter(',');
  s->add_option("--count", dv.count);
  s->add_option("--cells", dv.cells);
  s->add_option("--seed", dv.seed);
  s->add_option("--slack", dv.slack);

  s = add("surface-geometry", "energies and residuals of a model surface",
          [&](const Common&) { return surface_geometry(go); });
  s->add_option("--surface", go.surface);
  s->add_option("--res", go.res);
  s->add_option("--R", go.R);
  s->add_option("--r", go.r);
  s->add_option("--t", go.t);
  s->add_option("--a", go.a);
  s->add_option("--b", go.b);
  s->add_option("--invert", go.invert, "inversion centre x,y,z")->delimiter(',');
  s->add_flag("--refine", go.refine, "also run at twice the resolution");
  s->add_option("--export", go.export_stem, "write the sampled patch to <stem>.json/.csv");

  s = add("hessian-index", "Willmore Hessian spectrum, Moebius nullity and Sylvester counts",
          [&](const Common&) { return hessian_index(hs); });
  s->add_option("--surface", hs.surface);
  s->add_option("--res", hs.res);
  s->add_option("--k", hs.k);
  s->add_option("--beta", hs.beta);
  s->add_option("--weight-b", hs.weight_b);
  s->add_option("--weight-L", hs.weight_L);

  auto neck_opts = [&](CLI::App* a) {
    a->add_option("--family", nk.family);
    a->add_option("--t", nk.t)->delimiter(',');
    a->add_option("--a", nk.a);
    a->add_option("--b", nk.b);
  };
  s = add("neck-sweep", "dyadic energy profile, decay and positivity of a neck family",
          [&](const Common& c) { return neck_sweep(nk, c); });
  neck_opts(s);
  s->add_option("--rings", nk.rings);
  s->add_option("--res", nk.res);
  s->add_option("--beta", nk.beta);
  s->add_option("--beta1", nk.beta1);
  s->add_option("--beta2", nk.beta2);
  s = add("quantization", "residues, L(2,1) norms and the quantization criterion",
          [&](const Common& c) { return quantization(nk, c); });
  neck_opts(s);
  s->add_option("--l", nk.l)->delimiter(',');
  CLI::Option* inj = s->add_option("--inject-gamma", inject, "replace |gamma_1| by a constant");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kPass : kUsage;
  }

  auto logger = spdlog::get("wspectra");
  if (!logger) logger = spdlog::stderr_color_mt("wspectra");
  logger->set_pattern("[%l] %v");

  for (auto& [name, sub] : subs) {
    if (!sub.app->parsed()) continue;
    logger->set_level(common.quiet ? spdlog::level::warn : spdlog::level::info);
    try {
      if (!common.config.empty()) apply_config(sub.app, common.config);
      if (inj->count() > 0) nk.inject_gamma = inject;
      report::parse_format(common.format);
      logger->info("{}: running ({} workers)", name, worker_count());
      const Outcome o = sub.handler(common);
      write_outputs(name, o, common);
      logger->info("{}: {} -> {}", name, o.pass ? "all checks passed" : "CHECK FAILED", common.out);
      return o.pass ? kPass : kCheckFailed;
    } catch (const Error& e) {
      const bool numerical = e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::NotPositiveDefinite;
      logger->error("{}: {}", name, e.what());
      if (!numerical) std::fputs(sub.app->help().c_str(), stderr);
      return numerical ? kCheckFailed : kUsage;
    }
  }
  return kUsage;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace wspectra::cli
