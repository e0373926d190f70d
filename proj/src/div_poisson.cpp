// Delta u = div C on the unit disk, u = 0 on the circle, one Fourier mode at
// a time on a cell-centred radial grid.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "wspectra/errors.hpp"
#include "wspectra/singular_spectra.hpp"

namespace wspectra::spectra {

namespace {
constexpr double pi = std::numbers::pi;

void require_regular(const PowerProfile& p) {
  for (const auto& [c, e] : p.terms)
    if (e < 0.0 && c != 0.0) throw Error(ErrorCode::SourceSingular, "profile unbounded at the origin");
}

// Source of the cos (sign = +1, P = Pc, Q = Qs) or sin (sign = -1, P = Ps,
// Q = Qc) component: (1/r)(rP)' + sign (n/r) Q.
double source(const PowerProfile& P, const PowerProfile& Q, int n, double sign, double r) {
  return P.value(r) / r + P.derivative(r) + sign * n * Q.value(r) / r;
}

// Conservative cell balance  [r U']_faces - n^2 U h / r_c = [r P]_faces + sign n Q(r_c) h.
std::vector<double> solve_component(const PowerProfile& P, const PowerProfile& Q, int n, double sign, int cells) {
  const double h = 1.0 / cells;
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd rhs(cells);
  for (int i = 0; i < cells; ++i) {
    const double rl = i * h, rr = (i + 1) * h, rc = (i + 0.5) * h;
    double diag = -double(n) * n * h / rc;
    if (i > 0) {
      t.emplace_back(i, i - 1, rl / h);
      diag -= rl / h;
    }
    if (i + 1 < cells) {
      t.emplace_back(i, i + 1, rr / h);
      diag -= rr / h;
    } else {
      diag -= rr / (0.5 * h);  // Dirichlet face at r = 1
    }
    t.emplace_back(i, i, diag);
    rhs(i) = rr * P.value(rr) - (i > 0 ? rl * P.value(rl) : 0.0) + sign * n * Q.value(rc) * h;
  }
  Eigen::SparseMatrix<double> A(cells, cells);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "radial solve");
  const Eigen::VectorXd u = lu.solve(rhs);
  return {u.data(), u.data() + cells};
}

// \int_0^1 r^{alpha+1} p(r)^2 dr, exact for power profiles.
double weighted_square(const PowerProfile& p, double alpha) {
  double acc = 0.0;
  for (const auto& [c1, e1] : p.terms)
    for (const auto& [c2, e2] : p.terms) acc += c1 * c2 / (alpha + 2.0 + e1 + e2);
  return acc;
}
}  // namespace

double PowerProfile::value(double r) const {
  double v = 0.0;
  for (const auto& [c, e] : terms) v += c * (e == 0.0 ? 1.0 : std::pow(r, e));
  return v;
}

double PowerProfile::derivative(double r) const {
  double v = 0.0;
  for (const auto& [c, e] : terms)
    if (e != 0.0) v += c * e * std::pow(r, e - 1.0);
  return v;
}

DivSolution solve_div_poisson_disk(const DivSource& C, int cells) {
  if (cells < 8) throw Error(ErrorCode::BadGrid, "need at least 8 radial cells");
  DivSolution sol;
  sol.cells = cells;
  for (const auto& md : C.modes) {
    if (md.n < 0) throw Error(ErrorCode::BadMode, "negative Fourier index");
    for (const PowerProfile* p : {&md.Pc, &md.Ps, &md.Qc, &md.Qs}) require_regular(*p);
    sol.n.push_back(md.n);
    sol.Uc.push_back(solve_component(md.Pc, md.Qs, md.n, +1.0, cells));
    if (md.n > 0)
      sol.Us.push_back(solve_component(md.Ps, md.Qc, md.n, -1.0, cells));
    else
      sol.Us.emplace_back(cells, 0.0);  // sin 0 = 0
  }
  return sol;
}

double div_residual(const DivSource& C, const DivSolution& u) {
  const int N = u.cells;
  const double h = 1.0 / N;
  double acc = 0.0;
  for (std::size_t k = 0; k < C.modes.size(); ++k) {
    const auto& md = C.modes[k];
    const int n = md.n;
    for (int comp = 0; comp < (n > 0 ? 2 : 1); ++comp) {
      const auto& U = comp == 0 ? u.Uc[k] : u.Us[k];
      const PowerProfile& P = comp == 0 ? md.Pc : md.Ps;
      const PowerProfile& Q = comp == 0 ? md.Qs : md.Qc;
      const double sign = comp == 0 ? 1.0 : -1.0;
      const double norm = n == 0 ? 2.0 * pi : pi;
      for (int i = 1; i + 1 < N; ++i) {
        const double r = u.radius(i);
        const double lap = (U[i + 1] - 2.0 * U[i] + U[i - 1]) / (h * h) + (U[i + 1] - U[i - 1]) / (2.0 * h * r) -
                           double(n) * n * U[i] / (r * r);
        const double res = lap - source(P, Q, n, sign, r);
        acc += norm * res * res * r * h;
      }
    }
  }
  return std::sqrt(acc);
}

double cz_constant(double alpha) {
  const double q = (alpha * alpha + 1.0) / (alpha * alpha - 8.0);
  return 25.0 * q * q;
}

DivBound div_weight_bound(const DivSource& C, double alpha, int cells, double slack) {
  if (!(alpha > 2.0 * std::sqrt(2.0))) throw Error(ErrorCode::BadAlpha, "need alpha > 2 sqrt 2");
  const DivSolution sol = solve_div_poisson_disk(C, cells);
  const double h = 1.0 / cells;
  DivBound out;
  out.constant = cz_constant(alpha);
  for (std::size_t k = 0; k < C.modes.size(); ++k) {
    const auto& md = C.modes[k];
    const int n = md.n;
    const double norm = n == 0 ? 2.0 * pi : pi;
    for (const auto* U : {&sol.Uc[k], &sol.Us[k]}) {
      // cell terms: r^alpha (u^2 / r^2 + n^2 u^2 / r^2) r dr
      for (int i = 0; i < cells; ++i) {
        const double r = sol.radius(i), v = (*U)[i];
        out.lhs += norm * std::pow(r, alpha - 1.0) * (1.0 + double(n) * n) * v * v * h;
      }
      // face terms: r^alpha (u_r)^2 r dr, with u = 0 imposed at r = 1
      for (int i = 0; i < cells; ++i) {
        const double rf = (i + 1) * h;
        const double du = i + 1 < cells ? ((*U)[i + 1] - (*U)[i]) / h : (0.0 - (*U)[i]) / (0.5 * h);
        const double len = i + 1 < cells ? h : 0.5 * h;
        out.lhs += norm * std::pow(rf, alpha + 1.0) * du * du * len;
      }
    }
    out.rhs += norm * (weighted_square(md.Pc, alpha) + weighted_square(md.Ps, alpha) +
                       weighted_square(md.Qc, alpha) + weighted_square(md.Qs, alpha));
    if (n == 0) out.rhs -= norm * (weighted_square(md.Ps, alpha) + weighted_square(md.Qs, alpha));
  }
  out.ratio = out.rhs > 0.0 ? out.lhs / (out.constant * out.rhs) : 0.0;
  out.pass = out.lhs <= out.constant * out.rhs * (1.0 + slack) + 1e-300;
  return out;
}

DivCorpusReport verify_div_weight_bound(double alpha, const std::vector<DivSource>& corpus, int cells, double slack,
                                        Exec exec) {
  if (!(alpha > 2.0 * std::sqrt(2.0))) throw Error(ErrorCode::BadAlpha, "need alpha > 2 sqrt 2");
  DivCorpusReport rep;
  rep.alpha = alpha;
  rep.ratios.assign(corpus.size(), 0.0);
  std::vector<char> ok(corpus.size(), 0);
  for_each_index(corpus.size(), exec, [&](std::size_t i) {
    const DivBound b = div_weight_bound(corpus[i], alpha, cells, slack);
    rep.ratios[i] = b.ratio;
    ok[i] = b.pass;
  });
  rep.max_ratio = rep.ratios.empty() ? 0.0 : *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.pass = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  return rep;
}

DivSource random_div_source(std::mt19937_64& rng, int modes) {
  std::uniform_int_distribution<int> pick_n(0, 5);
  std::uniform_real_distribution<double> expo(1.0, 4.0);
  std::normal_distribution<double> coef(0.0, 1.0);
  DivSource src;
  std::vector<int> used;
  while (static_cast<int>(src.modes.size()) < modes) {
    const int n = pick_n(rng);
    if (std::find(used.begin(), used.end(), n) != used.end()) continue;
    used.push_back(n);
    DivSourceMode md;
    md.n = n;
    for (PowerProfile* p : {&md.Pc, &md.Ps, &md.Qc, &md.Qs}) {
      if (n == 0 && (p == &md.Ps || p == &md.Qs)) continue;
      for (int j = 0; j < 2; ++j) p->terms.emplace_back(coef(rng), expo(rng));
    }
    src.modes.push_back(md);
  }
  return src;
}

}  // namespace wspectra::spectra
