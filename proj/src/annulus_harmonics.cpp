#include "wspectra/annulus_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "wspectra/errors.hpp"
#include "wspectra/lorentz_norms.hpp"

namespace wspectra::harmonics {

namespace {
constexpr double pi = std::numbers::pi;

bool has_negative_modes(const LaurentHarmonic& h) {
  for (const auto& [k, c] : h.coeffs)
    if (k < 0 && c != cplx{}) return true;
  return false;
}

// Energy of the sub-annulus r0 < |z| < r1 (r0 may be 0).
double energy_between(const LaurentHarmonic& h, double r0, double r1) {
  double e = 0.0;
  for (const auto& [k, c] : h.coeffs) {
    if (k == 0) continue;
    const double p0 = r0 > 0.0 ? std::pow(r0, 2.0 * k) : 0.0;
    e += pi * std::abs(k) * std::norm(c) * std::abs(std::pow(r1, 2.0 * k) - p0);
  }
  if (h.d != 0.0) e += 2.0 * pi * h.d * h.d * std::log(r1 / r0);
  return e;
}

void require_zero_flux(const LaurentHarmonic& h) {
  if (h.d != 0.0) throw Error(ErrorCode::FluxNotZero, "log coefficient must vanish");
}
}  // namespace

int LaurentHarmonic::K() const {
  int k = 0;
  for (const auto& [j, c] : coeffs) k = std::max(k, std::abs(j));
  return k;
}

void LaurentHarmonic::validate() const {
  if (!std::isfinite(d)) throw Error(ErrorCode::BadParam, "non-finite log coefficient");
  for (const auto& [k, c] : coeffs) {
    if (std::abs(k) > 64) throw Error(ErrorCode::BadParam, "mode beyond K = 64");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw Error(ErrorCode::BadParam, "non-finite coefficient");
  }
}

double LaurentHarmonic::value(cplx z) const {
  double u = d != 0.0 ? d * std::log(std::abs(z)) : 0.0;
  for (const auto& [k, c] : coeffs) u += (c * std::pow(z, k)).real();
  return u;
}

void AnnulusSpec::validate() const {
  if (!(a >= 0.0 && b > a && std::isfinite(b))) throw Error(ErrorCode::BadParam, "need 0 <= a < b < inf");
}

double dirichlet_energy(const LaurentHarmonic& h, const AnnulusSpec& ann) {
  h.validate();
  ann.validate();
  if (ann.a == 0.0 && (has_negative_modes(h) || h.d != 0.0))
    throw Error(ErrorCode::SingularAtOrigin, "negative modes or log term on a full disk");
  return energy_between(h, ann.a, ann.b);
}

cplx gradient_at(const LaurentHarmonic& h, cplx z) {
  if (z == cplx{} && (h.d != 0.0 || has_negative_modes(h)))
    throw Error(ErrorCode::SingularPoint, "gradient undefined at the origin");
  cplx g = h.d != 0.0 ? h.d / z : cplx{};
  for (const auto& [k, c] : h.coeffs)
    if (k != 0) g += double(k) * c * std::pow(z, k - 1);
  return g;
}

CheckReport check_pointwise_bound(const LaurentHarmonic& h, const AnnulusSpec& ann, int circles, int angles) {
  require_zero_flux(h);
  const double E = std::sqrt(dirichlet_energy(h, ann));
  const double C = 2.0 / std::sqrt(3.0 * pi);
  const double r_lo = ann.a > 0.0 ? ann.a : 1e-4 * ann.b;
  CheckReport rep;
  for (int i = 0; i < circles; ++i) {
    // cell-centred in log r, so samples stay strictly inside (a, b)
    const double r = r_lo * std::pow(ann.b / r_lo, (i + 0.5) / circles);
    const double w = ann.b / (ann.b * ann.b - r * r) + (ann.a > 0.0 ? ann.a / (r * r - ann.a * ann.a) : 0.0);
    const double rhs = C * w * E;
    for (int j = 0; j < angles; ++j) {
      const double th = 2.0 * pi * j / angles;
      const double g = std::abs(gradient_at(h, std::polar(r, th)));
      rep.max_ratio = std::max(rep.max_ratio, rhs > 0.0 ? g / rhs : (g > 0.0 ? INFINITY : 0.0));
    }
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-9;
  return rep;
}

CheckReport check_average_bound(const LaurentHarmonic& h, const AnnulusSpec& ann, int radii) {
  require_zero_flux(h);
  ann.validate();
  const double lo = 4.0 * ann.a, hi = ann.b / 4.0;
  if (lo > hi) throw Error(ErrorCode::EmptyRange, "need 16 a <= b");
  const double E = std::sqrt(dirichlet_energy(h, ann));
  const double C = 8.0 / 3.0 * std::sqrt(2.5);
  const double start = lo > 0.0 ? lo : 1e-4 * hi;
  CheckReport rep;
  for (int i = 0; i < radii; ++i) {
    const double rho = radii == 1 ? hi : start * std::pow(hi / start, double(i) / (radii - 1));
    const double lhs = std::sqrt(energy_between(h, rho / 2.0, 2.0 * rho));
    const double rhs = C * (rho / ann.b + ann.a / rho) * E;
    rep.max_ratio = std::max(rep.max_ratio, rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0));
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-12;
  return rep;
}

CheckReport monotonicity_report(const LaurentHarmonic& h, const AnnulusSpec& ann, double t) {
  require_zero_flux(h);
  ann.validate();
  if (!(t > std::sqrt(ann.a / ann.b) && t <= 1.0)) throw Error(ErrorCode::BadT, "need sqrt(a/b) < t <= 1");
  const double lhs = std::sqrt(energy_between(h, ann.a / t, t * ann.b));
  const double rhs = t * std::sqrt(dirichlet_energy(h, ann));
  CheckReport rep;
  rep.max_ratio = rhs > 0.0 ? lhs / rhs : 0.0;
  rep.pass = lhs <= rhs + 1e-12;
  return rep;
}

bool check_monotonicity(const LaurentHarmonic& h, const AnnulusSpec& ann, double t) {
  return monotonicity_report(h, ann, t).pass;
}

CheckReport ball_decay_report(const LaurentHarmonic& h) {
  require_zero_flux(h);
  if (has_negative_modes(h)) throw Error(ErrorCode::NegativeModes, "disk harmonic expected");
  const double lhs = energy_between(h, 0.25, 0.5);
  const double rhs = energy_between(h, 0.5, 1.0);
  CheckReport rep;
  rep.max_ratio = rhs > 0.0 ? lhs / rhs : 0.0;
  rep.pass = lhs <= 0.25 * rhs * (1.0 + 1e-12);
  return rep;
}

bool check_ball_decay(const LaurentHarmonic& h) { return ball_decay_report(h).pass; }

SequenceReport check_sequence_lemma(const std::vector<double>& a, const std::vector<double>& b, double s, double t,
                                    double Gamma, int N1, int N2) {
  if (!(0.0 < s && s < t && t < 1.0)) throw Error(ErrorCode::BadParam, "need 0 < s < t < 1");
  if (N1 < 0 || N2 < N1) throw Error(ErrorCode::BadParam, "need 0 <= N1 <= N2");
  const int len = static_cast<int>(std::max({a.size(), b.size(), std::size_t(N2 + 1)}));
  auto at = [](const std::vector<double>& v, int i) { return i < static_cast<int>(v.size()) ? v[i] : 0.0; };
  auto wsum = [&](const std::vector<double>& v, double q, int k, int lo, int hi) {
    double acc = 0.0;
    for (int l = lo; l <= hi; ++l) acc += std::pow(q, std::abs(l - k + 1)) * at(v, l) * at(v, l);
    return acc;
  };
  SequenceReport rep;
  rep.constant = 2.0 * Gamma * (1.0 / (1.0 - s * t) + 1.0 / (1.0 - s / t));
  rep.hypothesis_holds = true;
  for (int k = N1; k <= N2; ++k) {
    const double bound = at(b, k) + Gamma * std::sqrt(wsum(a, s, k, 0, len - 1));
    if (at(a, k) > bound * (1.0 + 1e-14) + 1e-300) {
      rep.hypothesis_holds = false;
      rep.first_bad_k = k;
      return rep;
    }
  }
  rep.conclusion_holds = true;
  for (int k = N1; k <= N2; ++k) {
    const double lhs = std::sqrt(wsum(a, t, k, N1, N2));
    const double rhs = std::sqrt(wsum(b, t, k, N1, N2)) + rep.constant * std::sqrt(wsum(a, t, k, 0, len - 1));
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (lhs > rhs * (1.0 + 1e-12)) {
      rep.conclusion_holds = false;
      if (rep.first_bad_k < 0) rep.first_bad_k = k;
    }
  }
  return rep;
}

CheckReport check_improved_regularity(const LaurentHarmonic& h, const AnnulusSpec& ann, double t, int radial,
                                      int angular) {
  require_zero_flux(h);
  ann.validate();
  if (!(t > std::sqrt(ann.a / ann.b) && t < 1.0)) throw Error(ErrorCode::BadT, "need sqrt(a/b) < t < 1");
  const double r0 = ann.a > 0.0 ? ann.a / t : 1e-6 * t * ann.b, r1 = t * ann.b;
  lorentz::SampledField f;
  f.values.reserve(static_cast<std::size_t>(radial) * angular);
  const double dth = 2.0 * pi / angular;
  for (int i = 0; i < radial; ++i) {
    const double ra = r0 * std::pow(r1 / r0, double(i) / radial);
    const double rb = r0 * std::pow(r1 / r0, double(i + 1) / radial);
    const double rc = std::sqrt(ra * rb);
    const double mu = 0.5 * (rb * rb - ra * ra) * dth;
    for (int j = 0; j < angular; ++j) {
      f.values.push_back(std::abs(gradient_at(h, std::polar(rc, (j + 0.5) * dth))));
      f.measures.push_back(mu);
    }
  }
  const double lhs = lorentz::norm_l21(f);
  const double rhs = 64.0 * std::sqrt(pi / 15.0) * t / (1.0 - t) * std::sqrt(dirichlet_energy(h, ann));
  CheckReport rep;
  rep.max_ratio = rhs > 0.0 ? lhs / rhs : 0.0;
  rep.pass = lhs <= rhs;
  return rep;
}

LaurentHarmonic random_harmonic(std::mt19937_64& rng, int K, CorpusKind kind) {
  if (K < 1 || K > 64) throw Error(ErrorCode::BadParam, "K must lie in [1, 64]");
  std::normal_distribution<double> g(0.0, 1.0);
  LaurentHarmonic h;
  for (int k = (kind == CorpusKind::zero_flux ? -K : 1); k <= K; ++k) {
    if (k == 0) continue;
    const double sd = 1.0 / std::abs(k);
    const double re = g(rng), im = g(rng);
    h.coeffs[k] = sd * cplx(re, im) / std::sqrt(2.0);
  }
  return h;
}

SequenceInstance random_sequence_instance(std::mt19937_64& rng, int length) {
  if (length < 8) throw Error(ErrorCode::BadParam, "sequence length must be at least 8");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SequenceInstance in;
  in.s = 0.05 + 0.55 * u(rng);
  in.t = in.s + (0.95 - in.s) * (0.1 + 0.9 * u(rng));
  in.Gamma = 0.05 + 1.95 * u(rng);
  in.N1 = static_cast<int>(u(rng) * 4);
  in.N2 = std::min(length - 1, in.N1 + 4 + static_cast<int>(u(rng) * (length - in.N1 - 4)));
  const double decay = 0.5 + 0.5 * u(rng);
  in.a.resize(length);
  for (int k = 0; k < length; ++k) in.a[k] = std::pow(decay, k) * (0.2 + u(rng));
  in.b.resize(length);
  for (int k = 0; k < length; ++k) {
    double tail = 0.0;
    for (int n = 0; n < length; ++n) tail += std::pow(in.s, std::abs(n - k + 1)) * in.a[n] * in.a[n];
    in.b[k] = std::max(0.0, in.a[k] - in.Gamma * std::sqrt(tail)) + 0.1 * u(rng) * in.a[k];
  }
  return in;
}

bool SuiteReport::pass() const {
  return pointwise_fail + average_fail + mono_fail + ball_fail + sequence_fail == 0 &&
         (count == 0 || equality_ratio == 0.0 || std::abs(equality_ratio - 1.0) <= 1e-9);
}

SuiteReport verify_harmonic_suite(std::uint64_t seed, int count, const AnnulusSpec& ann, int K) {
  ann.validate();
  std::mt19937_64 rng(seed);
  SuiteReport rep;
  rep.count = count;
  const double t_lo = std::sqrt(ann.a / ann.b);
  const double ts[] = {t_lo + 0.1 * (1.0 - t_lo), t_lo + 0.4 * (1.0 - t_lo), t_lo + 0.7 * (1.0 - t_lo), 1.0};
  for (int i = 0; i < count; ++i) {
    const auto h = random_harmonic(rng, K, CorpusKind::zero_flux);
    const auto pw = check_pointwise_bound(h, ann);
    rep.pointwise_max = std::max(rep.pointwise_max, pw.max_ratio);
    rep.pointwise_fail += !pw.pass;
    const auto av = check_average_bound(h, ann);
    rep.average_max = std::max(rep.average_max, av.max_ratio);
    rep.average_fail += !av.pass;
    for (double t : ts) {
      const auto mo = monotonicity_report(h, ann, t);
      rep.mono_max = std::max(rep.mono_max, mo.max_ratio);
      rep.mono_fail += !mo.pass;
    }
    const auto disk = random_harmonic(rng, K, CorpusKind::positive_modes);
    const auto bd = ball_decay_report(disk);
    rep.ball_max = std::max(rep.ball_max, bd.max_ratio);
    rep.ball_fail += !bd.pass;
  }
  LaurentHarmonic z;
  z.coeffs[1] = 1.0;
  rep.equality_ratio = monotonicity_report(z, AnnulusSpec{0.0, 1.0}, 0.5).max_ratio;
  return rep;
}

SuiteReport verify_sequence_suite(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  SuiteReport rep;
  rep.count = count;
  for (int i = 0; i < count; ++i) {
    const auto in = random_sequence_instance(rng);
    const auto r = check_sequence_lemma(in.a, in.b, in.s, in.t, in.Gamma, in.N1, in.N2);
    rep.sequence_max = std::max(rep.sequence_max, r.max_ratio);
    rep.sequence_fail += !(r.hypothesis_holds && r.conclusion_holds);
  }
  return rep;
}

std::string to_json(const LaurentHarmonic& h) {
  const int K = h.K();
  nlohmann::json j;
  j["d"] = h.d;
  j["K"] = K;
  std::vector<double> re(2 * K + 1, 0.0), im(2 * K + 1, 0.0);
  for (const auto& [k, c] : h.coeffs) {
    re[k + K] = c.real();
    im[k + K] = c.imag();
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump(2);
}

LaurentHarmonic from_json(const std::string& text) {
  LaurentHarmonic h;
  try {
    const auto j = nlohmann::json::parse(text);
    h.d = j.at("d").get<double>();
    const int K = j.at("K").get<int>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (static_cast<int>(re.size()) != 2 * K + 1 || im.size() != re.size())
      throw Error(ErrorCode::BadParam, "coefficient arrays must have length 2K+1");
    for (int k = -K; k <= K; ++k)
      if (re[k + K] != 0.0 || im[k + K] != 0.0) h.coeffs[k] = cplx(re[k + K], im[k + K]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadParam, std::string("corpus record: ") + e.what());
  }
  h.validate();
  return h;
}

}  // namespace wspectra::harmonics
