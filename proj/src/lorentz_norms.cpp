#include "wspectra/lorentz_norms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wspectra/errors.hpp"

namespace wspectra::lorentz {

void SampledField::validate() const {
  if (values.size() != measures.size()) throw Error(ErrorCode::MeasureMismatch, "values and measures differ in length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) throw Error(ErrorCode::BadParam, "values must be finite, >= 0");
    if (!(measures[i] > 0.0) || !std::isfinite(measures[i])) throw Error(ErrorCode::BadParam, "measures must be > 0");
  }
}

namespace {
// Indices sorted by decreasing value; ties broken by index so the result is
// deterministic (the norms do not depend on the tie order).
std::vector<std::size_t> decreasing_order(const SampledField& f) {
  std::vector<std::size_t> idx(f.values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f.values[a] > f.values[b]; });
  return idx;
}
}  // namespace

double norm_l2(const SampledField& f) {
  f.validate();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * f.values[i] * f.measures[i];
  return std::sqrt(acc);
}

double norm_l2_weak(const SampledField& f) {
  f.validate();
  // On each step of f^* the quotient is quasi-convex in s, so the supremum
  // sits at a breakpoint.
  double mass = 0.0, integral = 0.0, best = 0.0;
  for (std::size_t i : decreasing_order(f)) {
    mass += f.measures[i];
    integral += f.values[i] * f.measures[i];
    best = std::max(best, integral / std::sqrt(mass));
  }
  return best;
}

double norm_l21(const SampledField& f) {
  f.validate();
  const auto idx = decreasing_order(f);
  // lambda(t) = M_k for v_(k+1) <= t < v_(k), with M_k the mass of the top k cells.
  double mass = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    mass += f.measures[idx[k]];
    const double next = k + 1 < idx.size() ? f.values[idx[k + 1]] : 0.0;
    acc += (f.values[idx[k]] - next) * std::sqrt(mass);
  }
  return 4.0 * acc;
}

DualityReport duality_pairing_check(const SampledField& f, const SampledField& g) {
  f.validate();
  g.validate();
  if (f.measures != g.measures) throw Error(ErrorCode::MeasureMismatch, "fields live on different cells");
  DualityReport rep;
  for (std::size_t i = 0; i < f.values.size(); ++i) rep.lhs += f.values[i] * g.values[i] * f.measures[i];
  rep.rhs = 0.5 * norm_l21(f) * norm_l2_weak(g);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.pass = rep.lhs <= rep.rhs + 1e-12;
  return rep;
}

SampledField inverse_radius_field(double a, double b, int radial, int angular) {
  if (!(a > 0.0 && b > a) || radial < 1 || angular < 1) throw Error(ErrorCode::BadParam, "bad annulus sampling");
  SampledField f;
  const double dth = 2.0 * std::numbers::pi / angular;
  for (int i = 0; i < radial; ++i) {
    const double ra = a * std::pow(b / a, double(i) / radial);
    const double rb = a * std::pow(b / a, double(i + 1) / radial);
    const double mu = 0.5 * (rb * rb - ra * ra) * dth;
    const double v = 1.0 / std::sqrt(ra * rb);  // sampled at the log-centre of the cell
    for (int j = 0; j < angular; ++j) {
      f.values.push_back(v);
      f.measures.push_back(mu);
    }
  }
  return f;
}

SampledField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  SampledField f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v, m;
    if (!(ss >> v >> m)) {
      if (f.values.empty()) continue;  // header row
      throw Error(ErrorCode::IoError, "malformed row: " + line);
    }
    f.values.push_back(std::abs(v));
    f.measures.push_back(m);
  }
  f.validate();
  return f;
}

}  // namespace wspectra::lorentz
