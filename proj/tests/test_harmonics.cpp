#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wspectra/annulus_harmonics.hpp"
#include "wspectra/errors.hpp"

using namespace wspectra;
using namespace wspectra::harmonics;
constexpr double pi = std::numbers::pi;

namespace {
// \int |grad u|^2 over a < |z| < b by polar quadrature of finite differences of u.
double energy_by_quadrature(const LaurentHarmonic& h, double a, double b) {
  const int nth = 128;
  auto ring = [&](double r) {
    double acc = 0.0;
    for (int j = 0; j < nth; ++j) {
      const double th = 2.0 * pi * j / nth;
      const double ur = oracle::d1([&](double s) { return h.value(std::polar(s, th)); }, r, 1e-5 * r);
      const double ut = oracle::d1([&](double t) { return h.value(std::polar(r, t)); }, th, 1e-5);
      acc += (ur * ur + ut * ut / (r * r)) * r;
    }
    return acc * 2.0 * pi / nth;
  };
  return oracle::simpson(ring, a, b, 400);
}
}  // namespace

TEST_CASE("Parseval energy agrees with brute-force quadrature") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 3; ++rep) {
    auto h = random_harmonic(rng, 4, CorpusKind::zero_flux);
    h.d = 0.3;
    const double e = dirichlet_energy(h, {0.3, 1.0});
    CHECK(e == doctest::Approx(energy_by_quadrature(h, 0.3, 1.0)).epsilon(1e-6));
  }
}

TEST_CASE("log|z| energy is 2 pi d^2 log(b/a)") {
  LaurentHarmonic h;
  h.d = 1.5;
  CHECK(dirichlet_energy(h, {0.1, 2.0}) == doctest::Approx(2.0 * pi * 2.25 * std::log(20.0)));
}

TEST_CASE("seeded suites pass, with the equality case exact") {
  const auto r = verify_harmonic_suite(1, 100, {0.01, 1.0});
  CHECK(r.pass());
  CHECK(r.equality_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.pointwise_max <= 1.0);
  const auto s = verify_sequence_suite(2, 1000);
  CHECK(s.sequence_fail == 0);
}

TEST_CASE("sequence lemma reports a violated hypothesis") {
  std::vector<double> a{5.0, 0.0, 0.0}, b{0.0, 0.0, 0.0};
  const auto r = check_sequence_lemma(a, b, 0.2, 0.5, 0.1, 0, 2);
  CHECK_FALSE(r.hypothesis_holds);
  CHECK(r.first_bad_k == 0);
  CHECK(r.constant == doctest::Approx(0.2 * (1.0 / 0.9 + 1.0 / 0.6)));
}

TEST_CASE("preconditions") {
  LaurentHarmonic h;
  h.coeffs[-1] = 1.0;
  CHECK_THROWS_AS(ball_decay_report(h), Error);
  CHECK_THROWS_AS(monotonicity_report(h, {0.25, 1.0}, 0.4), Error);  // t below sqrt(a/b)
  CHECK_THROWS_AS(check_average_bound(h, {0.1, 1.0}), Error);         // needs 16 a <= b
  LaurentHarmonic flux;
  flux.d = 1.0;
  CHECK_THROWS_AS(check_pointwise_bound(flux, {0.1, 1.0}), Error);
}

TEST_CASE("json round trip keeps every coefficient") {
  std::mt19937_64 rng(5);
  const auto h = random_harmonic(rng, 6, CorpusKind::zero_flux);
  const auto g = from_json(to_json(h));
  for (const auto& [k, c] : h.coeffs) CHECK(std::abs(g.coeffs.at(k) - c) == 0.0);
  CHECK_THROWS_AS(from_json("{not json"), Error);
}
