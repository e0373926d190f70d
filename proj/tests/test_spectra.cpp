#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wspectra/errors.hpp"
#include "wspectra/singular_spectra.hpp"

using namespace wspectra;
using namespace wspectra::spectra;
constexpr double pi = std::numbers::pi;

namespace {
// U = (s - s0)^2 (s1 - s)^2 and its first two derivatives.
struct Bump {
  double s0, s1;
  double u(double s) const { return std::pow((s - s0) * (s1 - s), 2); }
  double du(double s) const { return 2.0 * (s - s0) * (s1 - s) * ((s1 - s) - (s - s0)); }
  double ddu(double s) const {
    const double p = (s - s0) * (s1 - s), dp = (s1 - s) - (s - s0);
    return 2.0 * dp * dp - 4.0 * p;
  }
};

std::vector<double> sample(const Bump& b, const RadialGrid& g) {
  std::vector<double> v(g.nodes());
  for (int j = 0; j < g.nodes(); ++j) v[j] = b.u(g.s(j));
  return v;
}
}  // namespace

TEST_CASE("quartic form of the radial bilaplacian matches direct quadrature") {
  const RadialGrid g{0.2, 1.5, 400};
  const Bump b{std::log(0.2), std::log(1.5)};
  const auto op = assemble_mode_operator_2d(1, 0, g);
  const double exact = 2.0 * pi * oracle::simpson([&](double s) { return std::exp(-2.0 * s) * std::pow(b.ddu(s), 2); },
                                                  b.s0, b.s1, 4000);
  CHECK(quartic_form(op, sample(b, g)) == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("m = 2, n = 1 has no zeroth-order term") {
  const RadialGrid g{0.3, 2.0, 400};
  const Bump b{std::log(0.3), std::log(2.0)};
  const auto op = assemble_mode_operator_2d(2, 1, g);
  const double exact = 2.0 * pi * oracle::simpson(
                                      [&](double s) { return std::exp(-2.0 * s) * std::pow(b.ddu(s) + 2.0 * b.du(s), 2); },
                                      b.s0, b.s1, 4000);
  CHECK(quartic_form(op, sample(b, g)) == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("d = 4 carries the uniform measure") {
  const RadialGrid g{0.5, 3.0, 300};
  const Bump b{std::log(0.5), std::log(3.0)};
  const auto op = assemble_mode_operator_dim(4, 0, g);
  const double exact =
      2.0 * pi * pi * oracle::simpson([&](double s) { return std::pow(b.ddu(s) + 2.0 * b.du(s), 2); }, b.s0, b.s1, 4000);
  CHECK(quartic_form(op, sample(b, g)) == doctest::Approx(exact).epsilon(2e-3));
  CHECK(surface_area_sphere(4) == doctest::Approx(2.0 * pi * pi));
  CHECK(surface_area_sphere(3) == doctest::Approx(4.0 * pi));
}

TEST_CASE("first eigenvalues converge under refinement and respect the bound") {
  const double L = 4.0;
  const auto l1 = first_eigenvalue(assemble_mode_operator_2d(1, 0, RadialGrid::centred(L, 100)), Denom::u4);
  const auto l2 = first_eigenvalue(assemble_mode_operator_2d(1, 0, RadialGrid::centred(L, 200)), Denom::u4);
  const auto l3 = first_eigenvalue(assemble_mode_operator_2d(1, 0, RadialGrid::centred(L, 400)), Denom::u4);
  CHECK(std::abs(l3 - l2) < std::abs(l2 - l1));
  CHECK(l3 >= singular2d_u4_bound(1, L) * (1.0 - kSlack));
}

TEST_CASE("closed-form bounds") {
  CHECK(singular2d_u4_bound(2, 2.0) == doctest::Approx(4.0 * pi * pi));
  const double q = pi * pi / 64.0;
  CHECK(singular2d_grad_bound(1, 8.0) == doctest::Approx((4.0 + q) * q / (8.0 + 2.0 * q)));
  CHECK(rellich_u4_bound(5, 16.0) == doctest::Approx((25.0 / 4 + pi * pi / 256) * (0.25 + pi * pi / 256)));
  CHECK(d4_upper_bound(2.0) == doctest::Approx((4.0 + pi * pi) * pi * pi));
}

TEST_CASE("serial and parallel sweeps give identical rows") {
  const auto a = verify_singular_2d(1, {2.0, 4.0}, 4, 64, Exec::serial);
  const auto b = verify_singular_2d(1, {2.0, 4.0}, 4, 64, Exec::parallel);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].lambda1 == b.rows[k].lambda1);
    CHECK(a.rows[k].mode == b.rows[k].mode);
  }
}

TEST_CASE("weights are continuous at the chart radii and validated") {
  WeightSpec w;
  w.kind = WeightKind::power_weight;
  w.a = 0.1;
  w.b = 1.0;
  CHECK(w.density(0.1 * (1 - 1e-12)) == doctest::Approx(w.density(0.1 * (1 + 1e-12))).epsilon(1e-9));
  CHECK(w.density(1.0 - 1e-12) == doctest::Approx(w.density(1.0 + 1e-12)).epsilon(1e-9));
  w.beta = 0.4;
  CHECK_THROWS_AS(w.validate(), Error);
  WeightSpec n2;
  n2.kind = WeightKind::neck_w2;
  n2.a = 0.1;
  n2.beta2 = 0.4;
  CHECK_THROWS_AS(n2.validate(), Error);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(assemble_mode_operator_2d(0, 0, RadialGrid{}), Error);
  CHECK_THROWS_AS(assemble_mode_operator_dim(2, 0, RadialGrid{}), Error);
  CHECK_THROWS_AS(assemble_mode_operator_2d(1, 0, RadialGrid{1.0, 2.0, 8}), Error);
  CHECK_THROWS_AS(interpolation_constant(0.75, 0.6, {1.0}, 2, 64), Error);
}

TEST_CASE("weighted divergence constant and solver consistency") {
  CHECK(cz_constant(3.0) == doctest::Approx(2500.0));
  std::mt19937_64 rng(3);
  const auto src = random_div_source(rng);
  const double r1 = div_residual(src, solve_div_poisson_disk(src, 100));
  const double r2 = div_residual(src, solve_div_poisson_disk(src, 200));
  CHECK(r2 < r1);
  const auto b = div_weight_bound(src, 4.0, 200);
  CHECK(b.pass);
}
