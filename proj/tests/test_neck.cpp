#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wspectra/errors.hpp"
#include "wspectra/neck_lab.hpp"

using namespace wspectra;
using namespace wspectra::neck;
constexpr double pi = std::numbers::pi;

namespace {
NeckFamily catenoids() {
  NeckFamily f;
  f.kind = FamilyKind::scaled_catenoid;
  f.t_list = {1e-2, 1e-3};
  return f;
}
}  // namespace

TEST_CASE("catenoid ring energies equal 4 pi times the tanh increment") {
  const double t = 1e-2;
  const auto prof = neck_energy_profile(catenoids(), t, 10);
  REQUIRE(prof.rings.size() == 10);
  for (const auto& r : prof.rings) {
    const double exact = 4.0 * pi * (std::tanh(std::log(r.r_hi / t)) - std::tanh(std::log(r.r_lo / t)));
    CHECK(r.energy == doctest::Approx(exact).epsilon(1e-3).scale(1e-3));
  }
}

TEST_CASE("shrinking the neck by 4 moves the profile two rings inward") {
  const auto p1 = neck_energy_profile(catenoids(), 1e-2, 12);
  const auto p2 = neck_energy_profile(catenoids(), 1e-2 / 4.0, 12);
  for (int k = 0; k + 2 < 12; ++k) CHECK(p2.rings[k + 2].energy == doctest::Approx(p1.rings[k].energy).epsilon(1e-3));
}

TEST_CASE("the flat plane carries no Gauss-map energy") {
  NeckFamily flat;
  flat.kind = FamilyKind::flat_plane;
  flat.t_list = {1e-2};
  const auto prof = neck_energy_profile(flat, 1e-2, 8);
  for (const auto& r : prof.rings) CHECK(std::abs(r.energy) < 1e-12);
}

TEST_CASE("decay ratio is scale invariant along the catenoid family") {
  const auto fam = catenoids();
  const auto pa = fam.patch(1e-2, 512, 32), pb = fam.patch(1e-3, 512, 32);
  const auto fa = geometry::derive_geometry(pa), fb = geometry::derive_geometry(pb);
  const auto da = pointwise_decay_diagnostic(pa, fa, 0.6), db = pointwise_decay_diagnostic(pb, fb, 0.6);
  CHECK(da.C_emp == doctest::Approx(db.C_emp).epsilon(1e-2));
  CHECK(da.C_emp > 0.0);
  CHECK(decay_weight_ratio(pa, 0.6, 0.9) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(pointwise_decay_diagnostic(pa, fa, 1.2), Error);
}

TEST_CASE("small catenoid neck: every suite field has positive Hessian") {
  const auto p = catenoids().patch(1e-3, 128, 32);
  const auto f = geometry::derive_geometry(p);
  const auto r = neck_positivity_test(p, f, 0.75, 0.6);
  CHECK(r.labels.size() == 32);
  CHECK(r.all_positive);
  CHECK(r.asserted);
  CHECK(r.gauss_energy <= kEpsReport);
  CHECK(r.lambda1 > 0.0);
  CHECK_THROWS_AS(neck_positivity_test(p, f, 0.4, 0.6), Error);
  CHECK_THROWS_AS(neck_positivity_test(p, f, 0.75, 0.3), Error);
}

TEST_CASE("log-gradient Lorentz norm matches its closed form") {
  for (double l : {2.0, 4.0}) CHECK(log_gradient_l21(l) == doctest::Approx(log_gradient_l21_exact(l)).epsilon(1e-2));
}

TEST_CASE("quantization criterion") {
  const auto q = quantization_sweep(catenoids());
  CHECK(q.criterion_holds);
  for (const auto& r : q.rows) CHECK(std::abs(r.gamma1) < kResidueZero);

  const std::vector<double> ts{1e-1, 1e-2, 1e-3}, ls{2.0, 4.0, 6.0};
  CHECK_FALSE(quantization_criterion(ts, {0.3, 0.3, 0.3}, ls).criterion_holds);
  CHECK(quantization_criterion(ts, {0.3, 0.1, 0.01}, ls).criterion_holds);
}

TEST_CASE("rings must fit inside the chart") {
  NeckFamily f = catenoids();
  f.a = 0.1;
  try {
    neck_energy_profile(f, 1.0, 8);
    FAIL("rings below the chart must throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RingOutOfChart);
  }
  CHECK_THROWS_AS(neck_energy_profile(catenoids(), 1e-2, 2), Error);
  CHECK_THROWS_AS(NeckFamily::parse_kind("trinoid"), Error);
}
