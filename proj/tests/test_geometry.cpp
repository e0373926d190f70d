#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "wspectra/errors.hpp"
#include "wspectra/immersion_geometry.hpp"

using namespace wspectra;
using namespace wspectra::geometry;
constexpr double pi = std::numbers::pi;

namespace {
struct Measured {
  ConformalPatch patch;
  GeometryFields f;
};
Measured measure(const SurfaceId& id, int n0, int n1) {
  Measured m{build_surface(id, n0, n1), {}};
  m.f = derive_geometry(m.patch);
  return m;
}
SurfaceId sid(SurfaceKind k) {
  SurfaceId id;
  id.kind = k;
  return id;
}
}  // namespace

TEST_CASE("unit sphere: area, Willmore energy, Gauss-Bonnet") {
  const auto m = measure(sid(SurfaceKind::round_sphere), 64, 64);
  CHECK(area(m.patch, m.f) == doctest::Approx(4.0 * pi).epsilon(2e-3));
  CHECK(willmore_energy(m.patch, m.f) == doctest::Approx(4.0 * pi).epsilon(1e-3));
  CHECK(gauss_bonnet(m.patch, m.f) == doctest::Approx(4.0 * pi).epsilon(2e-3));
  CHECK(normal_energy(m.patch, m.f) == doctest::Approx(8.0 * pi).epsilon(2e-3));
  CHECK(willmore_residual(m.patch, m.f).rms < 1e-2);
  CHECK(conformality_residual(m.patch) < 1e-12);
}

TEST_CASE("tori: Clifford attains 2 pi^2, revolution tori follow the closed form") {
  const auto c = measure(sid(SurfaceKind::clifford_torus), 64, 64);
  CHECK(willmore_energy(c.patch, c.f) == doctest::Approx(2.0 * pi * pi).epsilon(1e-3));
  CHECK(std::abs(gauss_bonnet(c.patch, c.f)) < 1e-6);

  // W = pi^2 a^2 / sqrt(a^2 - 1) with a = R / r (2 pi^2 at a = sqrt 2).
  SurfaceId t = sid(SurfaceKind::torus_of_revolution);
  t.R = 3.0;
  t.r = 1.0;
  const auto m = measure(t, 64, 64);
  CHECK(willmore_energy(m.patch, m.f) == doctest::Approx(pi * pi * 9.0 / std::sqrt(8.0)).epsilon(1e-3));
  CHECK(area(m.patch, m.f) == doctest::Approx(4.0 * pi * pi * 3.0).epsilon(1e-3));
}

TEST_CASE("inversion preserves the Willmore energy of closed surfaces") {
  const auto c = measure(sid(SurfaceKind::clifford_torus), 64, 64);
  Mobius inv;
  inv.kind = Mobius::inversion;
  inv.v = Vec3(0.3, -0.2, 2.5);
  const auto p = apply_mobius(c.patch, inv);
  const auto f = derive_geometry(p);
  CHECK(willmore_energy(p, f) == doctest::Approx(willmore_energy(c.patch, c.f)).epsilon(2e-3));

  Mobius dil;
  dil.kind = Mobius::dilation;
  dil.c = 2.5;
  const auto q = apply_mobius(c.patch, dil);
  const auto g = derive_geometry(q);
  CHECK(willmore_energy(q, g) == doctest::Approx(willmore_energy(c.patch, c.f)).epsilon(1e-10));
  CHECK(area(q, g) == doctest::Approx(6.25 * area(c.patch, c.f)).epsilon(1e-10));
}

TEST_CASE("catenoid is minimal with total curvature 8 pi tanh 2 on |s| < 2") {
  const auto m = measure(sid(SurfaceKind::catenoid), 256, 64);
  CHECK(willmore_energy(m.patch, m.f) < 1e-8);
  CHECK(normal_energy(m.patch, m.f) == doctest::Approx(8.0 * pi * std::tanh(2.0)).epsilon(2e-3));
  CHECK(normal_energy_direct(m.patch, m.f) == doctest::Approx(8.0 * pi * std::tanh(2.0)).epsilon(1e-2));
}

TEST_CASE("residues: the contractible sphere row has none") {
  const auto m = measure(sid(SurfaceKind::round_sphere), 64, 64);
  const auto r = second_residue(m.patch, m.f, Contour{12});
  CHECK(r.gamma1.norm() < 1e-6);
  CHECK(r.gamma2 == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("errors: grids, parameters, inversion centres, contours") {
  CHECK_THROWS_AS(build_surface(sid(SurfaceKind::round_sphere), 16), Error);
  SurfaceId bad = sid(SurfaceKind::torus_of_revolution);
  bad.R = 1.0;
  bad.r = 2.0;
  CHECK_THROWS_AS(build_surface(bad, 32), Error);
  CHECK_THROWS_AS(SurfaceId::parse("klein_bottle"), Error);

  const auto s = build_surface(sid(SurfaceKind::round_sphere), 32);
  Mobius inv;
  inv.kind = Mobius::inversion;
  inv.v = s.jet[s.idx(5, 7)].p;
  try {
    apply_mobius(s, inv);
    FAIL("inversion about a surface point must throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CenterOnSurface);
  }
  try {
    contour_at_radius(build_surface(sid(SurfaceKind::catenoid), 64), 100.0);
    FAIL("contour outside the chart must throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ContourOutOfChart);
  }
}

TEST_CASE("export and import round trip the sampled positions") {
  const auto dir = std::filesystem::temp_directory_path() / "wspectra_geom_test";
  std::filesystem::create_directories(dir);
  const std::string stem = (dir / "torus").string();
  const auto p = build_surface(sid(SurfaceKind::clifford_torus), 32);
  export_patch(p, stem);
  const auto q = import_patch(stem);
  REQUIRE(q.nodes() == p.nodes());
  CHECK_FALSE(q.has_jet);
  double err = 0.0;
  for (int k = 0; k < p.nodes(); ++k) err = std::max(err, (p.jet[k].p - q.jet[k].p).norm());
  CHECK(err < 1e-14);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(import_patch((dir / "missing").string()), Error);
}
