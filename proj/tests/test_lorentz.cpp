#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "wspectra/errors.hpp"
#include "wspectra/lorentz_norms.hpp"

using namespace wspectra;
using namespace wspectra::lorentz;
constexpr double pi = std::numbers::pi;

TEST_CASE("two-level step function against its hand-computed norms") {
  // f = 3 on measure 2, 1 on measure 5
  const SampledField f{{1.0, 3.0}, {5.0, 2.0}};
  CHECK(norm_l2(f) == doctest::Approx(std::sqrt(9.0 * 2.0 + 1.0 * 5.0)));
  // lambda(t) = 7 for t < 1, 2 for 1 <= t < 3
  CHECK(norm_l21(f) == doctest::Approx(4.0 * (1.0 * std::sqrt(7.0) + 2.0 * std::sqrt(2.0))));
  const double weak = std::max(3.0 * std::sqrt(2.0), (6.0 + 5.0) / std::sqrt(7.0));
  CHECK(norm_l2_weak(f) == doctest::Approx(weak));
}

TEST_CASE("norms are rearrangement invariant and homogeneous") {
  const SampledField f{{0.5, 2.0, 1.0, 4.0}, {1.0, 0.25, 3.0, 0.5}};
  const SampledField g{{4.0, 1.0, 0.5, 2.0}, {0.5, 3.0, 1.0, 0.25}};
  CHECK(norm_l21(f) == doctest::Approx(norm_l21(g)));
  CHECK(norm_l2_weak(f) == doctest::Approx(norm_l2_weak(g)));
  SampledField h = f;
  for (double& v : h.values) v *= 3.0;
  CHECK(norm_l21(h) == doctest::Approx(3.0 * norm_l21(f)));
}

TEST_CASE("1/|x| on annuli reproduces the closed forms") {
  const auto f = inverse_radius_field(0.1, 1.0, 1024, 512);
  CHECK(norm_l2(f) == doctest::Approx(std::sqrt(2.0 * pi * std::log(10.0))).epsilon(0.002));
  CHECK(norm_l21(f) ==
        doctest::Approx(4.0 * std::sqrt(pi) * (std::log(10.0) + std::log(1.0 + std::sqrt(0.99)))).epsilon(0.005));
  CHECK(norm_l2_weak(inverse_radius_field(0.001, 1.0, 1024, 512)) == doctest::Approx(2.0 * std::sqrt(pi)).epsilon(0.005));
}

TEST_CASE("duality pairing is bounded by half of L21 times weak L2") {
  const auto f = inverse_radius_field(0.05, 1.0, 64, 32);
  auto g = f;
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = 1.0 + 0.5 * std::sin(0.37 * i);
  const auto r = duality_pairing_check(f, g);
  CHECK(r.pass);
  CHECK(r.ratio <= 1.0);
  SampledField h{{1.0}, {2.0}};
  CHECK_THROWS_AS(duality_pairing_check(f, h), Error);
}

TEST_CASE("csv input and validation") {
  const auto path = (std::filesystem::temp_directory_path() / "wspectra_lorentz_test.csv").string();
  {
    std::ofstream out(path);
    out << "value,measure\n3,2\n-1,5\n";
  }
  const auto f = read_csv(path);
  CHECK(norm_l2(f) == doctest::Approx(std::sqrt(23.0)));
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), Error);
  CHECK_THROWS_AS(norm_l2(SampledField{{1.0}, {0.0}}), Error);
}
