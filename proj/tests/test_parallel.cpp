#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "wspectra/parallel.hpp"

using namespace wspectra;

TEST_CASE("serial and parallel loops fill identical slots") {
  const std::size_t n = 257;
  std::vector<double> a(n), b(n);
  auto body = [](std::vector<double>& out) {
    return [&out](std::size_t i) {
      double s = 0.0;
      for (std::size_t k = 1; k <= 200 + i; ++k) s += std::sin(double(k * i)) / k;
      out[i] = s;
    };
  };
  for_each_index(n, Exec::serial, body(a));
  for_each_index(n, Exec::parallel, body(b));
  CHECK(a == b);
  CHECK(worker_count() >= 1);
}

TEST_CASE("the lowest failing index is rethrown") {
  auto body = [](std::size_t i) {
    if (i == 17 || i == 90) throw std::runtime_error("index " + std::to_string(i));
  };
  for (Exec e : {Exec::serial, Exec::parallel}) {
    try {
      for_each_index(128, e, body);
      FAIL("expected a throw");
    } catch (const std::runtime_error& err) {
      CHECK(std::string(err.what()) == "index 17");
    }
  }
}

TEST_CASE("an empty range runs nothing") {
  int calls = 0;
  for_each_index(0, Exec::parallel, [&](std::size_t) { ++calls; });
  CHECK(calls == 0);
}
