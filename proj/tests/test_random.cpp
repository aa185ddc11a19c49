#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsp/random.hpp"

using fsp::RandomStream;

TEST_CASE("same seed gives the same sequence") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("split does not advance the parent and children differ") {
  RandomStream root(3);
  RandomStream c1 = root.split("batch");
  RandomStream c2 = root.split("birth");
  CHECK(root.counter() == 0);
  CHECK(c1() != c2());
  RandomStream again = RandomStream(3).split("batch");
  RandomStream c1b = root.split("batch");
  CHECK(again() == c1b());
}

TEST_CASE("uniform lies in [0,1) with the right mean") {
  RandomStream rng(9);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("index stays in range and n = 1 always gives 0") {
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(rng.index(1) == 0);
  for (int i = 0; i < 10000; ++i) CHECK(rng.index(7) < 7);
}

TEST_CASE("normal draws have unit variance") {
  RandomStream rng(5);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}
