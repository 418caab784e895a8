#include <doctest.h>

#include <cmath>

#include "gen.hpp"

using namespace owlab;

TEST_CASE("cube geometry") {
  const DyadicCube q(2, {1, -3});
  CHECK(q.side() == 0.25);
  CHECK(q.volume() == 0.0625);
  CHECK(q.anchor() == std::vector<double>{0.25, -0.75});
  CHECK(q.parent() == DyadicCube(1, {0, -2}));
  CHECK(q.parent().contains(q));
  CHECK(q.children().size() == 4);
  for (const auto& c : q.children()) CHECK(q.contains(c));
  CHECK(q.to_string() == "(2,1,-3)");
  CHECK(DyadicCube(-1, {0}).side() == 2.0);
}

TEST_CASE("floor_shift rounds toward minus infinity") {
  CHECK(floor_shift(-1, 1) == -1);
  CHECK(floor_shift(-4, 2) == -1);
  CHECK(floor_shift(-5, 2) == -2);
  CHECK(floor_shift(7, 1) == 3);
}

TEST_CASE("babc kernel examples") {
  const DyadicCube q(0, {0});
  CHECK(babc_kernel(1, 1, 1, q, q) == doctest::Approx(4.0));
  CHECK(babc_kernel(1, 1, 1, q, DyadicCube(-1, {0})) == doctest::Approx(4.5));
  CHECK_THROWS_AS(babc_kernel(1, 1, 1, q, DyadicCube(0, {0, 0})), PreconditionError);
}

TEST_CASE("babc kernel on the diagonal is 2^(a+b)") {
  gen::Rng r(11);
  for (int t = 0; t < 100; ++t) {
    const auto q = gen::cube(r, r.integer(1, 3));
    const double a = r.uniform(0, 3), b = r.uniform(0, 3), c = r.uniform(0, 3);
    CHECK(babc_kernel(a, b, c, q, q) == doctest::Approx(std::exp2(a + b)).epsilon(1e-14));
  }
}

TEST_CASE("babc swap law") {
  gen::Rng r(12);
  for (int t = 0; t < 100; ++t) {
    const int n = r.integer(1, 3);
    const auto q = gen::cube(r, n), s = gen::cube(r, n);
    const double a = r.uniform(-3, 3), b = r.uniform(-3, 3), c = r.uniform(-3, 3);
    const double lhs = babc_kernel(a, b, c, s, q), rhs = babc_kernel(b, a, c, q, s);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("babc kernel is nondecreasing in c for separated cubes") {
  gen::Rng r(13);
  for (int t = 0; t < 100; ++t) {
    const auto q = gen::cube(r, 2), s = gen::cube(r, 2);
    if (q.anchor() == s.anchor()) continue;
    double prev = 0.0;
    for (double c = 0.0; c <= 4.0; c += 0.5) {
      const double v = babc_kernel(0.5, 0.5, c, q, s);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("min_containing") {
  const DyadicCube q(0, {0});
  const Box same = min_containing(q, q);
  CHECK(same.lo == std::vector<double>{0.0});
  CHECK(same.hi == std::vector<double>{1.0});
  const Box s = min_containing(q, DyadicCube(0, {2}));
  CHECK(s.lo[0] == 0.0);
  CHECK(s.hi[0] == 3.0);
  // 2D: [0,1)^2 and [2,3)x[0,1) give side 3 (brute-force bounding cube)
  const Box s2 = min_containing(DyadicCube(0, {0, 0}), DyadicCube(0, {2, 0}));
  CHECK(s2.lo == std::vector<double>{0.0, 0.0});
  CHECK(s2.hi == std::vector<double>{3.0, 3.0});
}

TEST_CASE("window enumeration") {
  const auto w = build_window(1, 0, 0, Box::interval(0, 2));
  REQUIRE(w.size() == 2);
  CHECK(w.cube(0) == DyadicCube(0, {0}));
  CHECK(w.cube(1) == DyadicCube(0, {1}));

  CHECK(build_window(1, 0, 1, Box::unit(1)).size() == 3);
  CHECK(build_window(2, 0, 1, Box{{0, 0}, {2, 2}}).size() == 20);

  const auto a = build_window(2, -1, 3, Box{{-0.3, 0.1}, {1.2, 0.9}});
  const auto b = build_window(2, -1, 3, Box{{-0.3, 0.1}, {1.2, 0.9}});
  CHECK(a == b);
  CHECK(a.cubes() == b.cubes());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.index_of(a.cube(i)) == i);
  CHECK_FALSE(a.contains(DyadicCube(0, {5, 5})));
}

TEST_CASE("window enumeration is sorted by level then offset") {
  const auto w = build_window(2, 0, 2, Box{{0, 0}, {1.5, 1}});
  const auto cs = w.cubes();
  for (std::size_t i = 1; i < cs.size(); ++i) CHECK(cs[i - 1] < cs[i]);
}

TEST_CASE("window preconditions") {
  CHECK_THROWS_AS(build_window(1, 2, 1, Box::unit(1)), PreconditionError);
  CHECK_THROWS_AS(build_window(1, 0, 1, Box::interval(1, 1)), PreconditionError);
}
