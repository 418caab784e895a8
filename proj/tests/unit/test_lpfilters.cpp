#include <doctest.h>

#include <cmath>

#include "gen.hpp"

using namespace owlab;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("filter profile") {
  const auto f = build_lp_pair(5.0 / 3.0, 2.0);
  CHECK(f.xi.size() == static_cast<std::size_t>(f.grid.nodes));
  CHECK(f.phi_hat(0.0) == 0.0);
  CHECK(f.phi_hat(0.49) == 0.0);
  CHECK(f.phi_hat(2.01) == 0.0);
  CHECK(f.phi_hat(0.6) == 1.0);
  CHECK(f.phi_hat(1.0) == 1.0);
  CHECK(f.phi_hat(1.66) == 1.0);
  gen::Rng r(71);
  for (int t = 0; t < 200; ++t) {
    const double xi = r.uniform(-3, 3);
    CHECK(f.phi_hat(xi) >= 0.0);
    CHECK(f.phi_hat(xi) <= 1.0);
    CHECK(f.phi_hat(-xi) == f.phi_hat(xi));
  }
  // nonincreasing on the outer transition
  double prev = 1.0;
  for (double xi = 5.0 / 3.0; xi <= 2.0; xi += 0.01) {
    CHECK(f.phi_hat(xi) <= prev);
    prev = f.phi_hat(xi);
  }
  CHECK(f.psi_hat(0.0) == 0.0);
}

TEST_CASE("partition of unity") {
  const auto f = build_lp_pair(5.0 / 3.0, 2.0);
  CHECK(partition_check(f) <= 1e-8);
  CHECK(partition_check(f, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
  const auto g = build_lp_pair(1.5, 3.0);
  CHECK(partition_check(g) <= 1e-8);
}

TEST_CASE("band-disjoint levels do not interact") {
  const auto f = build_lp_pair(5.0 / 3.0, 2.0);
  for (auto [i, j] : {std::pair{0, 2}, std::pair{0, 3}, std::pair{3, 1}, std::pair{-1, 2}})
    CHECK(max_abs(lp_convolution(f, i, j).value) <= 1e-10);
  CHECK(max_abs(lp_convolution(f, 0, 0).value) > 1e-3);
}

TEST_CASE("convolution has zero mean") {
  const auto f = build_lp_pair(5.0 / 3.0, 2.0);
  for (int j : {0, 1}) {
    const auto c = lp_convolution(f, 0, j);
    const double dx = c.x[1] - c.x[0];
    double s = 0.0;
    for (double v : c.value) s += v * dx;
    CHECK(std::abs(s) <= 1e-10);
  }
}

TEST_CASE("decay constants") {
  const auto f = build_lp_pair(5.0 / 3.0, 2.0);
  const auto fit = conv_decay_fit(f, 0, 5.0);
  REQUIRE(fit.constants.size() == 4);
  CHECK(fit.constants[0] > 0.0);
  CHECK(fit.slope <= -4.0);

  // the adjacent-level constants settle as the frequency grid is refined
  FrequencyGrid fine, finer;
  fine.nodes = 1 << 15;
  finer.nodes = 1 << 16;
  const auto g = build_lp_pair(5.0 / 3.0, 2.0, fine), h = build_lp_pair(5.0 / 3.0, 2.0, finer);
  for (int j : {0, 1}) {
    CHECK(conv_decay_constant(h, 0, j, 5.0) == doctest::Approx(conv_decay_constant(g, 0, j, 5.0)).epsilon(1e-6));
    CHECK(conv_decay_constant(g, 0, j, 5.0) == doctest::Approx(conv_decay_constant(f, 0, j, 5.0)).epsilon(1e-4));
  }
}

TEST_CASE("filter preconditions") {
  CHECK_THROWS_AS(build_lp_pair(1.3, 2.0), PreconditionError);
  CHECK_THROWS_AS(build_lp_pair(1.8, 1.7), PreconditionError);
  CHECK_THROWS_AS(build_lp_pair(1.8, 3.2), PreconditionError);
  CHECK_THROWS_AS(build_lp_pair(1.8, 2.0, FrequencyGrid{1001, 64.0}), PreconditionError);
  CHECK_THROWS_AS(build_lp_pair(1.8, 2.0, FrequencyGrid{1024, 1.5}), PreconditionError);
  const auto f = build_lp_pair(5.0 / 3.0, 2.0);
  CHECK_THROWS_AS(lp_convolution(f, 6, 6), PreconditionError);
  CHECK_THROWS_AS(lp_convolution(f, -9, -9), PreconditionError);
  CHECK_THROWS_AS(conv_decay_constant(f, 0, 0, 5.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(conv_decay_fit(f, 0, 5.0, 0), PreconditionError);
}
