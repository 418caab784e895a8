#include <doctest.h>

#include <cmath>

#include "gen.hpp"

using namespace owlab;

namespace {

Vec scalar(double x) { return Vec::Constant(1, x); }

WeightModel power1(double center, double gamma) { return WeightModel::diagonal_power({{center}}, {gamma}); }

}  // namespace

TEST_CASE("lp_norm and conjugate exponents") {
  Vec y(2);
  y << 3.0, -4.0;
  CHECK(lp_norm(y, 2.0) == doctest::Approx(5.0));
  CHECK(lp_norm(y, 1.0) == doctest::Approx(7.0));
  CHECK(lp_norm(y, kInf) == doctest::Approx(4.0));
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
  CHECK(conjugate_exponent(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK(std::isinf(conjugate_exponent(1.0)));
  CHECK(std::isinf(conjugate_exponent(0.5)));
}

TEST_CASE("power_mean_1d closed forms") {
  CHECK(power_mean_1d(0, 1, 0.5, -0.5) == doctest::Approx(2.8284271247461901).epsilon(1e-13));
  CHECK(power_mean_1d(0, 1, 0.25, 0.3) == doctest::Approx(0.6560958114064716).epsilon(1e-13));
  CHECK(power_mean_1d(2, 5, 1, 0.0) == doctest::Approx(1.0));
  CHECK(std::isinf(power_mean_1d(0, 1, 0.5, -1.0)));
  CHECK(power_mean_1d(0, 1, 3.0, -1.5) > 0.0);  // center outside the interval
}

TEST_CASE("weight constructors reject bad input") {
  CHECK_THROWS_AS(WeightModel::identity(1, 2, 0.5), PreconditionError);
  CHECK_THROWS_AS(WeightModel::diagonal_log({{0.0}}).inverse_adjoint(), PreconditionError);
  CHECK_THROWS_AS(CubeNorm(WeightModel::identity(1, 1), Box::unit(1), 0.0), PreconditionError);
  CHECK_THROWS_AS(CubeNorm(WeightModel::identity(1, 1), Box::unit(2), 2.0), PreconditionError);
  CHECK_THROWS_AS(rho_lp(power1(0.5, -1.0), Box::unit(1), 1.0, scalar(1.0)), NumericalError);
}

TEST_CASE("rho_lp examples") {
  CHECK(rho_lp(power1(0.0, 1.0), Box::unit(1), 2.0, scalar(1.0)) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(rho_lp(WeightModel::identity(1, 3), Box::unit(1), 2.0, Vec::Ones(3)) == doctest::Approx(std::sqrt(3.0)));
  // sampled and closed-form paths agree for a piecewise constant weight on its own cells
  const auto pc = WeightModel::piecewise_constant(Box::unit(1), {2}, {Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 3.0)});
  CHECK(rho_lp(pc, Box::unit(1), 2.0, scalar(1.0)) == doctest::Approx(std::sqrt(5.0)));
  CHECK(rho_lp(pc, Box::unit(1), kInf, scalar(1.0)) == doctest::Approx(3.0));
}

TEST_CASE("rho_lp is absolutely homogeneous") {
  gen::Rng r(21);
  for (int t = 0; t < 50; ++t) {
    const int m = r.integer(1, 3);
    const double p = r.uniform(1.0, 4.0);
    const auto v = r.coin() ? gen::diagonal_power(r, m, p) : gen::piecewise_diagonal(r, m, 4);
    const DyadicCube q = gen::cube(r, 1, 0, 3, 0);
    const Vec e = gen::vec(r, m);
    const double lam = r.uniform(-5.0, 5.0);
    const double a = rho_lp(v, q, p, lam * e), b = std::abs(lam) * rho_lp(v, q, p, e);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("rho_lp is nondecreasing in p") {
  gen::Rng r(22);
  for (int t = 0; t < 50; ++t) {
    const int m = r.integer(1, 3);
    const auto v = gen::piecewise_diagonal(r, m, 8, 1.0 + 2.0 * r.uniform(0, 1));
    const Vec e = gen::vec(r, m);
    double prev = 0.0;
    for (double p : {0.5, 1.0, 1.5, 2.0, 3.0, 6.0, kInf}) {
      const double x = rho_lp(v, Box::unit(1), p, e);
      CHECK(x >= prev * (1 - 1e-12));
      prev = x;
    }
  }
}

TEST_CASE("dual norm example and duality inequality") {
  const CubeNorm rho(power1(0.0, 0.5), Box::unit(1), 2.0);
  CHECK(dual_norm(rho, scalar(1.0)).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  gen::Rng r(23);
  for (int t = 0; t < 20; ++t) {
    const int m = r.integer(1, 3);
    const double p = r.uniform(1.2, 3.0);
    const auto v = gen::piecewise_diagonal(r, m, 4, r.uniform(1.0, 3.0));
    const CubeNorm n(v, Box::unit(1), p);
    const Vec es = gen::vec(r, m);
    const double d = dual_norm(n, es).value;
    for (int k = 0; k < 10; ++k) {
      const Vec e = gen::vec(r, m);
      CHECK(std::abs(es.dot(e)) <= n(e) * d * (1 + 1e-6));
    }
  }
}

TEST_CASE("closed-form dual agrees with the sphere optimizer") {
  gen::Rng r(24);
  for (int t = 0; t < 10; ++t) {
    const double p = r.uniform(1.2, 3.0);
    const auto v = gen::diagonal_power(r, 3, p, p);
    const CubeNorm n(v, Box::unit(1), p);
    const Vec es = gen::vec(r, 3);
    const auto a = dual_norm(n, es), b = dual_norm(n, es, {}, true);
    CHECK(a.closed_form);
    CHECK_FALSE(b.closed_form);
    // direct: (sum |e*_i|^{p'} a_i^{-p'/p})^{1/p'} with a_i the coordinate means
    const double pc = conjugate_exponent(p);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::pow(std::abs(es[i]) * std::pow(n.coefficients()[i], -1.0 / p), pc);
    CHECK(a.value == doctest::Approx(std::pow(s, 1.0 / pc)).epsilon(1e-12));
    CHECK(b.value <= a.value * (1 + 1e-12));
    CHECK(std::abs(a.value - b.value) <= 1e-4 * a.value);
  }
}

TEST_CASE("A_p constants") {
  const Quadrature quad;
  CHECK(ap_box_constant(WeightModel::identity(1, 2), Box::unit(1), 2.0, quad, {}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ap_box_constant(power1(0.0, 0.25), Box::unit(1), 2.0, quad, {}) ==
        doctest::Approx(1.1547005383792515).epsilon(1e-9));
  // never below one
  gen::Rng r(25);
  for (int t = 0; t < 10; ++t) {
    const auto v = gen::piecewise_diagonal(r, 2, 4);
    CHECK(ap_box_constant(v, Box::unit(1), 2.0, quad, {}) >= 1.0 - 1e-9);
  }
  const auto est = ap_constant_estimate(power1(0.0, -0.4), 2.0, build_window(1, 0, 4, Box::unit(1)));
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(5.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("reverse Hoelder index of a power weight") {
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.025 * i);
  const auto r = rhi_index_estimate(power1(0.0, -0.4), 2.0, build_window(1, 0, 4, Box::unit(1)), grid, 2.0);
  CHECK_FALSE(r.eps_degenerate);
  CHECK(r.eps >= 0.3);
  CHECK(r.eps <= 0.5);
  CHECK_THROWS_AS(rhi_index_estimate(power1(0.0, -0.4), 2.0, build_window(1, 0, 1, Box::unit(1)), {}, 2.0),
                  PreconditionError);
}

TEST_CASE("doubling dimension") {
  const auto id = doubling_dimension_estimate(WeightModel::identity(1, 1), 2.0, build_window(1, 0, 5, Box::unit(1)));
  CHECK(id.beta == doctest::Approx(1.0).epsilon(0.01));
  const auto id2 =
      doubling_dimension_estimate(WeightModel::identity(2, 1), 2.0, build_window(2, 0, 4, Box::unit(2)));
  CHECK(id2.beta == doctest::Approx(2.0).epsilon(0.01));
  // |x|^{(beta-1)/p} has doubling dimension beta
  const double beta = 1.8;
  const auto pw = doubling_dimension_estimate(power1(0.0, (beta - 1) / 2), 2.0, build_window(1, 0, 6, Box::unit(1)));
  CHECK(std::abs(pw.beta - beta) <= 0.1 * beta);
  CHECK_THROWS_AS(doubling_dimension_estimate(WeightModel::identity(1, 1), 2.0, build_window(1, 0, 1, Box::unit(1))),
                  PreconditionError);
}

TEST_CASE("block weight") {
  // zero inner block gives the identity
  const auto zero = WeightModel::piecewise_constant(Box::unit(1), {1}, {Mat::Zero(2, 2)});
  const auto v0 = make_bmo_block_weight(zero);
  const double x = 0.3;
  CHECK(v0.m() == 4);
  CHECK(v0.matrix_at(&x).isApprox(Mat::Identity(4, 4)));

  const auto v = make_bmo_block_weight(WeightModel::diagonal_log({{0.5}, {0.1}}));
  const auto w = v.inverse_adjoint();
  gen::Rng r(26);
  for (int t = 0; t < 20; ++t) {
    const double y = r.uniform(0.0, 1.0);
    const Mat prod = v.matrix_at(&y).transpose() * w.matrix_at(&y);
    CHECK((prod - Mat::Identity(4, 4)).norm() <= 1e-12 * (1 + v.matrix_at(&y).norm()));
  }
}

TEST_CASE("inverse adjoint of a diagonal power weight") {
  const auto v = WeightModel::diagonal_power({{0.2}, {0.7}}, {0.3, -0.2});
  const auto w = v.inverse_adjoint();
  const double x = 0.55;
  CHECK((v.matrix_at(&x) * w.matrix_at(&x)).isApprox(Mat::Identity(2, 2), 1e-14));
  CHECK(w.target().u == doctest::Approx(2.0));
}

TEST_CASE("norm ratio") {
  const auto v = power1(0.0, 0.5);
  const DyadicCube q(2, {1});
  CHECK(norm_ratio(v, 2.0, q, q).value == doctest::Approx(1.0));
  CHECK(norm_ratio(WeightModel::identity(1, 2), 2.0, q, DyadicCube(0, {3})).value == 1.0);
  // scalar weight: ratio is the quotient of the two norms
  const DyadicCube a(1, {0}), b(1, {1});
  const double expect = rho_lp(v, a, 2.0, scalar(1)) / rho_lp(v, b, 2.0, scalar(1));
  CHECK(norm_ratio(v, 2.0, a, b).value == doctest::Approx(expect).epsilon(1e-9));
}
