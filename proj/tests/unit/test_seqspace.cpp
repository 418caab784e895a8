#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gen.hpp"

using namespace owlab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SpaceParams besov(double s, double p, double q) { return {s, p, q, SpaceKind::Besov}; }
SpaceParams tl(double s, double p, double q) { return {s, p, q, SpaceKind::TL}; }

}  // namespace

TEST_CASE("J and J_u") {
  CHECK(besov(0, 2, 1).J(1) == doctest::Approx(1.0));
  CHECK(besov(0, 0.5, 1).J(2) == doctest::Approx(4.0));
  CHECK(tl(0, 2, 0.5).J(1) == doctest::Approx(2.0));
  CHECK(besov(0, 2, 2).J_u(1, 1.0) == doctest::Approx(1.0));
  CHECK(tl(0, 3, 1.5).J_u(2, 2.0) == doctest::Approx(2.0 / 1.5));
}

TEST_CASE("sequence storage") {
  DyadicSequence t(build_window(1, 0, 2, Box::unit(1)), 2);
  CHECK(t.size() == 7);
  CHECK(t.support_size() == 0);
  Vec v(2);
  v << 1.0, -2.0;
  t.set(DyadicCube(1, {1}), v);
  CHECK(t.get(DyadicCube(1, {1})) == v);
  CHECK(t.get(DyadicCube(5, {1})) == Vec::Zero(2));
  CHECK(t.support_size() == 1);
  CHECK(t.max_abs() == 2.0);
  CHECK_THROWS_AS(t.set(DyadicCube(4, {0}), v), PreconditionError);
  CHECK_THROWS_AS(t.set(0, Vec::Ones(3)), PreconditionError);
  CHECK_THROWS_AS(DyadicSequence(build_window(1, 0, 0, Box::unit(1)), 0), PreconditionError);
  const auto u = 2.0 * t + t;
  CHECK(u.get(DyadicCube(1, {1})) == 3.0 * v);
  DyadicSequence other(build_window(1, 0, 3, Box::unit(1)), 2);
  CHECK_THROWS_AS(other += t, PreconditionError);
}

TEST_CASE("random sequences are seeded") {
  const auto w = build_window(1, 0, 4, Box::unit(1));
  CHECK(random_sequence(w, 2, 7).data() == random_sequence(w, 2, 7).data());
  CHECK(random_sequence(w, 2, 7).data() != random_sequence(w, 2, 8).data());
  const auto sparse = random_sequence(w, 1, 3, 0.3);
  CHECK(sparse.support_size() < w.size());
  CHECK(sparse.max_abs() <= 1.0);
}

TEST_CASE("layer_eval") {
  DyadicSequence t(build_window(1, 0, 2, Box::unit(1)), 1);
  t.set(DyadicCube(2, {1}), Vec::Constant(1, 3.0));
  const double in = 0.3, out = 0.6, off = 1.5;
  CHECK(layer_eval(t, 2, &in)[0] == doctest::Approx(6.0));
  CHECK(layer_eval(t, 2, &out)[0] == 0.0);
  CHECK(layer_eval(t, 1, &in)[0] == 0.0);
  CHECK_THROWS_AS(layer_eval(t, 2, &off), PreconditionError);
}

TEST_CASE("two unit cubes give sqrt 2") {
  DyadicSequence t(build_window(1, 0, 0, Box::interval(0, 2)), 1);
  t.set(std::size_t{0}, Vec::Ones(1));
  t.set(std::size_t{1}, Vec::Ones(1));
  const auto id = WeightModel::identity(1, 1);
  CHECK(seq_norm(t, besov(0, 2, 2), NormFamily::from_weight(id, 2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(seq_norm(t, besov(0, 2, 2), PointwiseWeight{id, {}}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(seq_norm(t, tl(0, 2, 2), NormFamily::absolute()) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("seq_norm preconditions") {
  const auto t = random_sequence(build_window(1, 0, 2, Box::unit(1)), 2, 1);
  CHECK_THROWS_AS(seq_norm(t, besov(0, kInf, 2), NormFamily::absolute()), PreconditionError);
  CHECK_THROWS_AS(seq_norm(t, besov(0, 0, 2), NormFamily::absolute()), PreconditionError);
  CHECK_THROWS_AS(seq_norm(t, besov(0, 2, 2), PointwiseWeight{WeightModel::identity(1, 3), {}}), PreconditionError);
  DyadicSequence zero(t.window(), 2);
  CHECK(seq_norm(zero, besov(0, 2, 2), NormFamily::absolute()) == 0.0);
}

TEST_CASE("Besov norm: pointwise integrand equals cube norms") {
  gen::Rng r(31);
  const auto w = build_window(1, 0, 5, Box::unit(1));
  for (int t = 0; t < 20; ++t) {
    const int m = r.integer(1, 3);
    const double p = r.uniform(0.5, 4.0), q = r.uniform(0.5, 4.0), s = r.uniform(-1, 1);
    const auto seq = random_sequence(w, m, 100 + t, r.uniform(0.3, 1.0));
    const auto pc = gen::piecewise_diagonal(r, m, 32, r.uniform(1.0, 3.0));
    const double a = seq_norm(seq, besov(s, p, q), NormFamily::from_weight(pc, p));
    const double b = seq_norm(seq, besov(s, p, q), PointwiseWeight{pc, {}});
    CHECK(rel(a, b) <= 1e-10);

    const double p1 = std::max(p, 1.0);
    const auto pw = gen::diagonal_power(r, m, p1, p1);
    const double c = seq_norm(seq, besov(s, p1, q), NormFamily::from_weight(pw, p1));
    const double d = seq_norm(seq, besov(s, p1, q), PointwiseWeight{pw, {}});
    CHECK(rel(c, d) <= 1e-6);
  }
}

TEST_CASE("rescale identity") {
  gen::Rng r(32);
  const auto w = build_window(1, 0, 5, Box::unit(1));
  for (double u : {1.0 / 3.0, 0.5, 1.0}) {
    for (int t = 0; t < 10; ++t) {
      const int m = r.integer(1, 3);
      const double p = r.uniform(0.5, 4.0), q = r.uniform(0.5, 4.0), s = r.uniform(-1, 1);
      const auto seq = random_sequence(w, m, 200 + t);
      const auto rho = NormFamily::from_weight(gen::piecewise_diagonal(r, m, 8), r.uniform(0.5, 3.0));
      for (auto kind : {SpaceKind::Besov, SpaceKind::TL}) {
        const SpaceParams prm{s, p, q, kind};
        const double lhs = std::pow(seq_norm(seq, prm, rho), u);
        const double rhs = seq_norm(rescale_map(seq, rho, u), rescaled_params(prm, u), NormFamily::absolute());
        CHECK(rel(lhs, rhs) <= 1e-10);
      }
    }
  }
  CHECK_THROWS_AS(rescale_map(random_sequence(w, 1, 1), NormFamily::absolute(), 0.0), PreconditionError);
}

TEST_CASE("Triebel-Lizorkin and Besov agree at q = p") {
  gen::Rng r(33);
  for (int t = 0; t < 10; ++t) {
    const int n = r.integer(1, 2);
    const auto w = build_window(n, 0, n == 1 ? 5 : 3, Box::unit(n));
    const double p = r.uniform(0.5, 4.0), s = r.uniform(-1, 1);
    const auto seq = random_sequence(w, 2, 300 + t, 0.7);
    const auto rho = NormFamily::absolute(r.uniform(1.0, 3.0));
    CHECK(rel(seq_norm(seq, tl(s, p, p), rho), seq_norm(seq, besov(s, p, p), rho)) <= 1e-10);
  }
}

TEST_CASE("norms are homogeneous and nonincreasing in q") {
  gen::Rng r(34);
  const auto w = build_window(1, 0, 4, Box::unit(1));
  for (int t = 0; t < 10; ++t) {
    const auto seq = random_sequence(w, 2, 400 + t);
    const auto rho = NormFamily::from_weight(gen::piecewise_diagonal(r, 2, 4), 2.0);
    const double p = r.uniform(1.0, 3.0), lam = r.uniform(-3, 3);
    for (auto kind : {SpaceKind::Besov, SpaceKind::TL}) {
      const SpaceParams prm{0.3, p, 2.0, kind};
      CHECK(rel(seq_norm(lam * seq, prm, rho), std::abs(lam) * seq_norm(seq, prm, rho)) <= 1e-12);
      double prev = kInf;
      for (double q : {0.5, 1.0, 2.0, 4.0, kInf}) {
        const double x = seq_norm(seq, {0.3, p, q, kind}, rho);
        CHECK(x <= prev * (1 + 1e-12));
        prev = x;
      }
    }
  }
}

TEST_CASE("single cube bound holds") {
  gen::Rng r(35);
  const auto w = build_window(1, 0, 4, Box::unit(1));
  for (int t = 0; t < 20; ++t) {
    const auto seq = random_sequence(w, 2, 500 + t);
    const auto v = gen::piecewise_diagonal(r, 2, 16);
    const double p = r.uniform(0.7, 3.0);
    const SpaceParams prm{r.uniform(-1, 1), p, r.uniform(0.5, 3.0), r.coin() ? SpaceKind::Besov : SpaceKind::TL};
    const auto cube = w.cube(static_cast<std::size_t>(r.integer(0, static_cast<int>(w.size()) - 1)));
    CHECK(single_cube_bound(seq, cube, NormFamily::from_weight(v, p), prm).holds);
    CHECK(single_cube_bound(seq, cube, PointwiseWeight{v, {}}, prm).holds);
  }
}

TEST_CASE("sequence file round trip") {
  const auto w = build_window(2, -1, 2, Box{{-0.5, 0.0}, {1.0, 1.25}});
  const auto t = random_sequence(w, 3, 9, 0.4);
  std::stringstream ss;
  write_sequence(ss, t);
  const auto back = read_sequence(ss);
  CHECK(back.window() == w);
  CHECK(back.m() == 3);
  REQUIRE(back.data().size() == t.data().size());
  for (std::size_t i = 0; i < t.data().size(); ++i) CHECK(back.data()[i] == t.data()[i]);

  std::istringstream bad("dyadic_sequence n 1 m 1 levels 0 1 box 0\n");
  CHECK_THROWS_AS(read_sequence(bad), PreconditionError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_sequence(empty), PreconditionError);
}
