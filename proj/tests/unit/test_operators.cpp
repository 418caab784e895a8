#include <doctest.h>

#include <cmath>

#include "gen.hpp"

using namespace owlab;

namespace {

WeightModel power1(double center, double gamma) { return WeightModel::diagonal_power({{center}}, {gamma}); }

SampledFunction random_function(gen::Rng& r, Box box, std::vector<int> cells, int m) {
  SampledFunction f(std::move(box), std::move(cells), m);
  for (std::size_t i = 0; i < f.cell_count(); ++i) f.set(i, gen::vec(r, m));
  return f;
}

}  // namespace

TEST_CASE("averaging norm closed forms") {
  CHECK(averaging_norm_rhs(WeightModel::identity(1, 3), 2.0, Box::unit(1)).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(averaging_norm_rhs(power1(0.5, 0.25), 2.0, Box::unit(1)).value ==
        doctest::Approx(1.1547005383792515).epsilon(1e-9));
  CHECK_THROWS_AS(averaging_norm_rhs(power1(0.5, 0.25), 1.0, Box::unit(1)), PreconditionError);
  CHECK_THROWS_AS(averaging_norm_rhs(power1(0.5, 0.25), 2.0, Box::unit(2)), PreconditionError);
}

TEST_CASE("averaging norm: brute-force oracle agrees with the closed form") {
  gen::Rng r(51);
  for (int t = 0; t < 5; ++t) {
    const double p = r.uniform(1.5, 3.0);
    const double gamma = 0.9 * r.uniform(-1.0 / p, 1.0 - 1.0 / p);
    const auto v = power1(r.uniform(0.0, 1.0), gamma);
    const double rhs = averaging_norm_rhs(v, p, Box::unit(1)).value;
    const auto oracle = averaging_norm_oracle(v, p, Box::unit(1));
    CHECK(oracle.value <= rhs * (1 + 1e-6));
    CHECK(std::abs(oracle.value - rhs) <= 0.02 * rhs);
  }
  CHECK_THROWS_AS(averaging_norm_oracle(WeightModel::identity(1, 2), 2.0, Box::unit(1)), PreconditionError);
  CHECK_THROWS_AS(averaging_norm_oracle(power1(0.2, 0.1), 2.0, Box::unit(1), 8), PreconditionError);
}

TEST_CASE("sampled functions") {
  SampledFunction f(Box::unit(2), {4, 4}, 2);
  CHECK(f.cell_count() == 16);
  const Box c = f.cell_box(5);  // row 1, column 1
  CHECK(c.lo == std::vector<double>{0.25, 0.25});
  CHECK(f.cells_in(DyadicCube(1, {0, 0})).size() == 4);
  CHECK_THROWS_AS(f.cells_in(DyadicCube(3, {0, 0})), PreconditionError);
  CHECK_THROWS_AS(f.cells_in(DyadicCube(1, {2, 0})), PreconditionError);
  CHECK_THROWS_AS(f.set(0, Vec::Ones(3)), PreconditionError);
  CHECK_THROWS_AS(SampledFunction(Box::unit(2), {4}, 1), PreconditionError);
  CHECK_THROWS_AS(SampledFunction(Box::unit(1), {0}, 1), PreconditionError);

  SampledFunction one(Box::unit(1), {8}, 1);
  for (std::size_t i = 0; i < 8; ++i) one.set(i, Vec::Ones(1));
  CHECK(weighted_lp_norm(power1(0.0, 1.0), 2.0, one) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("sparse family structure") {
  const SampledFunction shape(Box::unit(1), {64}, 1);
  SparseOptions opts;
  opts.depth = 4;
  const auto fam = make_sparse_family(DyadicCube(0, {0}), shape, opts);
  CHECK(fam.entries.front().cube == DyadicCube(0, {0}));
  CHECK(fam.entries.size() > 1);
  CHECK_NOTHROW(fam.validate());
  for (const auto& e : fam.entries)
    for (double a : e.a) CHECK(a >= 0.0);

  opts.nonnegative = false;
  opts.depth = -1;
  CHECK_THROWS_AS(make_sparse_family(DyadicCube(0, {0}), shape, opts), PreconditionError);

  auto broken = fam;
  broken.entries[1].witness = broken.entries[0].witness;
  broken.entries[1].cube = broken.entries[0].cube;
  CHECK_THROWS_AS(broken.validate(), PreconditionError);
  auto big = fam;
  big.entries[0].a[0] = 1.5;
  CHECK_THROWS_AS(big.validate(), PreconditionError);
  auto small = fam;
  small.entries[0].witness.hi[0] = small.entries[0].witness.lo[0] + 0.1;
  CHECK_THROWS_AS(small.validate(), PreconditionError);
}

TEST_CASE("sparse operator action") {
  gen::Rng r(52);
  const auto f = random_function(r, Box::unit(1), {32}, 2);

  SparseFamily empty;
  const auto z = sparse_apply(empty, f);
  for (double x : z.values) CHECK(x == 0.0);

  // one cube with unit coefficients: average on the cube, zero elsewhere
  SparseFamily one;
  const DyadicCube q(1, {1});
  one.entries.push_back({q, std::vector<double>(16, 1.0), std::vector<double>(16, 1.0), Box::interval(0.6, 0.9)});
  CHECK_NOTHROW(one.validate());
  const auto g = sparse_apply(one, f);
  Vec avg = Vec::Zero(2);
  for (auto c : f.cells_in(q)) avg += f.value(c) / 16.0;
  for (std::size_t i = 0; i < 16; ++i) CHECK(g.value(i).norm() == 0.0);
  for (std::size_t i = 16; i < 32; ++i) CHECK((g.value(i) - avg).norm() <= 1e-14);

  // linearity
  SparseOptions opts;
  opts.nonnegative = false;
  const auto fam = make_sparse_family(DyadicCube(0, {0}), f, opts);
  const auto h = random_function(r, Box::unit(1), {32}, 2);
  SampledFunction sum(f.box, f.cells, 2);
  for (std::size_t i = 0; i < sum.cell_count(); ++i) sum.set(i, 2.0 * f.value(i) - h.value(i));
  const auto lhs = sparse_apply(fam, sum), a = sparse_apply(fam, f), b = sparse_apply(fam, h);
  for (std::size_t i = 0; i < sum.cell_count(); ++i)
    CHECK((lhs.value(i) - (2.0 * a.value(i) - b.value(i))).norm() <= 1e-13);
}

TEST_CASE("p22 levels match the independent quadrature") {
  // QUADPACK algebraic-weight integration of the inner integrals; exact right-hand side
  const double lhs[] = {203.2232902580372, 559.0500303815113, 1282.0065234380597};
  const double rhs[] = {23.370670590645283, 37.62691635981616, 51.70908642521724};
  for (int N = 1; N <= 3; ++N) {
    const auto row = p22_level(2.0, 0.05, N, 4096);
    CHECK(row.N == N);
    CHECK(row.lhs == doctest::Approx(lhs[N - 1]).epsilon(1e-5));
    CHECK(row.rhs == doctest::Approx(rhs[N - 1]).epsilon(1e-12));
  }
}

TEST_CASE("p22 preconditions") {
  CHECK_THROWS_AS(p22_level(1.0, 0.05, 2, 1024), PreconditionError);
  CHECK_THROWS_AS(p22_level(2.0, 0.2, 2, 1024), PreconditionError);
  CHECK_THROWS_AS(p22_level(2.0, 0.0, 2, 1024), PreconditionError);
  CHECK_THROWS_AS(p22_level(2.0, 0.05, 2, 64), PreconditionError);
  CHECK_THROWS_AS(p22_level(2.0, 0.05, 3, 1028), PreconditionError);
  CHECK_THROWS_AS(p22_level(2.0, 0.05, 10, 1024), PreconditionError);
  CHECK_THROWS_AS(p22_experiment(2.0, 0.05, 2, 2, 1024), PreconditionError);
  const auto res = p22_experiment(2.0, 0.05, 1, 3, 1024);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.lhs_slope > res.rhs_slope);
}

TEST_CASE("normal sup point values") {
  CHECK(normal_sup_point(1, 3, 1.0, 0) == doctest::Approx(0.0986122886681097).epsilon(1e-13));
  CHECK(normal_sup_point(1, 3, 1.0, 1) == doctest::Approx(0.5945348918918356).epsilon(1e-13));
  CHECK(normal_sup_point(1, 3, 1.0, 5) == doctest::Approx(0.5945348918918356).epsilon(1e-13));
  CHECK(normal_sup_point(1, 3, 2.0, 1) == doctest::Approx(0.5945348918918356 * 0.5945348918918356).epsilon(1e-13));
  // nondecreasing in J at any point
  gen::Rng r(53);
  for (int t = 0; t < 50; ++t) {
    const auto b = static_cast<std::uint64_t>(r.integer(2, 100000));
    const auto a = static_cast<std::uint64_t>(r.integer(1, static_cast<int>(b) - 1));
    double prev = 0.0;
    for (int J = 0; J <= 40; J += 4) {
      const double v = normal_sup_point(a, b, 1.5, J);
      CHECK(v >= prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(normal_sup_point(3, 3, 1.0, 1), PreconditionError);
  CHECK_THROWS_AS(normal_sup_point(1, 3, 1.0, -1), PreconditionError);
}

TEST_CASE("normal sup experiment") {
  const auto res = normal_sup_experiment(1.0, {0, 1, 4, 16}, 20000, 7);
  REQUIRE(res.rows.size() == 4);
  CHECK(res.monotone);
  for (const auto& row : res.rows) CHECK(row.std_error > 0.0);
  const auto again = normal_sup_experiment(1.0, {0, 1, 4, 16}, 20000, 7);
  CHECK(again.rows[3].mean == res.rows[3].mean);
  CHECK_THROWS_AS(normal_sup_experiment(1.0, {1}, 100, 7), PreconditionError);
  CHECK_THROWS_AS(normal_sup_experiment(1.0, {}, 20000, 7), PreconditionError);
  CHECK_THROWS_AS(normal_sup_experiment(0.0, {1}, 20000, 7), PreconditionError);
}
