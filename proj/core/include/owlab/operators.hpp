#pragma once

#include <cstdint>
#include <vector>

#include "owlab/dyadic.hpp"
#include "owlab/sphere_search.hpp"
#include "owlab/weights.hpp"

namespace owlab {

struct AveragingNorm {
  double value = 0.0;
  bool converged = true;
};

// Norm of f -> 1_Q <f>_Q on L^p(V): sup_e rho_{L^p(Q,V)}(e) / rho*_{L^{p'}(Q,V^{-*})}(e).
AveragingNorm averaging_norm_rhs(const WeightModel& v, double p, const Box& q, const Quadrature& quad = {},
                                 const SphereSearchOptions& opts = {});

struct AveragingOracle {
  double value = 0.0;
  bool converged = true;
  std::size_t cells = 0;  // partition size after grading
  int sweeps = 0;
};

// Brute force over functions constant on a partition of Q (1D, scalar weight).  The uniform
// partition is refined geometrically toward every singular center of v.
AveragingOracle averaging_norm_oracle(const WeightModel& v, double p, const Box& q, int partition_cells = 256,
                                      std::uint64_t seed = 0xA9);

// Vector-valued function constant on the cells of a uniform grid over a box.
struct SampledFunction {
  Box box;
  std::vector<int> cells;  // per axis
  int m = 1;
  std::vector<double> values;  // row-major cells (last axis fastest), m entries per cell

  SampledFunction() = default;
  SampledFunction(Box b, std::vector<int> cells_per_axis, int m);

  std::size_t cell_count() const;
  Box cell_box(std::size_t index) const;
  Vec value(std::size_t index) const;
  void set(std::size_t index, const Vec& v);
  // Cell indices covering a dyadic cube; throws unless the grid refines the cube.
  std::vector<std::size_t> cells_in(const DyadicCube& q) const;
};

// (integral |V(x) f(x)|^p dx)^{1/p}
double weighted_lp_norm(const WeightModel& v, double p, const SampledFunction& f, const Quadrature& quad = {});

struct SparseEntry {
  DyadicCube cube;
  std::vector<double> a, b;  // samples on the grid cells of the cube, in cells_in order
  Box witness;               // E(Q)
};

struct SparseFamily {
  std::vector<SparseEntry> entries;
  double eta = 1.0 / 3.0;

  // Throws when two witness sets overlap, a witness is too small, or a coefficient exceeds 1.
  void validate() const;
};

struct SparseOptions {
  int depth = 4;
  std::uint64_t seed = 0xA9;
  bool nonnegative = true;  // coefficients in [0,1], otherwise [-1,1]
};

// Greedy subtree of the top cube keeping cubes whose middle-third slab (last axis) avoids
// all earlier ones; coefficients sampled on the grid of f's shape.
SparseFamily make_sparse_family(const DyadicCube& top, const SampledFunction& shape, const SparseOptions& opts = {});

// Tf = sum_Q a_Q fint_Q b_Q f
SampledFunction sparse_apply(const SparseFamily& s, const SampledFunction& f);

struct P22Row {
  int N = 0;
  double lhs = 0.0;  // fint (fint |V(x) f(y)| dy)^p dx
  double rhs = 0.0;  // fint |V(y) f(y)|^p dy
};

struct P22Result {
  std::vector<P22Row> rows;
  double lhs_slope = 0.0;  // of log2 lhs against N
  double rhs_slope = 0.0;
};

// Diagonal weight v_i = |x - x_i|^{1/p' - eps}, f_i = |x - x_i|^{-1 + 2 eps} on [0,1), centers 2^{-j} k for
// j <= N, coefficients 2^{-j(1/p + eps)}.  The grid must be a multiple of 2^N with at least 2^{N+1} cells.
P22Result p22_experiment(double p, double eps, int n_min, int n_max, int grid);
P22Row p22_level(double p, double eps, int N, int grid);

struct NormalSupRow {
  int J = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct NormalSupResult {
  std::vector<NormalSupRow> rows;
  bool monotone = true;  // nondecreasing within three standard errors
};

// Monte Carlo estimate of int_0^1 sup_{0<=j<=J} |log{2^j x} + 1|^p dx for each J.
NormalSupResult normal_sup_experiment(double p, std::vector<int> j_values, std::size_t samples,
                                      std::uint64_t seed = 0xA9, int threads = 1);
// sup_{0<=j<=J} |log{2^j x} + 1|^p at the rational point x = a / b in (0,1).
double normal_sup_point(std::uint64_t a, std::uint64_t b, double p, int J);

}  // namespace owlab
