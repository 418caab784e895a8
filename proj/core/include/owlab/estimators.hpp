#pragma once

#include <cstdint>
#include <vector>

#include "owlab/dyadic.hpp"
#include "owlab/sphere_search.hpp"
#include "owlab/weights.hpp"

namespace owlab {

struct DualResult {
  double value = 0.0;
  bool converged = true;
  bool closed_form = false;
  Vec argmax;  // maximizing e (unit Euclidean length) when the optimizer ran
};

// rho*(e*) = sup_e |<e*, e>| / rho(e).
DualResult dual_norm(const CubeNorm& rho, const Vec& e_star, const SphereSearchOptions& opts = {},
                     bool force_optimizer = false);
DualResult rho_dual(const WeightModel& v, const DyadicCube& q, double p, const Vec& e_star,
                    const Quadrature& quad = {}, const SphereSearchOptions& opts = {});

struct ApEstimate {
  double value = 0.0;
  DyadicCube worst;
  bool converged = true;
  std::size_t cubes_examined = 0;
};

// Constant of the A_p comparison on one box.
double ap_box_constant(const WeightModel& v, const Box& q, double p, const Quadrature& quad,
                       const SphereSearchOptions& opts, bool* converged = nullptr);
// Max over window cubes and their ancestors down to level j_min - ancestor_depth.
ApEstimate ap_constant_estimate(const WeightModel& v, double p, const GridWindow& window, const Quadrature& quad = {},
                                const SphereSearchOptions& opts = {}, int ancestor_depth = 3);

struct RHIEstimate {
  double eps = 0.0;
  double eta = 0.0;
  bool eps_degenerate = false;
  bool eta_degenerate = false;
  bool eta_trivial = false;  // p <= 1, so p' = inf and the dual side is vacuous
  std::vector<double> grid;
  std::vector<DyadicCube> cubes;
  std::vector<std::vector<double>> eps_ratios;  // [cube][grid]
  std::vector<std::vector<double>> eta_ratios;
};

RHIEstimate rhi_index_estimate(const WeightModel& v, double p, const GridWindow& window,
                               const std::vector<double>& eps_grid, double growth_threshold,
                               const Quadrature& quad = {}, std::uint64_t seed = 0xA9, int random_directions = 8);

struct DoublingEstimate {
  double beta = 0.0;
  double residual = 0.0;
  double raw_slope = 0.0;  // before clamping to >= n
  std::vector<double> envelope;  // best-direction max log2 ratio per depth 1..D
};

DoublingEstimate doubling_dimension_estimate(const WeightModel& v, double p, const GridWindow& window,
                                             const Quadrature& quad = {}, std::uint64_t seed = 0xA9,
                                             int random_directions = 8);

struct RatioResult {
  double value = 0.0;
  bool converged = true;
};

// sup_e rho_Q(e) / rho_R(e).
RatioResult norm_ratio(const WeightModel& v, double p, const Box& q, const Box& r, const Quadrature& quad = {},
                       const SphereSearchOptions& opts = {});
RatioResult norm_ratio(const WeightModel& v, double p, const DyadicCube& q, const DyadicCube& r,
                       const Quadrature& quad = {}, const SphereSearchOptions& opts = {});

// Smallest C with norm_ratio(Q,R) <= C B_{a,b,c}(Q,R) over all window pairs.
double fit_babc_constant(const WeightModel& v, double p, const GridWindow& window, const BabcParams& params,
                         const Quadrature& quad = {});

// Sample directions used by the empirical estimators: basis vectors then seeded random ones.
std::vector<Vec> probe_directions(int m, int random_count, std::uint64_t seed);

}  // namespace owlab
