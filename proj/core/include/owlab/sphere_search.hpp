#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "owlab/weights.hpp"

namespace owlab {

struct SphereSearchOptions {
  int random_starts = 16;
  double rel_tol = 1e-6;
  int max_steps = 500;
  std::uint64_t seed = 0xA9;
};

// Objective homogeneous of degree zero; fills the gradient when the pointer is non-null.
using SphereObjective = std::function<double(const Vec&, Vec*)>;

struct SphereSearchResult {
  double value = 0.0;
  Vec argmax;
  bool converged = true;
};

// Multi-start projected gradient ascent over the Euclidean unit sphere of R^m.
// Each start walks along great circles with an adaptive angle.
SphereSearchResult maximize_on_sphere(const SphereObjective& f, int m, const std::vector<Vec>& starts,
                                      const SphereSearchOptions& opts = {});

// Unit vectors in R^m drawn from a seeded Gaussian.
std::vector<Vec> random_unit_vectors(int m, int count, std::uint64_t seed);

}  // namespace owlab
