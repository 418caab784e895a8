#pragma once

#include <vector>

namespace owlab {

// Uniform symmetric angular-frequency grid xi_k = -half_width + k * 2 half_width / nodes.
struct FrequencyGrid {
  int nodes = 1 << 14;
  double half_width = 64.0;

  double step() const { return 2.0 * half_width / nodes; }
  double at(int k) const { return -half_width + k * step(); }
};

struct FilterPair {
  double alpha = 5.0 / 3.0, beta = 2.0;
  FrequencyGrid grid;
  std::vector<double> xi, phi, psi;  // samples on the grid

  // phi_hat equals 1 on [1/alpha, alpha] in |xi|, vanishes off [1/beta, beta], with
  // transitions e(1-t) / (e(t) + e(1-t)), e(t) = exp(-1/t).
  double phi_hat(double xi) const;
  // conj(phi_hat(-xi)) / sum_k |phi_hat(2^k xi)|^2, zero at the origin.
  double psi_hat(double xi) const;
  double denominator(double xi) const;
};

FilterPair build_lp_pair(double alpha, double beta, const FrequencyGrid& grid = {});

// max over grid xi != 0 of |sum_j phi_hat(-2^j xi) psi_scale psi_hat(2^j xi) - 1|
double partition_check(const FilterPair& pair, double psi_scale = 1.0);

// Samples of phi_i * psi_j on the spatial grid dual to the frequency grid, with
// phi_i(x) = 2^i phi(2^i x).
struct Convolution {
  std::vector<double> x, value;
};
Convolution lp_convolution(const FilterPair& pair, int i, int j);

// Smallest C with |phi_i * psi_j(x)| <= C phi_{min(i,j)}(x) on the spatial nodes with |x| <= x_max,
// where phi(x) = (1 + |x|)^{-M}.
double conv_decay_constant(const FilterPair& pair, int i, int j, double M, double x_max = 64.0);

struct DecayFit {
  std::vector<double> constants;  // c_d for j = i + d, d = 0..max_gap
  double slope = 0.0;             // of log2 c_d against d, each c_d floored at eps c_0
};

DecayFit conv_decay_fit(const FilterPair& pair, int i, double M, int max_gap = 3, double x_max = 64.0);

}  // namespace owlab
