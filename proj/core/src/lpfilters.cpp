#include "owlab/lpfilters.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

#include "owlab/errors.hpp"
#include "owlab/fit.hpp"

namespace owlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smooth step from 1 at t = 0 to 0 at t = 1, flat to all orders at both ends.
double transition(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t)), b = std::exp(-1.0 / t);
  return a / (a + b);
}

// fftw planning is not thread safe.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

double FilterPair::phi_hat(double xi) const {
  const double a = std::abs(xi);
  if (a >= alpha) return transition((a - alpha) / (beta - alpha));
  if (a >= 1.0 / alpha) return 1.0;
  return transition((1.0 / alpha - a) / (1.0 / alpha - 1.0 / beta));
}

double FilterPair::denominator(double xi) const {
  if (xi == 0.0) return 0.0;
  // Only scales with 2^k |xi| in (1/beta, beta) contribute.
  const double a = std::abs(xi);
  const int k0 = static_cast<int>(std::floor(std::log2(1.0 / (beta * a)))) - 1;
  const int k1 = static_cast<int>(std::ceil(std::log2(beta / a))) + 1;
  double s = 0.0;
  for (int k = k0; k <= k1; ++k) {
    const double v = phi_hat(std::ldexp(xi, k));
    s += v * v;
  }
  return s;
}

double FilterPair::psi_hat(double xi) const {
  const double d = denominator(xi);
  return d > 0 ? phi_hat(-xi) / d : 0.0;
}

FilterPair build_lp_pair(double alpha, double beta, const FrequencyGrid& grid) {
  if (!(std::sqrt(2.0) < alpha && alpha < beta && beta < kPi))
    throw PreconditionError("filter pair needs sqrt(2) < alpha < beta < pi");
  if (grid.nodes < 16 || grid.nodes % 2 != 0 || !(grid.half_width > beta))
    throw PreconditionError("frequency grid must be even-sized and reach past beta");
  FilterPair f;
  f.alpha = alpha;
  f.beta = beta;
  f.grid = grid;
  for (int k = 0; k < grid.nodes; ++k) {
    const double xi = grid.at(k);
    f.xi.push_back(xi);
    f.phi.push_back(f.phi_hat(xi));
    if (xi != 0.0) {
      const double d = f.denominator(xi);
      if (d < 1e-12) throw PreconditionError("filter denominator vanishes at xi = " + std::to_string(xi));
    }
    f.psi.push_back(f.psi_hat(xi));
  }
  return f;
}

double partition_check(const FilterPair& pair, double psi_scale) {
  double worst = 0.0;
  for (double xi : pair.xi) {
    if (xi == 0.0) continue;
    const double a = std::abs(xi);
    const int k0 = static_cast<int>(std::floor(std::log2(1.0 / (pair.beta * a)))) - 1;
    const int k1 = static_cast<int>(std::ceil(std::log2(pair.beta / a))) + 1;
    double s = 0.0;
    for (int k = k0; k <= k1; ++k) {
      const double z = std::ldexp(xi, k);
      s += pair.phi_hat(-z) * psi_scale * pair.psi_hat(z);
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

Convolution lp_convolution(const FilterPair& pair, int i, int j) {
  const auto& g = pair.grid;
  const double lo_edge = std::max(std::ldexp(1.0, i), std::ldexp(1.0, j)) / pair.beta;
  const double hi_edge = std::min(std::ldexp(1.0, i), std::ldexp(1.0, j)) * pair.beta;
  if (hi_edge > g.half_width) throw PreconditionError("aliasing: band product reaches the grid cutoff");
  if (lo_edge < 8.0 * g.step()) throw PreconditionError("frequency grid too coarse for these levels");

  const int n = g.nodes;
  const double dxi = g.step();
  std::unique_ptr<fftw_complex[], decltype(&fftw_free)> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)), &fftw_free);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_1d(n, buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  // The (-1)^k and (-1)^m factors center both grids on the origin.
  for (int k = 0; k < n; ++k) {
    const double xi = g.at(k);
    const double v = pair.phi_hat(std::ldexp(xi, -i)) * pair.psi_hat(std::ldexp(xi, -j));
    buf[k][0] = (k % 2 == 0 ? v : -v) * dxi / (2.0 * kPi);
    buf[k][1] = 0.0;
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  Convolution c;
  const double dx = 2.0 * kPi / (n * dxi);
  const double sign_half = (n / 2) % 2 == 0 ? 1.0 : -1.0;
  for (int m = 0; m < n; ++m) {
    c.x.push_back((m - n / 2) * dx);
    c.value.push_back((m % 2 == 0 ? 1.0 : -1.0) * sign_half * buf[m][0]);
  }
  return c;
}

double conv_decay_constant(const FilterPair& pair, int i, int j, double M, double x_max) {
  if (!(x_max > 0)) throw PreconditionError("decay check needs a positive spatial range");
  const Convolution c = lp_convolution(pair, i, j);
  const int lmin = std::min(i, j);
  double best = 0.0;
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    if (std::abs(c.x[k]) > x_max) continue;
    const double phi_min = std::ldexp(std::pow(1.0 + std::ldexp(std::abs(c.x[k]), lmin), -M), lmin);
    best = std::max(best, std::abs(c.value[k]) / phi_min);
  }
  return best;
}

DecayFit conv_decay_fit(const FilterPair& pair, int i, double M, int max_gap, double x_max) {
  if (max_gap < 1) throw PreconditionError("decay fit needs at least two level gaps");
  DecayFit fit;
  std::vector<double> d, l;
  for (int g = 0; g <= max_gap; ++g) fit.constants.push_back(conv_decay_constant(pair, i, i + g, M, x_max));
  const double floor = std::numeric_limits<double>::epsilon() * fit.constants[0];
  for (int g = 0; g <= max_gap; ++g) {
    d.push_back(g);
    l.push_back(std::log2(std::max(fit.constants[g], floor)));
  }
  fit.slope = fit_line(d, l).slope;
  return fit;
}

}  // namespace owlab
