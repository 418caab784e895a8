#include <cmath>

#include "owlab/almostdiag.hpp"
#include "owlab/errors.hpp"
#include "owlab/fit.hpp"

namespace owlab {

namespace {

void check_args(double p, double beta, int M) {
  if (!(p > 1) || std::isinf(p)) throw PreconditionError("sharp_ad: p must lie in (1, inf)");
  if (!(beta > 1 && beta < p)) throw PreconditionError("sharp_ad: beta must lie in (1, p)");
  if (M < 3) throw PreconditionError("sharp_ad: the sequence starts at level 3");
  if (M > 24) throw PreconditionError("sharp_ad: level too deep");
}

// lambda^p for level j: 2^{j(beta-1)} j^{-p}.
double lambda_pow(double p, double beta, int j) { return std::exp2(j * (beta - 1.0)) * std::pow(j, -p); }

// Neighbours l of k at level j: 0 <= l < 2^j, |l - k| <= 4.
template <class F>
void for_neighbours(std::int64_t k, int j, F f) {
  const std::int64_t top = (std::int64_t{1} << j) - 1;
  for (std::int64_t l = std::max<std::int64_t>(0, k - 4); l <= std::min(top, k + 4); ++l) f(l);
}

double norm_partial(double p, double beta, int M) {
  double total = 0.0;
  for (int j = 3; j <= M; ++j) {
    const double h = std::ldexp(1.0, -j);
    double level = 0.0;
    for (std::int64_t k = 0; k < (std::int64_t{1} << j); ++k)
      for_neighbours(k, j, [&](std::int64_t l) { level += h * power_mean_1d(h * k, h * (k + 1), h * l, beta - 1.0); });
    total += lambda_pow(p, beta, j) * level;
  }
  return std::pow(total, 1.0 / p);
}

double lhs_level(double p, double beta, int M, const Quadrature& quad) {
  const std::int64_t cells = std::int64_t{1} << M;
  const double h = std::ldexp(1.0, -M);
  const double c = lambda_pow(p, beta, M);
  const int q = quad.nodes;
  std::vector<double> prefix(static_cast<std::size_t>(cells) + 1);
  double outer = 0.0;
  for (std::int64_t cell = 0; cell < cells; ++cell)
    for (int node = 0; node < q; ++node) {
      const double x = h * (cell + (node + 0.5) / q);
      prefix[0] = 0.0;
      for (std::int64_t l = 0; l < cells; ++l) prefix[l + 1] = prefix[l] + std::pow(std::abs(x - h * l), beta - 1.0);
      double inner = 0.0;
      for (std::int64_t k = 0; k < cells; ++k) {
        const auto lo = std::max<std::int64_t>(0, k - 4), hi = std::min(cells, k + 5);
        inner += h * std::pow(c * (prefix[hi] - prefix[lo]), 1.0 / p);
      }
      outer += std::pow(inner, p);
    }
  return std::pow(outer / static_cast<double>(cells * q), 1.0 / p);
}

}  // namespace

SharpAdResult sharp_ad_experiment(double p, double beta, int m_min, int m_max, const Quadrature& quad) {
  check_args(p, beta, m_min);
  check_args(p, beta, m_max);
  if (m_max - m_min + 1 < 4) throw PreconditionError("sharp_ad: at least four levels are needed for the fit");
  SharpAdResult res;
  std::vector<double> ms, raw, corrected;
  for (int M = m_min; M <= m_max; ++M) {
    SharpAdRow row{M, lhs_level(p, beta, M, quad), norm_partial(p, beta, M)};
    res.rows.push_back(row);
    ms.push_back(M);
    raw.push_back(std::log2(row.lhs));
    corrected.push_back(std::log2(row.lhs * M));
  }
  res.slope = fit_line(ms, raw).slope;
  res.corrected_slope = fit_line(ms, corrected).slope;
  return res;
}

SharpAdRow sharp_ad_reference(double p, double beta, int M, const Quadrature& quad) {
  check_args(p, beta, M);
  if (M > 6) throw PreconditionError("sharp_ad_reference: M too large for the generic path");
  // Coordinate i = 2^j + k carries the center 2^{-j} k; coordinate 0 is unused.
  const int m = 1 << (M + 1);
  std::vector<std::vector<double>> centers(m, std::vector<double>{0.0});
  for (int j = 0; j <= M; ++j)
    for (int k = 0; k < (1 << j); ++k) centers[(1 << j) + k][0] = std::ldexp(static_cast<double>(k), -j);
  const WeightModel v = WeightModel::diagonal_power(centers, std::vector<double>(m, (beta - 1.0) / p), p);

  const GridWindow w = build_window(1, 3, M, Box::unit(1));
  DyadicSequence t(w, m);
  for (int j = 3; j <= M; ++j)
    for (std::int64_t k = 0; k < (std::int64_t{1} << j); ++k) {
      Vec e = Vec::Zero(m);
      for_neighbours(k, j, [&](std::int64_t l) { e[(1 << j) + l] = 1.0; });
      t.set(DyadicCube(j, {k}), std::pow(2.0, -j / 2.0) * std::pow(lambda_pow(p, beta, j), 1.0 / p) * e);
    }

  SharpAdRow row;
  row.M = M;
  SpaceParams prm{0.0, p, p, SpaceKind::Besov};
  row.norm = seq_norm(t, prm, NormFamily::from_weight(v, p, quad));

  const double h = std::ldexp(1.0, -M);
  double outer = 0.0;
  const int cells = 1 << M;
  for (int cell = 0; cell < cells; ++cell)
    for (int node = 0; node < quad.nodes; ++node) {
      const double x = h * (cell + (node + 0.5) / quad.nodes);
      double inner = 0.0;
      for (int k = 0; k < cells; ++k) {
        const double y = h * (k + 0.5);
        inner += h * lp_norm(v.apply(&x, layer_eval(t, M, &y)), p);
      }
      outer += std::pow(inner, p);
    }
  row.lhs = std::pow(outer / (cells * quad.nodes), 1.0 / p);
  return row;
}

}  // namespace owlab
