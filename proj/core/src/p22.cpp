#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "owlab/errors.hpp"
#include "owlab/fit.hpp"
#include "owlab/operators.hpp"

namespace owlab {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Gauss-Legendre rule mapped to [0, len].
template <unsigned N>
void gauss_on(double len, std::vector<double>& nodes, std::vector<double>& weights) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  nodes.clear();
  weights.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double signs[2] = {-1.0, 1.0};
    for (double s : signs) {
      if (x[i] == 0.0 && s > 0) continue;
      nodes.push_back(0.5 * len * (1.0 + s * x[i]));
      weights.push_back(0.5 * len * w[i]);
    }
  }
}

// Lagrange basis through s = 0, h/2, h.
void lagrange3(double s, double h, double out[3]) {
  const double a = 0.0, b = h / 2, c = h;
  out[0] = (s - b) * (s - c) / ((a - b) * (a - c));
  out[1] = (s - a) * (s - c) / ((b - a) * (b - c));
  out[2] = (s - a) * (s - b) / ((c - a) * (c - b));
}

struct CellRule {
  std::vector<double> factor;  // multiplies R(s) inside the root
  std::vector<double> weight;
  std::vector<std::array<double, 3>> basis;
};

}  // namespace

P22Row p22_level(double p, double eps, int N, int grid) {
  if (!(p > 1) || std::isinf(p)) throw PreconditionError("p22: p must lie in (1, inf)");
  const double pd = conjugate_exponent(p);
  if (!(eps > 0 && eps < 1.0 / (3.0 * pd))) throw PreconditionError("p22: eps must lie in (0, 1/(3p'))");
  if (N < 0 || N > 20) throw PreconditionError("p22: N out of range");
  if (grid < 128) throw PreconditionError("p22: grid must have at least 128 cells");
  const int centers = 1 << N;
  if (grid % centers != 0 || grid < 2 * centers)
    throw PreconditionError("p22: grid must be a multiple of 2^N with at least 2^(N+1) cells");

  const double bp = (1.0 / pd - eps) * p;  // exponent of |x - c| in |V(x) f(y)|^p
  const double ap = (-1.0 + 2.0 * eps) * p;
  const int stride = grid / centers;
  const double h = 1.0 / grid;

  // Centers m 2^{-N} carry the summed coefficient of every level containing them.
  std::vector<double> c(centers), wsum(centers, 0.0);
  for (int m = 0; m < centers; ++m) {
    c[m] = std::ldexp(static_cast<double>(m), -N);
    for (int j = 0; j <= N; ++j)
      if (m % (1 << (N - j)) == 0) wsum[m] += std::exp2(-j * (1.0 + eps * p));
  }

  P22Row row;
  row.N = N;
  for (int m = 0; m < centers; ++m) row.rhs += wsum[m] * power_mean_1d(0.0, 1.0, c[m], -1.0 + eps * p);

  // y nodes: grid boundaries 0..grid, then cell midpoints.
  const int ny = 2 * grid + 1;
  RowMat B(centers, ny);
  for (int m = 0; m < centers; ++m)
    for (int col = 0; col < ny; ++col) {
      const double y = col <= grid ? col * h : (col - grid - 1 + 0.5) * h;
      const bool own = col <= grid && col == m * stride;
      B(m, col) = own ? 0.0 : std::pow(std::abs(y - c[m]), ap);
    }

  // Every cell lies between two consecutive centers c_L < c_R (c_R absent past the last one).  Their
  // terms are evaluated exactly at the quadrature nodes; only the far remainder R is interpolated,
  // log-quadratically through the cell ends and midpoint.  The two cells touching a center use
  // s = t^kappa, which turns s^{ap/p} ds into a constant multiple of dt.
  const double kappa = 1.0 / (2.0 * eps);
  const double span = stride * h;
  CellRule sing, reg;
  std::vector<double> sing_far;            // |span - s|^{ap} at the singular nodes
  std::vector<std::vector<double>> tl, tr;  // [offset][node] distance powers to c_L and c_R
  {
    std::vector<double> t, w;
    gauss_on<16>(std::pow(h, 1.0 / kappa), t, w);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double s = std::pow(t[k], kappa);
      sing.factor.push_back(std::pow(s, -ap));
      sing.weight.push_back(w[k] * kappa);
      std::array<double, 3> l{};
      lagrange3(s, h, l.data());
      sing.basis.push_back(l);
      sing_far.push_back(std::pow(span - s, ap));
    }
    gauss_on<8>(h, t, w);
    for (std::size_t k = 0; k < t.size(); ++k) {
      reg.factor.push_back(1.0);
      reg.weight.push_back(w[k]);
      std::array<double, 3> l{};
      lagrange3(t[k], h, l.data());
      reg.basis.push_back(l);
    }
    tl.assign(stride, std::vector<double>(t.size()));
    tr = tl;
    for (int o = 0; o < stride; ++o)
      for (std::size_t k = 0; k < t.size(); ++k) {
        tl[o][k] = std::pow(o * h + t[k], ap);
        tr[o][k] = std::pow(span - o * h - t[k], ap);
      }
  }
  const double root = 1.0 / p;
  auto proot = [&](double z) { return p == 2.0 ? std::sqrt(z) : std::pow(z, root); };
  // Distance powers to c_L and c_R at the cell points 0, h/2, h, indexed by offset.
  std::vector<std::array<double, 3>> pl(stride), pr(stride);
  for (int o = 0; o < stride; ++o)
    for (int q = 0; q < 3; ++q) {
      const double y = o * h + q * h / 2;
      pl[o][q] = y > 0 ? std::pow(y, ap) : 0.0;
      pr[o][q] = span - y > 0 ? std::pow(span - y, ap) : 0.0;
    }

  constexpr int kBlock = 128;
  RowMat A(kBlock, centers), K(kBlock, ny);
  double outer = 0.0;
  for (int x0 = 0; x0 < grid; x0 += kBlock) {
    const int nb = std::min(kBlock, grid - x0);
    for (int r = 0; r < nb; ++r) {
      const double x = (x0 + r + 0.5) * h;
      for (int m = 0; m < centers; ++m) A(r, m) = wsum[m] * std::pow(std::abs(x - c[m]), bp);
    }
    K.topRows(nb).noalias() = A.topRows(nb) * B;
    for (int r = 0; r < nb; ++r) {
      double inner = 0.0;
      for (int i = 0; i < grid; ++i) {
        const int o = i % stride, ml = i / stride;
        const double al = A(r, ml), ar = ml + 1 < centers ? A(r, ml + 1) : 0.0;
        const double kv[3] = {K(r, i), K(r, grid + 1 + i), K(r, i + 1)};
        double rv3[3];
        bool any = false;
        for (int q = 0; q < 3; ++q) {
          rv3[q] = kv[q] - al * pl[o][q] - ar * pr[o][q];
          any |= rv3[q] > 1e-13 * kv[q];
        }
        double l[3] = {0.0, 0.0, 0.0};
        if (any)
          for (int q = 0; q < 3; ++q) l[q] = std::log(std::max(rv3[q], 1e-13 * kv[q]));

        double cell = 0.0;
        if (o == 0 || (o == stride - 1 && ar > 0.0)) {
          // Singular cell; s runs away from the touching center.
          const bool left = o == 0;
          const double a = left ? al : ar, other = left ? ar : al;
          for (std::size_t k = 0; k < sing.weight.size(); ++k) {
            const auto& b = sing.basis[k];
            // Basis is in s; map back to the cell coordinate when s is measured from c_R.
            const double rv = !any ? 0.0
                              : left ? std::exp(l[0] * b[0] + l[1] * b[1] + l[2] * b[2])
                                     : std::exp(l[2] * b[0] + l[1] * b[1] + l[0] * b[2]);
            cell += sing.weight[k] * proot(a + (rv + other * sing_far[k]) * sing.factor[k]);
          }
        } else {
          for (std::size_t k = 0; k < reg.weight.size(); ++k) {
            const auto& b = reg.basis[k];
            const double rv = any ? std::exp(l[0] * b[0] + l[1] * b[1] + l[2] * b[2]) : 0.0;
            cell += reg.weight[k] * proot(al * tl[o][k] + ar * tr[o][k] + rv);
          }
        }
        inner += cell;
      }
      outer += std::pow(inner, p);
    }
  }
  row.lhs = outer / grid;
  return row;
}

P22Result p22_experiment(double p, double eps, int n_min, int n_max, int grid) {
  if (n_max - n_min + 1 < 2) throw PreconditionError("p22: need at least two values of N");
  P22Result res;
  std::vector<double> ns, ll, lr;
  for (int N = n_min; N <= n_max; ++N) {
    res.rows.push_back(p22_level(p, eps, N, grid));
    ns.push_back(N);
    ll.push_back(std::log2(res.rows.back().lhs));
    lr.push_back(std::log2(res.rows.back().rhs));
  }
  res.lhs_slope = fit_line(ns, ll).slope;
  res.rhs_slope = fit_line(ns, lr).slope;
  return res;
}

}  // namespace owlab
