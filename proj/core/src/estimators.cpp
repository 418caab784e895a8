#include "owlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "owlab/errors.hpp"

namespace owlab {

std::vector<Vec> probe_directions(int m, int random_count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  for (int i = 0; i < m; ++i) dirs.push_back(Vec::Unit(m, i));
  if (m > 1)
    for (auto& v : random_unit_vectors(m, random_count, seed)) dirs.push_back(std::move(v));
  return dirs;
}

namespace {

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// Maximizer of <e*, e> / |e|_u, used as the deterministic optimizer start.
Vec duality_start(const Vec& e_star, double u) {
  const auto m = e_star.size();
  Vec e(m);
  if (u == 1.0) {
    Eigen::Index k;
    e_star.cwiseAbs().maxCoeff(&k);
    e = Vec::Unit(m, k) * (e_star[k] < 0 ? -1.0 : 1.0);
    return e;
  }
  if (std::isinf(u)) {
    for (Eigen::Index i = 0; i < m; ++i) e[i] = e_star[i] >= 0 ? 1.0 : -1.0;
    return e;
  }
  const double ud = conjugate_exponent(u);
  for (Eigen::Index i = 0; i < m; ++i) e[i] = sgn(e_star[i]) * std::pow(std::abs(e_star[i]), ud - 1.0);
  return e;
}

// Closed-form dual of (sum A_i |e_i|^p)^{1/p}, with gradient.
double closed_dual(const Vec& a, double p, const Vec& e_star, Vec* grad) {
  const auto m = e_star.size();
  if (grad) grad->setZero(m);
  if (p <= 1.0) {
    double best = 0.0;
    Eigen::Index arg = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (e_star[i] == 0.0) continue;
      if (a[i] == 0.0) return kInf;
      const double v = std::abs(e_star[i]) * std::pow(a[i], -1.0 / p);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (grad && best > 0) (*grad)[arg] = sgn(e_star[arg]) * std::pow(a[arg], -1.0 / p);
    return best;
  }
  const double pd = conjugate_exponent(p);
  Vec c(m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (e_star[i] == 0.0) {
      c[i] = 0.0;
      continue;
    }
    if (a[i] == 0.0) return kInf;
    c[i] = std::isinf(a[i]) ? 0.0 : std::pow(a[i], -pd / p);
    s += c[i] * std::pow(std::abs(e_star[i]), pd);
  }
  const double val = std::pow(s, 1.0 / pd);
  if (grad && val > 0) {
    const double f = std::pow(val, 1.0 - pd);
    for (Eigen::Index i = 0; i < m; ++i)
      if (e_star[i] != 0.0) (*grad)[i] = f * c[i] * std::pow(std::abs(e_star[i]), pd - 1.0) * sgn(e_star[i]);
  }
  return val;
}

// Dual norm value and gradient in e*.  The optimizer branch uses the maximizer (Danskin).
double dual_value_grad(const CubeNorm& rho, const Vec& e_star, Vec* grad, const SphereSearchOptions& opts,
                       bool* converged) {
  if (rho.is_identity()) {
    return lp_norm_grad(e_star, conjugate_exponent(rho.target_exponent()), grad);
  }
  if (rho.closed_form()) return closed_dual(rho.coefficients(), rho.p(), e_star, grad);
  const DualResult r = dual_norm(rho, e_star, opts, true);
  if (converged && !r.converged) *converged = false;
  if (grad) {
    grad->setZero(e_star.size());
    if (r.argmax.size() == e_star.size() && std::isfinite(r.value)) {
      const double re = rho(r.argmax);
      if (re > 0) *grad = sgn(e_star.dot(r.argmax)) * r.argmax / re;
    }
  }
  return r.value;
}

bool weight_covers(const WeightModel& v, const Box& q) {
  if (v.kind() == WeightModel::Kind::PiecewiseConstant) {
    const Box& b = v.cell_box();
    for (int i = 0; i < q.dim(); ++i)
      if (q.lo[i] < b.lo[i] || q.hi[i] > b.hi[i]) return false;
    return true;
  }
  if (v.kind() == WeightModel::Kind::BlockBMO) return weight_covers(v.inner(), q);
  return true;
}

}  // namespace

DualResult dual_norm(const CubeNorm& rho, const Vec& e_star, const SphereSearchOptions& opts, bool force_optimizer) {
  if (e_star.size() != rho.m()) throw PreconditionError("dual vector dimension does not match the target space");
  DualResult res;
  if (e_star.cwiseAbs().maxCoeff() == 0.0) {
    res.closed_form = true;
    return res;
  }
  if (!force_optimizer && rho.is_identity()) {
    res.value = lp_norm(e_star, conjugate_exponent(rho.target_exponent()));
    res.closed_form = true;
    return res;
  }
  if (!force_optimizer && rho.closed_form()) {
    res.value = closed_dual(rho.coefficients(), rho.p(), e_star, nullptr);
    res.closed_form = true;
    return res;
  }
  const SphereObjective f = [&](const Vec& e, Vec* g) {
    Vec gr;
    const double r = rho.eval(e, g ? &gr : nullptr);
    const double ip = e_star.dot(e);
    if (g) g->setZero(e.size());
    if (std::isinf(r)) return 0.0;
    if (r == 0.0) return ip == 0.0 ? 0.0 : kInf;
    const double val = std::abs(ip) / r;
    if (g) *g = (sgn(ip) * e_star * r - std::abs(ip) * gr) / (r * r);
    return val;
  };
  const auto best = maximize_on_sphere(f, rho.m(), {duality_start(e_star, rho.target_exponent())}, opts);
  res.value = best.value;
  res.converged = best.converged;
  res.argmax = best.argmax;
  return res;
}

DualResult rho_dual(const WeightModel& v, const DyadicCube& q, double p, const Vec& e_star, const Quadrature& quad,
                    const SphereSearchOptions& opts) {
  const CubeNorm rho(v, Box::of(q), p, quad);
  DualResult r = dual_norm(rho, e_star, opts);
  if (!r.converged) throw NumericalError("rho_dual: optimizer did not converge (best value " + std::to_string(r.value) + ")");
  return r;
}

double ap_box_constant(const WeightModel& v, const Box& q, double p, const Quadrature& quad,
                       const SphereSearchOptions& opts, bool* converged) {
  if (!(p > 0) || std::isinf(p)) throw PreconditionError("A_p estimate needs p in (0, inf)");
  if (v.kind() == WeightModel::Kind::Identity) return 1.0;
  const int m = v.m();
  const CubeNorm rho(v, q, p, quad);
  std::vector<Vec> starts;
  for (int i = 0; i < m; ++i) starts.push_back(Vec::Unit(m, i));

  if (p <= 1.0) {
    const SphereObjective f = [&](const Vec& e, Vec* g) {
      Vec g1, g2;
      const double a = rho.eval(e, g ? &g1 : nullptr);
      const double b = rho.essinf(e, g ? &g2 : nullptr);
      if (g) g->setZero(e.size());
      if (b == 0.0) return kInf;
      if (g) *g = (g1 * b - a * g2) / (b * b);
      return a / b;
    };
    const auto r = maximize_on_sphere(f, m, starts, opts);
    if (converged && !r.converged) *converged = false;
    return r.value;
  }

  const double pd = conjugate_exponent(p);
  const CubeNorm rho_d(v.inverse_adjoint(), q, pd, quad);
  if (rho.closed_form() && rho_d.closed_form()) {
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = rho.coefficients()[i], b = rho_d.coefficients()[i];
      best = std::max(best, std::pow(a, 1.0 / p) * std::pow(b, 1.0 / pd));
    }
    return best;
  }
  SphereSearchOptions inner = opts;
  inner.seed = opts.seed + 1;
  bool ok = true;
  const SphereObjective f = [&](const Vec& es, Vec* g) {
    Vec g1, g2;
    const double num = rho_d.eval(es, g ? &g1 : nullptr);
    const double den = dual_value_grad(rho, es, g ? &g2 : nullptr, inner, &ok);
    if (g) g->setZero(es.size());
    if (den == 0.0) return kInf;
    if (g) *g = (g1 * den - num * g2) / (den * den);
    return num / den;
  };
  const auto r = maximize_on_sphere(f, m, starts, opts);
  if (converged && (!r.converged || !ok)) *converged = false;
  return r.value;
}

ApEstimate ap_constant_estimate(const WeightModel& v, double p, const GridWindow& window, const Quadrature& quad,
                                const SphereSearchOptions& opts, int ancestor_depth) {
  if (window.dim() != v.dim()) throw PreconditionError("window dimension does not match weight dimension");
  std::vector<DyadicCube> cubes = window.cubes();
  std::set<DyadicCube> extra;
  for (const auto& c : cubes)
    for (int d = 1; d <= ancestor_depth; ++d) extra.insert(c.ancestor(window.j_min() - d));
  cubes.insert(cubes.end(), extra.begin(), extra.end());

  ApEstimate est;
  est.value = -1.0;
  for (const auto& c : cubes) {
    const Box b = Box::of(c);
    if (!weight_covers(v, b)) continue;
    bool ok = true;
    const double val = ap_box_constant(v, b, p, quad, opts, &ok);
    ++est.cubes_examined;
    if (!ok) est.converged = false;
    if (val > est.value) {
      est.value = val;
      est.worst = c;
    }
  }
  return est;
}

RHIEstimate rhi_index_estimate(const WeightModel& v, double p, const GridWindow& window,
                               const std::vector<double>& eps_grid, double growth_threshold, const Quadrature& quad,
                               std::uint64_t seed, int random_directions) {
  if (eps_grid.empty()) throw PreconditionError("empty epsilon grid");
  RHIEstimate est;
  est.grid = eps_grid;
  std::sort(est.grid.begin(), est.grid.end());
  est.cubes = window.cubes();
  const auto dirs = probe_directions(v.m(), random_directions, seed);

  auto scan = [&](const WeightModel& w, double base, std::vector<std::vector<double>>& ratios) {
    ratios.assign(est.cubes.size(), std::vector<double>(est.grid.size(), 0.0));
    for (std::size_t c = 0; c < est.cubes.size(); ++c) {
      const Box b = Box::of(est.cubes[c]);
      const CubeNorm r0(w, b, base, quad);
      std::vector<double> denom;
      for (const auto& e : dirs) denom.push_back(r0(e));
      for (std::size_t g = 0; g < est.grid.size(); ++g) {
        const CubeNorm r1(w, b, base + est.grid[g], quad);
        double worst = 0.0;
        for (std::size_t k = 0; k < dirs.size(); ++k) worst = std::max(worst, r1(dirs[k]) / denom[k]);
        ratios[c][g] = worst;
      }
    }
    // Largest grid value whose whole prefix stays under the threshold.
    double found = 0.0;
    bool any = false;
    for (std::size_t g = 0; g < est.grid.size(); ++g) {
      bool ok = true;
      for (const auto& row : ratios) ok = ok && row[g] <= growth_threshold;
      if (!ok) break;
      found = est.grid[g];
      any = true;
    }
    return std::pair<double, bool>{found, !any};
  };

  auto [eps, deg] = scan(v, p, est.eps_ratios);
  est.eps = eps;
  est.eps_degenerate = deg;
  if (p <= 1.0) {
    est.eta = est.grid.back();
    est.eta_trivial = true;
  } else {
    auto [eta, deg2] = scan(v.inverse_adjoint(), conjugate_exponent(p), est.eta_ratios);
    est.eta = eta;
    est.eta_degenerate = deg2;
  }
  return est;
}

DoublingEstimate doubling_dimension_estimate(const WeightModel& v, double p, const GridWindow& window,
                                             const Quadrature& quad, std::uint64_t seed, int random_directions) {
  const int depth = window.j_max() - window.j_min();
  if (depth < 2) throw PreconditionError("doubling estimate needs at least 3 nested levels");
  const auto cubes = window.cubes();
  std::vector<CubeNorm> norms;
  norms.reserve(cubes.size());
  for (const auto& c : cubes) norms.emplace_back(v, Box::of(c), p, quad);
  const auto dirs = probe_directions(v.m(), random_directions, seed);

  DoublingEstimate best;
  best.raw_slope = -kInf;
  for (const auto& e : dirs) {
    std::vector<double> mass(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) mass[i] = std::log2(cubes[i].volume()) + p * std::log2(norms[i](e));
    std::vector<double> env(depth + 1, -kInf);
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      for (int d = 1; d <= cubes[i].level - window.j_min(); ++d) {
        const auto s = window.index_of(cubes[i].ancestor(cubes[i].level - d));
        if (s == window.size()) continue;
        env[d] = std::max(env[d], mass[s] - mass[i]);
      }
    }
    std::vector<double> xs, ys;
    for (int d = 1; d <= depth; ++d)
      if (std::isfinite(env[d])) {
        xs.push_back(d);
        ys.push_back(env[d]);
      }
    if (xs.size() < 2) continue;
    const double k = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / k;
      my += ys[i] / k;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    double res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (my + slope * (xs[i] - mx));
      res += r * r / k;
    }
    if (slope > best.raw_slope) {
      best.raw_slope = slope;
      best.residual = std::sqrt(res);
      best.envelope.assign(ys.begin(), ys.end());
    }
  }
  best.beta = std::max(best.raw_slope, static_cast<double>(v.dim()));
  return best;
}

RatioResult norm_ratio(const WeightModel& v, double p, const Box& q, const Box& r, const Quadrature& quad,
                       const SphereSearchOptions& opts) {
  if (v.kind() == WeightModel::Kind::Identity) return {1.0, true};
  const CubeNorm nq(v, q, p, quad), nr(v, r, p, quad);
  if (nq.closed_form() && nr.closed_form()) {
    double best = 0.0;
    for (int i = 0; i < v.m(); ++i) {
      const double a = nq.coefficients()[i], b = nr.coefficients()[i];
      if (std::isinf(a)) return {kInf, true};
      if (std::isinf(b)) continue;
      best = std::max(best, std::pow(a / b, 1.0 / p));
    }
    return {best, true};
  }
  const SphereObjective f = [&](const Vec& e, Vec* g) {
    Vec g1, g2;
    const double a = nq.eval(e, g ? &g1 : nullptr);
    const double b = nr.eval(e, g ? &g2 : nullptr);
    if (g) g->setZero(e.size());
    if (b == 0.0) return kInf;
    if (g) *g = (g1 * b - a * g2) / (b * b);
    return a / b;
  };
  std::vector<Vec> starts;
  for (int i = 0; i < v.m(); ++i) starts.push_back(Vec::Unit(v.m(), i));
  const auto res = maximize_on_sphere(f, v.m(), starts, opts);
  return {res.value, res.converged};
}

RatioResult norm_ratio(const WeightModel& v, double p, const DyadicCube& q, const DyadicCube& r,
                       const Quadrature& quad, const SphereSearchOptions& opts) {
  return norm_ratio(v, p, Box::of(q), Box::of(r), quad, opts);
}

double fit_babc_constant(const WeightModel& v, double p, const GridWindow& window, const BabcParams& params,
                         const Quadrature& quad) {
  const auto cubes = window.cubes();
  double c = 0.0;
  for (const auto& q : cubes)
    for (const auto& r : cubes) c = std::max(c, norm_ratio(v, p, q, r, quad).value / babc_kernel(params, q, r));
  return c;
}

}  // namespace owlab
