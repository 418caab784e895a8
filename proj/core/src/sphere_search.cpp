#include "owlab/sphere_search.hpp"

#include <cmath>
#include <random>

#include "owlab/errors.hpp"

namespace owlab {

std::vector<Vec> random_unit_vectors(int m, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vec v(m);
    for (int i = 0; i < m; ++i) v[i] = g(rng);
    const double n = v.norm();
    if (n > 1e-12) out.push_back(v / n);
  }
  return out;
}

namespace {

struct Walk {
  double value;
  Vec point;
  bool converged;
};

Walk ascend(const SphereObjective& f, Vec e, const SphereSearchOptions& opts) {
  e.normalize();
  Vec g(e.size()), g_new(e.size());
  double fe = f(e, &g);
  if (!std::isfinite(fe)) return {fe, e, true};
  double theta = 0.25;
  for (int step = 0; step < opts.max_steps; ++step) {
    Vec gt = g - g.dot(e) * e;
    const double gn = gt.norm();
    if (!(gn > 1e-14 * std::max(1.0, std::abs(fe)))) return {fe, e, true};
    gt /= gn;
    while (true) {
      Vec cand = std::cos(theta) * e + std::sin(theta) * gt;
      cand.normalize();
      const double fc = f(cand, &g_new);
      if (!std::isfinite(fc) && fc > 0) return {fc, cand, true};
      if (fc > fe) {
        const double rel = (fc - fe) / std::max(std::abs(fe), 1e-300);
        e = cand;
        fe = fc;
        g = g_new;
        if (rel < opts.rel_tol) return {fe, e, true};
        theta = std::min(2.0 * theta, 1.0);
        break;
      }
      theta *= 0.5;
      if (theta < 1e-12) return {fe, e, true};
    }
  }
  return {fe, e, false};
}

}  // namespace

SphereSearchResult maximize_on_sphere(const SphereObjective& f, int m, const std::vector<Vec>& starts,
                                      const SphereSearchOptions& opts) {
  if (m < 1) throw PreconditionError("sphere search needs m >= 1");
  SphereSearchResult best;
  best.value = -kInf;
  if (m == 1) {
    for (double s : {1.0, -1.0}) {
      Vec e = Vec::Constant(1, s);
      const double v = f(e, nullptr);
      if (v > best.value) best = {v, e, true};
    }
    return best;
  }
  std::vector<Vec> all;
  for (const auto& s : starts)
    if (s.size() == m && s.norm() > 0) all.push_back(s);
  for (auto& r : random_unit_vectors(m, opts.random_starts, opts.seed)) all.push_back(std::move(r));
  for (const auto& s : all) {
    const Walk w = ascend(f, s, opts);
    if (w.value > best.value || best.argmax.size() == 0) best = {w.value, w.point, w.converged};
  }
  return best;
}

}  // namespace owlab
