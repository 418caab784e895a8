#include "owlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "owlab/errors.hpp"
#include "owlab/estimators.hpp"

namespace owlab {

AveragingNorm averaging_norm_rhs(const WeightModel& v, double p, const Box& q, const Quadrature& quad,
                                 const SphereSearchOptions& opts) {
  if (!(p > 1) || std::isinf(p)) throw PreconditionError("averaging norm needs p in (1, inf)");
  if (q.dim() != v.dim()) throw PreconditionError("box dimension does not match the weight");
  AveragingNorm out;
  out.value = ap_box_constant(v, q, p, quad, opts, &out.converged);
  return out;
}

namespace {

// Edges of a partition of [lo, hi]: uniform cells plus geometric shells toward each center.
std::vector<double> graded_edges(double lo, double hi, int cells, const std::vector<double>& centers) {
  const double h = (hi - lo) / cells;
  std::vector<double> edges;
  for (int i = 0; i <= cells; ++i) edges.push_back(lo + i * h);
  constexpr int kShells = 40, kPerShell = 16;
  for (double c : centers) {
    if (c < lo || c > hi) continue;
    edges.push_back(c);
    // Grade both neighbouring cells toward c.
    for (int side : {-1, 1}) {
      const double far = side > 0 ? std::min(hi, c + h) : std::max(lo, c - h);
      const double len = std::abs(far - c);
      if (len <= 0) continue;
      for (int k = 0; k < kShells; ++k) {
        const double outer = len * std::ldexp(1.0, -k), inner = outer / 2;
        for (int s = 0; s < kPerShell; ++s) edges.push_back(c + side * (inner + (outer - inner) * s / kPerShell));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return b - a <= 1e-300; }), edges.end());
  return edges;
}

}  // namespace

AveragingOracle averaging_norm_oracle(const WeightModel& v, double p, const Box& q, int partition_cells,
                                      std::uint64_t seed) {
  if (v.m() != 1 || v.dim() != 1) throw PreconditionError("averaging oracle needs a scalar weight on the line");
  if (!(p > 1) || std::isinf(p)) throw PreconditionError("averaging oracle needs p in (1, inf)");
  if (partition_cells < 16) throw PreconditionError("averaging oracle needs at least 16 cells");
  const double lo = q.lo[0], hi = q.hi[0], len = hi - lo;

  std::vector<double> centers;
  for (const auto& c : v.centers()) centers.push_back(c[0]);
  const auto edges = graded_edges(lo, hi, partition_cells, centers);
  const std::size_t n = edges.size() - 1;

  AveragingOracle out;
  out.cells = n;
  // w_c = |c|, m_c = int_c v^p
  std::vector<double> w(n), mass(n);
  double total = 0.0;
  const Quadrature quad{64};
  for (std::size_t c = 0; c < n; ++c) {
    w[c] = edges[c + 1] - edges[c];
    mass[c] = w[c] * v.coordinate_power_mean(Box::interval(edges[c], edges[c + 1]), 0, p, quad);
    total += mass[c];
  }
  if (std::isinf(total)) {
    out.value = kInf;
    return out;
  }
  for (double m : mass)
    if (m == 0.0) {
      out.value = kInf;
      return out;
    }

  const double scale = std::pow(total, 1.0 / p) / len;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  constexpr int kStarts = 4, kMaxSweeps = 20000;
  double best = 0.0;
  for (int start = 0; start < kStarts; ++start) {
    std::vector<double> f(n);
    for (auto& x : f) x = start == 0 ? 1.0 : uni(rng);
    double s = 0.0, t = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      s += f[c] * w[c];
      t += std::pow(f[c], p) * mass[c];
    }
    double ratio = s / std::pow(t, 1.0 / p);
    bool done = false;
    int sweep = 0;
    for (; sweep < kMaxSweeps && !done; ++sweep) {
      for (std::size_t c = 0; c < n; ++c) {
        const double s0 = s - f[c] * w[c], t0 = t - std::pow(f[c], p) * mass[c];
        if (!(s0 > 0) || !(t0 > 0)) continue;
        // Exact maximizer of (s0 + w x) / (t0 + m x^p)^{1/p} over x >= 0.
        f[c] = std::pow(w[c] * t0 / (s0 * mass[c]), 1.0 / (p - 1.0));
        s = s0 + f[c] * w[c];
        t = t0 + std::pow(f[c], p) * mass[c];
      }
      // Recompute the running sums to keep rounding from accumulating.
      s = t = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        s += f[c] * w[c];
        t += std::pow(f[c], p) * mass[c];
      }
      const double r = s / std::pow(t, 1.0 / p);
      done = r - ratio <= 1e-13 * r;
      ratio = std::max(ratio, r);
    }
    out.sweeps = std::max(out.sweeps, sweep);
    if (!done) out.converged = false;
    best = std::max(best, ratio);
  }
  out.value = scale * best;
  return out;
}

SampledFunction::SampledFunction(Box b, std::vector<int> cells_per_axis, int m_)
    : box(std::move(b)), cells(std::move(cells_per_axis)), m(m_) {
  if (static_cast<int>(cells.size()) != box.dim()) throw PreconditionError("grid shape does not match the box");
  for (int c : cells)
    if (c < 1) throw PreconditionError("grid needs at least one cell per axis");
  if (m < 1) throw PreconditionError("function dimension must be positive");
  values.assign(cell_count() * static_cast<std::size_t>(m), 0.0);
}

std::size_t SampledFunction::cell_count() const {
  std::size_t n = 1;
  for (int c : cells) n *= static_cast<std::size_t>(c);
  return n;
}

Box SampledFunction::cell_box(std::size_t index) const {
  Box b{std::vector<double>(cells.size()), std::vector<double>(cells.size())};
  for (int i = static_cast<int>(cells.size()) - 1; i >= 0; --i) {
    const auto k = index % cells[i];
    index /= cells[i];
    const double h = (box.hi[i] - box.lo[i]) / cells[i];
    b.lo[i] = box.lo[i] + h * static_cast<double>(k);
    b.hi[i] = b.lo[i] + h;
  }
  return b;
}

Vec SampledFunction::value(std::size_t index) const { return Eigen::Map<const Vec>(values.data() + index * m, m); }

void SampledFunction::set(std::size_t index, const Vec& v) {
  if (v.size() != m) throw PreconditionError("function value has the wrong dimension");
  if (!v.allFinite()) throw PreconditionError("function values must be finite");
  Eigen::Map<Vec>(values.data() + index * m, m) = v;
}

std::vector<std::size_t> SampledFunction::cells_in(const DyadicCube& q) const {
  const int n = box.dim();
  if (q.dim() != n) throw PreconditionError("cube dimension does not match the grid");
  std::vector<std::int64_t> first(n), count(n);
  for (int i = 0; i < n; ++i) {
    const double h = (box.hi[i] - box.lo[i]) / cells[i];
    const double a = (q.anchor()[i] - box.lo[i]) / h, s = q.side() / h;
    const double ar = std::round(a), sr = std::round(s);
    if (std::abs(a - ar) > 1e-9 || std::abs(s - sr) > 1e-9 || sr < 1)
      throw PreconditionError("grid does not refine cube " + q.to_string());
    if (ar < 0 || ar + sr > cells[i]) throw PreconditionError("cube " + q.to_string() + " leaves the grid box");
    first[i] = static_cast<std::int64_t>(ar);
    count[i] = static_cast<std::int64_t>(sr);
  }
  std::vector<std::size_t> out;
  std::vector<std::int64_t> idx(n, 0);
  while (true) {
    std::size_t flat = 0;
    for (int i = 0; i < n; ++i) flat = flat * cells[i] + static_cast<std::size_t>(first[i] + idx[i]);
    out.push_back(flat);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++idx[i] < count[i]) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

double weighted_lp_norm(const WeightModel& v, double p, const SampledFunction& f, const Quadrature& quad) {
  if (v.dim() != f.box.dim() || v.m() != f.m) throw PreconditionError("weight does not match the function");
  double total = 0.0;
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    const Vec val = f.value(c);
    if (val.isZero(0.0)) continue;
    total += v.integrate_norm_pow(f.cell_box(c), p, val, quad);
  }
  return std::pow(total, 1.0 / p);
}

namespace {

bool boxes_overlap(const Box& a, const Box& b) {
  for (int i = 0; i < a.dim(); ++i) {
    const double tol = 1e-12 * std::max(a.hi[i] - a.lo[i], b.hi[i] - b.lo[i]);
    if (!(a.lo[i] < b.hi[i] - tol && b.lo[i] < a.hi[i] - tol)) return false;
  }
  return true;
}

Box middle_third(const DyadicCube& q) {
  Box e = Box::of(q);
  const int last = q.dim() - 1;
  const double l = q.side(), a = e.lo[last];
  e.lo[last] = a + l / 3.0;
  e.hi[last] = a + 2.0 * l / 3.0;
  return e;
}

}  // namespace

void SparseFamily::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const Box qb = Box::of(e.cube);
    for (int d = 0; d < qb.dim(); ++d)
      if (e.witness.lo[d] < qb.lo[d] - 1e-12 || e.witness.hi[d] > qb.hi[d] + 1e-12)
        throw PreconditionError("witness set of " + e.cube.to_string() + " leaves its cube");
    if (e.witness.volume() < eta * qb.volume() * (1 - 1e-12))
      throw PreconditionError("witness set of " + e.cube.to_string() + " is too small");
    if (e.a.size() != e.b.size()) throw PreconditionError("coefficient samples of " + e.cube.to_string() + " differ in size");
    for (double x : e.a)
      if (!(std::abs(x) <= 1.0)) throw PreconditionError("coefficient a exceeds 1 on " + e.cube.to_string());
    for (double x : e.b)
      if (!(std::abs(x) <= 1.0)) throw PreconditionError("coefficient b exceeds 1 on " + e.cube.to_string());
    for (std::size_t j = 0; j < i; ++j)
      if (boxes_overlap(e.witness, entries[j].witness))
        throw PreconditionError("witness sets of " + e.cube.to_string() + " and " + entries[j].cube.to_string() +
                                " overlap");
  }
}

SparseFamily make_sparse_family(const DyadicCube& top, const SampledFunction& shape, const SparseOptions& opts) {
  if (opts.depth < 0) throw PreconditionError("sparse family depth must be nonnegative");
  SparseFamily fam;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> coef(opts.nonnegative ? 0.0 : -1.0, 1.0);
  std::vector<DyadicCube> level{top};
  for (int d = 0; d <= opts.depth; ++d) {
    std::vector<DyadicCube> next;
    for (const auto& q : level) {
      const Box e = middle_third(q);
      const bool free = std::none_of(fam.entries.begin(), fam.entries.end(),
                                     [&](const SparseEntry& s) { return boxes_overlap(s.witness, e); });
      if (free) {
        SparseEntry s{q, {}, {}, e};
        const auto cells = shape.cells_in(q);
        for (std::size_t k = 0; k < cells.size(); ++k) {
          s.a.push_back(coef(rng));
          s.b.push_back(coef(rng));
        }
        fam.entries.push_back(std::move(s));
      }
      for (auto& c : q.children()) next.push_back(std::move(c));
    }
    level = std::move(next);
  }
  fam.validate();
  return fam;
}

SampledFunction sparse_apply(const SparseFamily& s, const SampledFunction& f) {
  SampledFunction out(f.box, f.cells, f.m);
  for (const auto& e : s.entries) {
    const auto cells = f.cells_in(e.cube);
    if (cells.size() != e.a.size()) throw PreconditionError("coefficients of " + e.cube.to_string() + " do not match the grid");
    Vec avg = Vec::Zero(f.m);
    for (std::size_t k = 0; k < cells.size(); ++k) avg += e.b[k] * f.value(cells[k]);
    avg /= static_cast<double>(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      Eigen::Map<Vec> dst(out.values.data() + cells[k] * f.m, f.m);
      dst += e.a[k] * avg;
    }
  }
  return out;
}

}  // namespace owlab
