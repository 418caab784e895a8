#include "owlab/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

#include "owlab/errors.hpp"

namespace owlab {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// log(sum exp(x_i)) ignoring -inf entries; -inf for an empty sum.
double log_sum_exp(const std::vector<double>& xs) {
  double mx = -kInf;
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs)
    if (x > -kInf) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Combine log terms with an l^q sum (or max for q = inf), returning the log of the result.
double log_lq(const std::vector<double>& logs, double q) {
  if (std::isinf(q)) {
    double mx = -kInf;
    for (double x : logs) mx = std::max(mx, x);
    return mx;
  }
  std::vector<double> scaled(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) scaled[i] = q * logs[i];
  return log_sum_exp(scaled) / q;
}

double safe_log(double x) { return x > 0 ? std::log(x) : -kInf; }

double finish(double log_value, const char* what) {
  const double v = std::exp(log_value);
  if (std::isnan(v) || std::isinf(v)) throw NumericalError(std::string(what) + ": overflow or non-finite norm");
  return v;
}

// Level-j_max cells covering every window cube.
std::vector<DyadicCube> finest_cells(const GridWindow& w) {
  std::vector<DyadicCube> cells;
  const int depth = w.j_max() - w.j_min();
  const int n = w.dim();
  for (const auto& top : w.level_cubes(w.j_min())) {
    const std::int64_t per = std::int64_t{1} << depth;
    std::vector<std::int64_t> idx(n, 0);
    while (true) {
      DyadicCube c(w.j_max(), top.offset);
      for (int i = 0; i < n; ++i) c.offset[i] = top.offset[i] * per + idx[i];
      cells.push_back(std::move(c));
      int i = n - 1;
      for (; i >= 0; --i) {
        if (++idx[i] < per) break;
        idx[i] = 0;
      }
      if (i < 0) break;
    }
  }
  return cells;
}

std::vector<DyadicCube> descendants(const DyadicCube& q, int level) {
  const int n = q.dim();
  const std::int64_t per = std::int64_t{1} << (level - q.level);
  std::vector<DyadicCube> out;
  std::vector<std::int64_t> idx(n, 0);
  while (true) {
    DyadicCube c(level, q.offset);
    for (int i = 0; i < n; ++i) c.offset[i] = q.offset[i] * per + idx[i];
    out.push_back(std::move(c));
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++idx[i] < per) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

// log of 2^{js} |Q|^{-1/2}, the layer scaling of cube Q.
double log_layer_scale(const DyadicCube& q, double s) {
  return q.level * s * kLn2 + 0.5 * q.level * q.dim() * kLn2;
}

}  // namespace

double SpaceParams::J(int n) const {
  double mn = std::min(1.0, p);
  if (kind == SpaceKind::TL) mn = std::min(mn, q);
  return n / mn;
}

double SpaceParams::J_u(int n, double u) const {
  double mn = std::min(p, u);
  if (kind == SpaceKind::TL) mn = std::min(mn, q);
  return n / mn;
}

struct NormFamily::State {
  NormMeta meta;
  Fn fn;
  std::shared_ptr<const WeightModel> weight;
  double r = 0.0;
  Quadrature quad;
  std::mutex mu;
  std::map<DyadicCube, std::shared_ptr<const CubeNorm>> cache;
};

NormFamily NormFamily::from_weight(const WeightModel& v, double r, const Quadrature& quad, NormMeta meta) {
  NormFamily f;
  f.state_ = std::make_shared<State>();
  f.state_->meta = meta;
  f.state_->weight = std::make_shared<const WeightModel>(v);
  f.state_->r = r;
  f.state_->quad = quad;
  return f;
}

NormFamily NormFamily::absolute(double u, NormMeta meta) {
  return table([u](const DyadicCube&, const Vec& e) { return lp_norm(e, u); }, meta);
}

NormFamily NormFamily::table(Fn fn, NormMeta meta) {
  NormFamily f;
  f.state_ = std::make_shared<State>();
  f.state_->meta = meta;
  f.state_->fn = std::move(fn);
  return f;
}

double NormFamily::operator()(const DyadicCube& q, const Vec& e) const {
  if (state_->fn) return state_->fn(q, e);
  std::shared_ptr<const CubeNorm> norm;
  {
    std::lock_guard<std::mutex> lock(state_->mu);
    auto it = state_->cache.find(q);
    if (it == state_->cache.end())
      it = state_->cache
               .emplace(q, std::make_shared<const CubeNorm>(*state_->weight, Box::of(q), state_->r, state_->quad))
               .first;
    norm = it->second;
  }
  return (*norm)(e);
}

const NormMeta& NormFamily::meta() const { return state_->meta; }

NormFamily NormFamily::with_meta(NormMeta meta) const {
  NormFamily f;
  f.state_ = std::make_shared<State>();
  f.state_->meta = meta;
  f.state_->fn = state_->fn;
  f.state_->weight = state_->weight;
  f.state_->r = state_->r;
  f.state_->quad = state_->quad;
  return f;
}

const WeightModel* NormFamily::weight() const { return state_->weight.get(); }

double NormFamily::exponent() const { return state_->r; }

DyadicSequence::DyadicSequence(GridWindow window, int m)
    : window_(std::move(window)), m_(m), data_(window_.size() * static_cast<std::size_t>(m), 0.0) {
  if (m < 1) throw PreconditionError("sequence target dimension must be positive");
}

Vec DyadicSequence::at(std::size_t index) const {
  return Eigen::Map<const Vec>(data_.data() + index * m_, m_);
}

Vec DyadicSequence::get(const DyadicCube& q) const {
  const auto i = window_.index_of(q);
  if (i == window_.size()) return Vec::Zero(m_);
  return at(i);
}

void DyadicSequence::set(std::size_t index, const Vec& v) {
  if (v.size() != m_) throw PreconditionError("sequence value has the wrong dimension");
  if (!v.allFinite()) throw PreconditionError("sequence values must be finite");
  Eigen::Map<Vec>(data_.data() + index * m_, m_) = v;
}

void DyadicSequence::set(const DyadicCube& q, const Vec& v) {
  const auto i = window_.index_of(q);
  if (i == window_.size()) throw PreconditionError("cube " + q.to_string() + " is outside the sequence window");
  set(i, v);
}

bool DyadicSequence::nonzero(std::size_t index) const {
  for (int k = 0; k < m_; ++k)
    if (data_[index * m_ + k] != 0.0) return true;
  return false;
}

std::vector<std::size_t> DyadicSequence::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (nonzero(i)) out.push_back(i);
  return out;
}

double DyadicSequence::max_abs() const {
  double mx = 0.0;
  for (double x : data_) mx = std::max(mx, std::abs(x));
  return mx;
}

DyadicSequence& DyadicSequence::operator+=(const DyadicSequence& o) {
  if (!(o.window_ == window_) || o.m_ != m_) throw PreconditionError("sequence window mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

DyadicSequence& DyadicSequence::operator*=(double a) {
  for (double& x : data_) x *= a;
  return *this;
}

DyadicSequence random_sequence(const GridWindow& window, int m, std::uint64_t seed, double density) {
  DyadicSequence t(window, m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), keep(0.0, 1.0);
  for (std::size_t i = 0; i < window.size(); ++i) {
    Vec v(m);
    for (int k = 0; k < m; ++k) v[k] = coef(rng);
    if (keep(rng) < density) t.set(i, v);
  }
  return t;
}

Vec layer_eval(const DyadicSequence& t, int j, const double* x) {
  const auto& w = t.window();
  for (int i = 0; i < w.dim(); ++i)
    if (x[i] < w.box().lo[i] || x[i] >= w.box().hi[i]) throw PreconditionError("layer_eval: point outside the window box");
  DyadicCube q(j, std::vector<std::int64_t>(w.dim()));
  for (int i = 0; i < w.dim(); ++i) q.offset[i] = static_cast<std::int64_t>(std::floor(std::ldexp(x[i], j)));
  return t.get(q) / std::sqrt(q.volume());
}

namespace {

double besov_norm(const DyadicSequence& t, const SpaceParams& prm, const std::function<double(std::size_t)>& log_rho_p) {
  // log_rho_p(i) = log of rho_Q(t_Q)^p for cube index i.
  const auto& w = t.window();
  std::vector<double> levels;
  for (int j = w.j_min(); j <= w.j_max(); ++j) {
    std::vector<double> terms;
    for (std::size_t i = w.level_begin(j); i < w.level_begin(j) + w.level_size(j); ++i) {
      if (!t.nonzero(i)) continue;
      const double lv = -j * w.dim() * kLn2;  // log |Q|
      terms.push_back((1.0 - prm.p / 2.0) * lv + log_rho_p(i));
    }
    if (terms.empty()) continue;
    levels.push_back(j * prm.s * kLn2 + log_sum_exp(terms) / prm.p);
  }
  if (levels.empty()) return 0.0;
  return finish(log_lq(levels, prm.q), "seq_norm");
}

}  // namespace

double seq_norm(const DyadicSequence& t, const SpaceParams& prm, const NormSource& source) {
  if (!(prm.p > 0) || std::isinf(prm.p) || !(prm.q > 0)) throw PreconditionError("seq_norm needs p in (0,inf), q in (0,inf]");
  const auto& w = t.window();
  const int n = w.dim();
  const auto* fam = std::get_if<NormFamily>(&source);
  const auto* pw = std::get_if<PointwiseWeight>(&source);
  if (pw && (pw->v.dim() != n || pw->v.m() != t.m())) throw PreconditionError("pointwise weight does not match the sequence");

  if (prm.kind == SpaceKind::Besov) {
    if (fam) {
      return besov_norm(t, prm, [&](std::size_t i) { return prm.p * safe_log((*fam)(w.cube(i), t.at(i))); });
    }
    return besov_norm(t, prm, [&](std::size_t i) {
      const DyadicCube q = w.cube(i);
      const Vec v = t.at(i);
      double integral = 0.0;
      for (const auto& c : descendants(q, w.j_max())) integral += pw->v.integrate_norm_pow(Box::of(c), prm.p, v, pw->quad);
      return safe_log(integral / q.volume());
    });
  }

  // Triebel-Lizorkin: every layer is constant on the finest cells.
  const auto cells = finest_cells(w);
  std::vector<double> cell_logs;
  cell_logs.reserve(cells.size());
  if (fam) {
    std::vector<double> lg(w.size(), -kInf);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!t.nonzero(i)) continue;
      const DyadicCube q = w.cube(i);
      lg[i] = log_layer_scale(q, prm.s) + safe_log((*fam)(q, t.at(i)));
    }
    std::vector<double> stack;
    for (const auto& c : cells) {
      stack.clear();
      for (int j = w.j_min(); j <= w.j_max(); ++j) {
        const auto i = w.index_of(c.ancestor(j));
        if (i != w.size() && lg[i] > -kInf) stack.push_back(lg[i]);
      }
      if (stack.empty()) continue;
      cell_logs.push_back(prm.p * log_lq(stack, prm.q) - w.j_max() * n * kLn2);
    }
  } else {
    std::vector<double> stack, nodes;
    for (const auto& c : cells) {
      const NodeRule rule = pw->v.rule_on(Box::of(c), pw->quad);
      std::vector<std::size_t> anc;
      std::vector<double> scale;
      for (int j = w.j_min(); j <= w.j_max(); ++j) {
        const DyadicCube a = c.ancestor(j);
        const auto i = w.index_of(a);
        if (i != w.size() && t.nonzero(i)) {
          anc.push_back(i);
          scale.push_back(log_layer_scale(a, prm.s));
        }
      }
      if (anc.empty()) continue;
      nodes.clear();
      for (std::size_t k = 0; k < rule.size(); ++k) {
        stack.clear();
        for (std::size_t a = 0; a < anc.size(); ++a)
          stack.push_back(scale[a] + safe_log(lp_norm(pw->v.apply(rule.point(k), t.at(anc[a])), pw->v.target().u)));
        nodes.push_back(std::log(rule.weights[k]) + prm.p * log_lq(stack, prm.q));
      }
      cell_logs.push_back(log_sum_exp(nodes) - w.j_max() * n * kLn2);
    }
  }
  if (cell_logs.empty()) return 0.0;
  return finish(log_sum_exp(cell_logs) / prm.p, "seq_norm");
}

DyadicSequence rescale_map(const DyadicSequence& t, const NormFamily& rho, double u) {
  if (!(u > 0)) throw PreconditionError("rescale exponent must be positive");
  const auto& w = t.window();
  DyadicSequence out(w, 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!t.nonzero(i)) continue;
    const DyadicCube q = w.cube(i);
    const double v = std::pow(rho(q, t.at(i)), u) * std::pow(q.side(), w.dim() * (1.0 - u) / 2.0);
    out.set(i, Vec::Constant(1, v));
  }
  return out;
}

SpaceParams rescaled_params(const SpaceParams& params, double u) {
  SpaceParams r = params;
  r.s = params.s * u;
  r.p = params.p / u;
  r.q = params.q / u;
  return r;
}

SingleCubeBound single_cube_bound(const DyadicSequence& t, const DyadicCube& r, const NormSource& source,
                                  const SpaceParams& params) {
  SingleCubeBound out;
  const Vec tr = t.get(r);
  if (const auto* fam = std::get_if<NormFamily>(&source))
    out.lhs = (*fam)(r, tr);
  else
    out.lhs = CubeNorm(std::get<PointwiseWeight>(source).v, Box::of(r), params.p, std::get<PointwiseWeight>(source).quad)(tr);
  const double nrm = seq_norm(t, params, source);
  out.rhs = std::pow(r.side(), params.s) * std::pow(r.volume(), 0.5 - 1.0 / params.p) * nrm;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

void write_sequence(std::ostream& os, const DyadicSequence& t) {
  const auto& w = t.window();
  os << "dyadic_sequence n " << w.dim() << " m " << t.m() << " levels " << w.j_min() << ' ' << w.j_max() << " box";
  os << std::setprecision(17);
  for (int i = 0; i < w.dim(); ++i) os << ' ' << w.box().lo[i] << ' ' << w.box().hi[i];
  os << '\n';
  for (const auto i : t.support()) {
    const DyadicCube q = w.cube(i);
    os << q.level;
    for (auto k : q.offset) os << ' ' << k;
    const Vec v = t.at(i);
    for (int k = 0; k < t.m(); ++k) os << ' ' << v[k];
    os << '\n';
  }
}

DyadicSequence read_sequence(std::istream& is) {
  std::string line, tag;
  if (!std::getline(is, line)) throw PreconditionError("sequence file: missing header");
  std::istringstream hs(line);
  int n = 0, m = 0, j0 = 0, j1 = 0;
  std::string kn, km, kl, kb;
  hs >> tag >> kn >> n >> km >> m >> kl >> j0 >> j1 >> kb;
  if (!hs || tag != "dyadic_sequence" || kn != "n" || km != "m" || kl != "levels" || kb != "box" || n < 1 || m < 1)
    throw PreconditionError("sequence file: malformed header");
  Box box{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) hs >> box.lo[i] >> box.hi[i];
  if (!hs) throw PreconditionError("sequence file: malformed box");
  DyadicSequence t(build_window(n, j0, j1, box), m);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    DyadicCube q(0, std::vector<std::int64_t>(n));
    ls >> q.level;
    for (int i = 0; i < n; ++i) ls >> q.offset[i];
    Vec v(m);
    for (int k = 0; k < m; ++k) ls >> v[k];
    if (!ls) throw PreconditionError("sequence file: malformed line " + std::to_string(lineno));
    t.set(q, v);
  }
  return t;
}

}  // namespace owlab
