#include "owlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "owlab/errors.hpp"

namespace owlab {

double lp_norm(const Vec& y, double u) {
  if (y.size() == 0) return 0.0;
  const double mx = y.cwiseAbs().maxCoeff();
  if (std::isinf(u) || mx == 0.0 || !std::isfinite(mx)) return mx;
  if (u == 1.0) return y.cwiseAbs().sum();
  if (u == 2.0) return y.norm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += std::pow(std::abs(y[i]) / mx, u);
  return mx * std::pow(s, 1.0 / u);
}

double lp_norm_grad(const Vec& y, double u, Vec* grad) {
  const double nrm = lp_norm(y, u);
  if (!grad) return nrm;
  grad->setZero(y.size());
  if (nrm == 0.0 || !std::isfinite(nrm)) return nrm;
  if (std::isinf(u)) {
    Eigen::Index k;
    y.cwiseAbs().maxCoeff(&k);
    (*grad)[k] = y[k] > 0 ? 1.0 : -1.0;
    return nrm;
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) continue;
    const double sgn = y[i] > 0 ? 1.0 : -1.0;
    (*grad)[i] = u == 1.0 ? sgn : sgn * std::pow(std::abs(y[i]) / nrm, u - 1.0);
  }
  return nrm;
}

double conjugate_exponent(double p) {
  if (p <= 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

namespace {

// Integral of t^g over [a, b], 0 <= a < b, divided by (b - a).
double power_mean_positive(double a, double b, double g) {
  const double h = b - a;
  if (a == 0.0) {
    if (g <= -1.0) return kInf;
    return std::pow(b, g) / (g + 1.0);
  }
  const double r = h / a;
  if (g == -1.0) return std::log1p(r) / h;
  return std::pow(a, g) * std::expm1((g + 1.0) * std::log1p(r)) / ((g + 1.0) * r);
}

double primitive_from_zero(double d, double g) {
  if (d == 0.0) return 0.0;
  if (g <= -1.0) return kInf;
  return std::pow(d, g + 1.0) / (g + 1.0);
}

double distance(const double* x, const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return std::sqrt(s);
}

NodeRule midpoint_rule(const Box& q, int nodes) {
  const int n = q.dim();
  NodeRule rule;
  rule.n = n;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(nodes);
  rule.points.resize(total * n);
  rule.weights.assign(total, 1.0 / static_cast<double>(total));
  std::vector<int> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    for (int i = 0; i < n; ++i) {
      const double h = (q.hi[i] - q.lo[i]) / nodes;
      rule.points[k * n + i] = q.lo[i] + (idx[i] + 0.5) * h;
    }
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < nodes) break;
      idx[i] = 0;
    }
  }
  return rule;
}

std::string point_string(const double* x, int n) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

std::string box_string(const Box& b) {
  std::ostringstream os;
  for (int i = 0; i < b.dim(); ++i) os << (i ? "x" : "") << '[' << b.lo[i] << ',' << b.hi[i] << ')';
  return os.str();
}

}  // namespace

double power_mean_1d(double lo, double hi, double c, double gamma) {
  if (!(hi > lo)) throw PreconditionError("power_mean_1d: empty interval");
  if (gamma == 0.0) return 1.0;
  if (c <= lo) return power_mean_positive(lo - c, hi - c, gamma);
  if (c >= hi) return power_mean_positive(c - hi, c - lo, gamma);
  return (primitive_from_zero(c - lo, gamma) + primitive_from_zero(hi - c, gamma)) / (hi - lo);
}

WeightModel WeightModel::identity(int n, int m, double u) {
  if (n < 1 || m < 1 || u < 1.0) throw PreconditionError("identity weight: need n, m >= 1 and u >= 1");
  WeightModel w;
  w.kind_ = Kind::Identity;
  w.n_ = n;
  w.target_ = {m, u};
  return w;
}

WeightModel WeightModel::diagonal_power(std::vector<std::vector<double>> centers, std::vector<double> exponents,
                                        double u) {
  if (centers.empty() || centers.size() != exponents.size())
    throw PreconditionError("diagonal power weight: one center per exponent required");
  if (u < 1.0) throw PreconditionError("target exponent must be >= 1");
  WeightModel w;
  w.kind_ = Kind::DiagonalPower;
  w.n_ = static_cast<int>(centers.front().size());
  for (const auto& c : centers)
    if (static_cast<int>(c.size()) != w.n_ || w.n_ < 1) throw PreconditionError("inconsistent center dimensions");
  w.target_ = {static_cast<int>(centers.size()), u};
  w.centers_ = std::move(centers);
  w.exponents_ = std::move(exponents);
  return w;
}

WeightModel WeightModel::diagonal_log(std::vector<std::vector<double>> centers, double u) {
  if (centers.empty()) throw PreconditionError("diagonal log weight: no centers");
  WeightModel w = diagonal_power(centers, std::vector<double>(centers.size(), 0.0), u);
  w.kind_ = Kind::DiagonalLog;
  w.exponents_.clear();
  return w;
}

WeightModel WeightModel::piecewise_constant(Box box, std::vector<int> cells, std::vector<Mat> values, double u) {
  if (box.dim() < 1 || static_cast<int>(cells.size()) != box.dim())
    throw PreconditionError("piecewise constant weight: cells per axis must match box dimension");
  std::size_t total = 1;
  for (int c : cells) {
    if (c < 1) throw PreconditionError("piecewise constant weight: empty axis");
    total *= static_cast<std::size_t>(c);
  }
  if (values.size() != total) throw PreconditionError("piecewise constant weight: value count mismatch");
  const auto m = values.front().rows();
  bool diag = true;
  for (const auto& v : values) {
    if (v.rows() != m || v.cols() != m) throw PreconditionError("piecewise constant weight: matrices must be m x m");
    if (!v.allFinite()) throw PreconditionError("piecewise constant weight: non-finite entry");
    Mat off = v;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() != 0.0) diag = false;
  }
  WeightModel w;
  w.kind_ = Kind::PiecewiseConstant;
  w.n_ = box.dim();
  w.target_ = {static_cast<int>(m), u};
  w.pc_box_ = std::move(box);
  w.pc_cells_ = std::move(cells);
  w.pc_values_ = std::move(values);
  w.pc_diagonal_ = diag;
  return w;
}

WeightModel WeightModel::with_target_exponent(double u) const {
  if (u < 1.0) throw PreconditionError("target exponent must be >= 1");
  WeightModel w = *this;
  w.target_.u = u;
  return w;
}

std::size_t WeightModel::pc_cell_of(const double* x) const {
  std::size_t idx = 0;
  for (int i = 0; i < n_; ++i) {
    const double h = (pc_box_.hi[i] - pc_box_.lo[i]) / pc_cells_[i];
    const double t = std::floor((x[i] - pc_box_.lo[i]) / h);
    if (t < 0 || t >= pc_cells_[i])
      throw PreconditionError("point " + point_string(x, n_) + " outside the piecewise constant grid");
    idx = idx * pc_cells_[i] + static_cast<std::size_t>(t);
  }
  return idx;
}

Mat WeightModel::matrix_at(const double* x) const {
  const int m = target_.m;
  switch (kind_) {
    case Kind::Identity:
      return Mat::Identity(m, m);
    case Kind::DiagonalPower:
    case Kind::DiagonalLog:
      return diagonal_at(x).asDiagonal();
    case Kind::PiecewiseConstant:
      return pc_values_[pc_cell_of(x)];
    case Kind::BlockBMO: {
      const int h = m / 2;
      Mat out = Mat::Identity(m, m);
      const Mat b = inner_->matrix_at(x);
      if (adjoint_inverse_)
        out.topRightCorner(h, h) = -b.transpose();
      else
        out.bottomLeftCorner(h, h) = b;
      return out;
    }
  }
  return {};
}

Vec WeightModel::apply(const double* x, const Vec& e) const {
  if (is_diagonal()) return diagonal_at(x).cwiseProduct(e);
  return matrix_at(x) * e;
}

bool WeightModel::is_diagonal() const {
  switch (kind_) {
    case Kind::Identity:
    case Kind::DiagonalPower:
    case Kind::DiagonalLog:
      return true;
    case Kind::PiecewiseConstant:
      return pc_diagonal_;
    case Kind::BlockBMO:
      return false;
  }
  return false;
}

Vec WeightModel::diagonal_at(const double* x) const {
  const int m = target_.m;
  Vec d(m);
  switch (kind_) {
    case Kind::Identity:
      d.setOnes();
      break;
    case Kind::DiagonalPower:
      for (int i = 0; i < m; ++i) d[i] = std::pow(distance(x, centers_[i]), exponents_[i]);
      break;
    case Kind::DiagonalLog:
      for (int i = 0; i < m; ++i) d[i] = std::log(distance(x, centers_[i]));
      break;
    case Kind::PiecewiseConstant:
      if (!pc_diagonal_) throw PreconditionError("diagonal_at on a non-diagonal weight");
      d = pc_values_[pc_cell_of(x)].diagonal();
      break;
    case Kind::BlockBMO:
      throw PreconditionError("diagonal_at on a block weight");
  }
  return d;
}

bool WeightModel::coordinate_means_exact() const {
  switch (kind_) {
    case Kind::Identity:
      return true;
    case Kind::DiagonalPower:
      return n_ == 1;
    case Kind::PiecewiseConstant:
      return pc_diagonal_;
    default:
      return false;
  }
}

double WeightModel::coordinate_power_mean(const Box& q, int i, double gamma, const Quadrature& quad) const {
  if (!is_diagonal()) throw PreconditionError("coordinate_power_mean requires a diagonal weight");
  if (i < 0 || i >= target_.m) throw PreconditionError("coordinate index out of range");
  switch (kind_) {
    case Kind::Identity:
      return 1.0;
    case Kind::DiagonalPower:
      if (n_ == 1) return power_mean_1d(q.lo[0], q.hi[0], centers_[i][0], exponents_[i] * gamma);
      break;
    case Kind::PiecewiseConstant: {
      const NodeRule rule = pc_rule(q);
      double s = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k)
        s += rule.weights[k] * std::pow(std::abs(pc_values_[pc_cell_of(rule.point(k))](i, i)), gamma);
      return s;
    }
    default:
      break;
  }
  const NodeRule rule = midpoint_rule(q, quad.nodes);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * std::pow(std::abs(diagonal_at(rule.point(k))[i]), gamma);
  return s;
}

WeightModel WeightModel::inverse_adjoint() const {
  WeightModel w = *this;
  w.target_.u = conjugate_exponent(target_.u);
  switch (kind_) {
    case Kind::Identity:
      break;
    case Kind::DiagonalPower:
      for (auto& b : w.exponents_) b = -b;
      break;
    case Kind::DiagonalLog:
      throw PreconditionError("a logarithmic diagonal weight is not invertible in general");
    case Kind::BlockBMO:
      w.adjoint_inverse_ = !adjoint_inverse_;
      break;
    case Kind::PiecewiseConstant:
      for (std::size_t c = 0; c < w.pc_values_.size(); ++c) {
        Eigen::FullPivLU<Mat> lu(pc_values_[c]);
        if (!lu.isInvertible()) throw NumericalError("piecewise constant weight is singular on cell " + std::to_string(c));
        w.pc_values_[c] = lu.inverse().transpose();
      }
      break;
  }
  return w;
}

WeightModel WeightModel::snapped(double h) const {
  if (!(h > 0)) throw PreconditionError("snapping step must be positive");
  WeightModel w = *this;
  for (auto& c : w.centers_)
    for (auto& x : c) x = h * std::round(x / h);
  if (inner_) w.inner_ = std::make_shared<const WeightModel>(inner_->snapped(h));
  return w;
}

NodeRule WeightModel::pc_rule(const Box& q) const {
  NodeRule rule;
  rule.n = n_;
  std::vector<std::vector<std::pair<double, double>>> axis(n_);  // (center, length)
  for (int i = 0; i < n_; ++i) {
    const double h = (pc_box_.hi[i] - pc_box_.lo[i]) / pc_cells_[i];
    if (q.lo[i] < pc_box_.lo[i] || q.hi[i] > pc_box_.hi[i])
      throw PreconditionError("box " + box_string(q) + " leaves the piecewise constant grid");
    const int c0 = std::max(0, static_cast<int>(std::floor((q.lo[i] - pc_box_.lo[i]) / h)));
    const int c1 = std::min(pc_cells_[i], static_cast<int>(std::ceil((q.hi[i] - pc_box_.lo[i]) / h)));
    for (int c = c0; c < c1; ++c) {
      const double a = std::max(q.lo[i], pc_box_.lo[i] + c * h);
      const double b = std::min(q.hi[i], pc_box_.lo[i] + (c + 1) * h);
      if (b > a) axis[i].emplace_back(0.5 * (a + b), b - a);
    }
  }
  const double vol = q.volume();
  std::vector<std::size_t> idx(n_, 0);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n_; ++i) {
      rule.points.push_back(axis[i][idx[i]].first);
      w *= axis[i][idx[i]].second;
    }
    rule.weights.push_back(w / vol);
    int i = n_ - 1;
    for (; i >= 0; --i) {
      if (++idx[i] < axis[i].size()) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return rule;
}

NodeRule WeightModel::rule_on(const Box& q, const Quadrature& quad) const {
  if (q.dim() != n_) throw PreconditionError("box dimension does not match weight dimension");
  if (kind_ == Kind::PiecewiseConstant) return pc_rule(q);
  if (kind_ == Kind::BlockBMO) return inner_->rule_on(q, quad);
  if (quad.nodes < 2) throw PreconditionError("quadrature needs at least 2 nodes per axis");
  return midpoint_rule(q, quad.nodes);
}

double WeightModel::integrate_norm_pow(const Box& q, double p, const Vec& e, const Quadrature& quad) const {
  if (e.size() != target_.m) throw PreconditionError("vector dimension does not match the target space");
  const double vol = q.volume();
  if (kind_ == Kind::Identity) return std::pow(lp_norm(e, target_.u), p) * vol;
  if (is_diagonal() && coordinate_means_exact() && (target_.m == 1 || target_.u == p)) {
    double s = 0.0;
    for (int i = 0; i < target_.m; ++i)
      if (e[i] != 0.0) s += std::pow(std::abs(e[i]), p) * coordinate_power_mean(q, i, p, quad);
    return s * vol;
  }
  const NodeRule rule = rule_on(q, quad);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k)
    s += rule.weights[k] * std::pow(lp_norm(apply(rule.point(k), e), target_.u), p);
  return s * vol;
}

WeightModel make_bmo_block_weight(const WeightModel& inner) {
  WeightModel w;
  w.kind_ = WeightModel::Kind::BlockBMO;
  w.n_ = inner.dim();
  w.target_ = {2 * inner.m(), inner.target().u};
  w.inner_ = std::make_shared<const WeightModel>(inner);
  return w;
}

CubeNorm::CubeNorm(const WeightModel& v, const Box& q, double p, const Quadrature& quad)
    : model_(std::make_shared<const WeightModel>(v)),
      box_(q),
      quad_(quad),
      p_(p),
      u_(v.target().u),
      m_(v.m()) {
  if (!(p > 0)) throw PreconditionError("integrability exponent must be positive");
  if (q.dim() != v.dim()) throw PreconditionError("cube dimension does not match weight dimension");
  if (v.kind() == WeightModel::Kind::Identity) {
    mode_ = Mode::Identity;
  } else if (std::isfinite(p) && v.is_diagonal() && v.kind() != WeightModel::Kind::DiagonalLog &&
             (m_ == 1 || u_ == p)) {
    mode_ = Mode::Closed;
    coeffs_.resize(m_);
    for (int i = 0; i < m_; ++i) coeffs_[i] = v.coordinate_power_mean(q, i, p, quad);
  } else {
    mode_ = Mode::Sampled;
    if (std::isfinite(p) && v.is_diagonal() && v.coordinate_means_exact()) {
      guard_.resize(m_);
      for (int i = 0; i < m_; ++i) guard_[i] = v.coordinate_power_mean(q, i, p, quad);
    }
  }
}

void CubeNorm::sample() const {
  if (sampled_) return;
  const NodeRule rule = model_->rule_on(box_, quad_);
  const auto k = rule.size();
  w_ = rule.weights;
  diag_ = model_->is_diagonal();
  if (diag_) {
    diag_nodes_.resize(m_, static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) diag_nodes_.col(j) = model_->diagonal_at(rule.point(j));
    if (!diag_nodes_.allFinite()) {
      for (std::size_t j = 0; j < k; ++j)
        if (!diag_nodes_.col(j).allFinite())
          throw NumericalError("weight not finite on cube " + box_string(box_) + " at node " +
                               point_string(rule.point(j), rule.n));
    }
  } else {
    mat_nodes_.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      mat_nodes_[j] = model_->matrix_at(rule.point(j));
      if (!mat_nodes_[j].allFinite())
        throw NumericalError("weight not finite on cube " + box_string(box_) + " at node " +
                             point_string(rule.point(j), rule.n));
    }
  }
  sampled_ = true;
}

std::size_t CubeNorm::node_count() const {
  sample();
  return w_.size();
}

double CubeNorm::eval(const Vec& e, Vec* grad) const {
  if (e.size() != m_) throw PreconditionError("vector dimension does not match the target space");
  if (grad) grad->setZero(m_);
  if (mode_ == Mode::Identity) return lp_norm_grad(e, u_, grad);
  if (mode_ == Mode::Closed) {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (e[i] == 0.0) continue;
      if (std::isinf(coeffs_[i])) return kInf;
      s += coeffs_[i] * std::pow(std::abs(e[i]), p_);
    }
    const double val = std::pow(s, 1.0 / p_);
    if (grad && val > 0.0) {
      const double f = std::pow(val, 1.0 - p_);
      for (int i = 0; i < m_; ++i)
        if (e[i] != 0.0) (*grad)[i] = f * coeffs_[i] * std::pow(std::abs(e[i]), p_ - 1.0) * (e[i] > 0 ? 1.0 : -1.0);
    }
    return val;
  }
  if (guard_.size() == m_)
    for (int i = 0; i < m_; ++i)
      if (e[i] != 0.0 && std::isinf(guard_[i])) return kInf;
  sample();
  const auto k = w_.size();
  Vec y(m_), gy(m_);
  Vec acc_grad = Vec::Zero(m_);
  if (std::isinf(p_)) {
    double best = -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      y = diag_ ? Vec(diag_nodes_.col(j).cwiseProduct(e)) : Vec(mat_nodes_[j] * e);
      const double nj = lp_norm_grad(y, u_, grad ? &gy : nullptr);
      if (nj > best) {
        best = nj;
        if (grad) *grad = diag_ ? Vec(diag_nodes_.col(j).cwiseProduct(gy)) : Vec(mat_nodes_[j].transpose() * gy);
      }
    }
    return best;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    y = diag_ ? Vec(diag_nodes_.col(j).cwiseProduct(e)) : Vec(mat_nodes_[j] * e);
    const double nj = lp_norm_grad(y, u_, grad ? &gy : nullptr);
    if (nj == 0.0) continue;
    acc += w_[j] * std::pow(nj, p_);
    if (grad) {
      const double f = w_[j] * std::pow(nj, p_ - 1.0);
      if (diag_)
        acc_grad += f * diag_nodes_.col(j).cwiseProduct(gy);
      else
        acc_grad += f * (mat_nodes_[j].transpose() * gy);
    }
  }
  const double val = std::pow(acc, 1.0 / p_);
  if (grad && val > 0.0) *grad = std::pow(val, 1.0 - p_) * acc_grad;
  return val;
}

double CubeNorm::essinf(const Vec& e, Vec* grad) const {
  if (e.size() != m_) throw PreconditionError("vector dimension does not match the target space");
  if (grad) grad->setZero(m_);
  if (mode_ == Mode::Identity) return lp_norm_grad(e, u_, grad);
  sample();
  Vec y(m_), gy(m_);
  double best = kInf;
  for (std::size_t j = 0; j < w_.size(); ++j) {
    y = diag_ ? Vec(diag_nodes_.col(j).cwiseProduct(e)) : Vec(mat_nodes_[j] * e);
    const double nj = lp_norm_grad(y, u_, grad ? &gy : nullptr);
    if (nj < best) {
      best = nj;
      if (grad) *grad = diag_ ? Vec(diag_nodes_.col(j).cwiseProduct(gy)) : Vec(mat_nodes_[j].transpose() * gy);
    }
  }
  return best;
}

double rho_lp(const WeightModel& v, const Box& q, double p, const Vec& e, const Quadrature& quad) {
  const double r = CubeNorm(v, q, p, quad)(e);
  if (!std::isfinite(r)) throw NumericalError("rho_lp: non-finite result on " + box_string(q));
  return r;
}

double rho_lp(const WeightModel& v, const DyadicCube& q, double p, const Vec& e, const Quadrature& quad) {
  return rho_lp(v, Box::of(q), p, e, quad);
}

}  // namespace owlab
