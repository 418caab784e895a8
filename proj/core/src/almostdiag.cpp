#include "owlab/almostdiag.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "owlab/errors.hpp"

namespace owlab {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double kernel(const ADParams& p, const DyadicCube& q, const DyadicCube& r) {
  return babc_kernel(-p.E, -p.F, -p.D, q, r);
}

Mat canonical_dense(const ADParams& p, const std::vector<DyadicCube>& cubes) {
  const auto n = static_cast<Eigen::Index>(cubes.size());
  Mat b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = kernel(p, cubes[i], cubes[j]);
  return b;
}

DyadicCube parse_cube(const std::string& tok) {
  if (tok.size() < 3 || tok.front() != '(' || tok.back() != ')') throw PreconditionError("bad cube token " + tok);
  std::istringstream is(tok.substr(1, tok.size() - 2));
  std::string part;
  DyadicCube q;
  bool first = true;
  while (std::getline(is, part, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      throw PreconditionError("bad cube token " + tok);
    }
    if (used != part.size()) throw PreconditionError("bad cube token " + tok);
    if (first)
      q.level = static_cast<int>(v);
    else
      q.offset.push_back(v);
    first = false;
  }
  if (q.offset.empty()) throw PreconditionError("bad cube token " + tok);
  return q;
}

}  // namespace

ADMatrix ADMatrix::canonical(const ADParams& params, const GridWindow& window, std::size_t dense_limit) {
  ADMatrix m;
  m.window_ = window;
  m.params_ = params;
  m.source_ = Source::Canonical;
  m.bound_ = 1.0;
  m.cubes_ = window.cubes();
  m.dense_ = window.size() <= dense_limit;
  if (m.dense_) m.b_ = canonical_dense(params, m.cubes_);
  return m;
}

ADMatrix ADMatrix::table(const GridWindow& window, Mat entries, const ADParams& params) {
  const auto n = static_cast<Eigen::Index>(window.size());
  if (entries.rows() != n || entries.cols() != n) throw PreconditionError("AD table does not match the window size");
  if (!entries.allFinite()) throw PreconditionError("AD table has non-finite entries");
  ADMatrix m;
  m.window_ = window;
  m.params_ = params;
  m.source_ = Source::Table;
  m.cubes_ = window.cubes();
  m.dense_ = true;
  m.bound_ = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m.bound_ = std::max(m.bound_, std::abs(entries(i, j)) / kernel(params, m.cubes_[i], m.cubes_[j]));
  m.b_ = std::move(entries);
  return m;
}

double ADMatrix::entry(std::size_t qi, std::size_t ri) const {
  if (dense_) return b_(static_cast<Eigen::Index>(qi), static_cast<Eigen::Index>(ri));
  return kernel(params_, cubes_[qi], cubes_[ri]);
}

double ADMatrix::entry(const DyadicCube& q, const DyadicCube& r) const {
  const auto qi = window_.index_of(q), ri = window_.index_of(r);
  if (qi == window_.size() || ri == window_.size()) throw PreconditionError("AD entry outside the window");
  return entry(qi, ri);
}

Mat ADMatrix::to_dense() const {
  if (dense_) return b_;
  return canonical_dense(params_, cubes_);
}

ADMatrix ADMatrix::transpose() const {
  const ADParams swapped{params_.D, params_.F, params_.E};
  if (source_ == Source::Canonical) return canonical(swapped, window_, dense_ ? window_.size() : 0);
  return table(window_, b_.transpose(), swapped);
}

DyadicSequence ad_apply(const ADMatrix& b, const DyadicSequence& t) {
  if (!(b.window() == t.window())) throw PreconditionError("ad_apply: window mismatch");
  const int m = t.m();
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::Map<const RowMat> tm(t.data().data(), n, m);
  RowMat out(n, m);
  if (b.dense()) {
    out.noalias() = b.entries() * tm;
  } else {
    // Lazy: only the nonzero columns contribute.
    out.setZero();
    const auto supp = t.support();
    for (Eigen::Index q = 0; q < n; ++q)
      for (auto r : supp) out.row(q) += b.entry(static_cast<std::size_t>(q), r) * tm.row(static_cast<Eigen::Index>(r));
  }
  DyadicSequence res(t.window(), m);
  for (Eigen::Index q = 0; q < n; ++q) res.set(static_cast<std::size_t>(q), out.row(q).transpose());
  return res;
}

ComposeCheck ad_compose_check(const ADParams& p1, const ADParams& p2, const GridWindow& window) {
  const double n = window.dim();
  if (!(p1.D > n)) throw PreconditionError("ad_compose_check: D1 must exceed n");
  if (!(p2.D > n)) throw PreconditionError("ad_compose_check: D2 must exceed n");
  if (p1.E == p2.E) throw PreconditionError("ad_compose_check: E1 and E2 must differ");
  if (p1.F == p2.F) throw PreconditionError("ad_compose_check: F1 and F2 must differ");
  const double dmin = std::min(p1.D, p2.D);
  if (!(p1.E + p2.F > dmin)) throw PreconditionError("ad_compose_check: E1 + F2 must exceed min(D1, D2)");
  if (!(p2.E + p1.F > dmin)) throw PreconditionError("ad_compose_check: E2 + F1 must exceed min(D1, D2)");
  if (window.size() > 4 * ADMatrix::kDenseLimit) throw PreconditionError("ad_compose_check: window too large");

  ComposeCheck out;
  out.combined = {dmin, std::min(p1.E, p2.E), std::min(p1.F, p2.F)};
  const auto cubes = window.cubes();
  const Mat prod = canonical_dense(p1, cubes) * canonical_dense(p2, cubes);
  std::size_t bi = 0, bj = 0;
  for (Eigen::Index i = 0; i < prod.rows(); ++i)
    for (Eigen::Index j = 0; j < prod.cols(); ++j) {
      const double r = prod(i, j) / kernel(out.combined, cubes[i], cubes[j]);
      if (r > out.ratio) {
        out.ratio = r;
        bi = static_cast<std::size_t>(i);
        bj = static_cast<std::size_t>(j);
      }
    }
  out.q = cubes[bi];
  out.r = cubes[bj];
  return out;
}

OpnormEstimate ad_opnorm_estimate(const ADMatrix& b, const SpaceParams& params, const NormSource& source, int m) {
  const auto& w = b.window();
  OpnormEstimate est;
  auto consider = [&](const DyadicSequence& t, const std::string& name) {
    const double den = seq_norm(t, params, source);
    if (!(den > 0)) return;
    ++est.probes;
    const double r = seq_norm(ad_apply(b, t), params, source) / den;
    if (r > est.value) {
      est.value = r;
      est.probe = name;
    }
  };

  for (std::size_t i = 0; i < w.size(); ++i)
    for (int k = 0; k < m; ++k) {
      DyadicSequence t(w, m);
      t.set(i, Vec::Unit(m, k));
      consider(t, "coordinate " + w.cube(i).to_string() + " e" + std::to_string(k));
    }

  std::mt19937_64 rng(0x5EEDULL);
  std::bernoulli_distribution coin(0.5);
  for (int r = 0; r < 16; ++r) {
    DyadicSequence t(w, m);
    for (std::size_t i = 0; i < w.size(); ++i) {
      Vec v(m);
      for (int k = 0; k < m; ++k) v[k] = coin(rng) ? 1.0 : -1.0;
      t.set(i, v);
    }
    consider(t, "random sign " + std::to_string(r));
  }

  for (int j = w.j_min(); j <= w.j_max(); ++j) {
    DyadicSequence t(w, m);
    for (std::size_t i = w.level_begin(j); i < w.level_begin(j) + w.level_size(j); ++i)
      t.set(i, Vec::Ones(m) * std::sqrt(w.cube(i).volume()));
    consider(t, "level stack " + std::to_string(j));
  }
  return est;
}

void write_ad_matrix(std::ostream& os, const ADMatrix& b) {
  const auto& w = b.window();
  char buf[64];
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::string qs = w.cube(i).to_string();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double v = b.entry(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << qs << ' ' << w.cube(j).to_string() << ' ' << buf << '\n';
    }
  }
}

ADMatrix read_ad_matrix(std::istream& is, const GridWindow& window, const ADParams& params) {
  Mat b = Mat::Zero(static_cast<Eigen::Index>(window.size()), static_cast<Eigen::Index>(window.size()));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string qs, rs;
    double v = 0;
    if (!(ls >> qs >> rs >> v)) throw PreconditionError("AD file: malformed line " + std::to_string(lineno));
    const auto qi = window.index_of(parse_cube(qs)), ri = window.index_of(parse_cube(rs));
    if (qi == window.size() || ri == window.size())
      throw PreconditionError("AD file: cube outside the window on line " + std::to_string(lineno));
    b(static_cast<Eigen::Index>(qi), static_cast<Eigen::Index>(ri)) = v;
  }
  return ADMatrix::table(window, std::move(b), params);
}

}  // namespace owlab
