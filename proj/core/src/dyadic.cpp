#include "owlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "owlab/errors.hpp"

namespace owlab {

std::int64_t floor_shift(std::int64_t a, int shift) {
  if (shift <= 0) return a * (std::int64_t{1} << -shift);
  return a >= 0 ? (a >> shift) : -((-a + (std::int64_t{1} << shift) - 1) >> shift);
}

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

double DyadicCube::volume() const { return std::ldexp(1.0, -level * dim()); }

std::vector<double> DyadicCube::anchor() const {
  std::vector<double> x(offset.size());
  for (std::size_t i = 0; i < offset.size(); ++i) x[i] = std::ldexp(static_cast<double>(offset[i]), -level);
  return x;
}

std::vector<double> DyadicCube::upper() const {
  std::vector<double> x(offset.size());
  for (std::size_t i = 0; i < offset.size(); ++i) x[i] = std::ldexp(static_cast<double>(offset[i] + 1), -level);
  return x;
}

DyadicCube DyadicCube::parent() const { return ancestor(level - 1); }

DyadicCube DyadicCube::ancestor(int j) const {
  if (j > level) throw PreconditionError("ancestor level above cube level");
  DyadicCube a(j, offset);
  for (auto& k : a.offset) k = floor_shift(k, level - j);
  return a;
}

std::vector<DyadicCube> DyadicCube::children() const {
  const int n = dim();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    DyadicCube c(level + 1, offset);
    for (int i = 0; i < n; ++i) c.offset[i] = 2 * offset[i] + ((mask >> (n - 1 - i)) & 1u);
    out.push_back(std::move(c));
  }
  return out;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim() != dim() || other.level < level) return false;
  return other.ancestor(level) == *this;
}

bool DyadicCube::contains_point(const double* x) const {
  for (int i = 0; i < dim(); ++i) {
    const double t = std::ldexp(x[i], level);
    if (std::floor(t) != static_cast<double>(offset[i])) return false;
  }
  return true;
}

std::string DyadicCube::to_string() const {
  std::ostringstream os;
  os << '(' << level;
  for (auto k : offset) os << ',' << k;
  os << ')';
  return os.str();
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
  return v;
}

double Box::max_side() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s = std::max(s, hi[i] - lo[i]);
  return s;
}

Box Box::of(const DyadicCube& q) { return Box{q.anchor(), q.upper()}; }

Box Box::unit(int n) { return Box{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)}; }

double babc_kernel(double a, double b, double c, const DyadicCube& q, const DyadicCube& r) {
  if (q.dim() != r.dim()) throw PreconditionError("babc_kernel: dimension mismatch");
  const double lq = q.side(), lr = r.side();
  double d2 = 0.0;
  for (int i = 0; i < q.dim(); ++i) {
    const double d = std::ldexp(static_cast<double>(q.offset[i]), -q.level) -
                     std::ldexp(static_cast<double>(r.offset[i]), -r.level);
    d2 += d * d;
  }
  const double dist = std::sqrt(d2) / std::max(lq, lr);
  double v = 1.0;
  if (a != 0.0) v *= std::pow(1.0 + lr / lq, a);
  if (b != 0.0) v *= std::pow(1.0 + lq / lr, b);
  if (c != 0.0 && dist != 0.0) v *= std::pow(1.0 + dist, c);
  return v;
}

double babc_kernel(const BabcParams& params, const DyadicCube& q, const DyadicCube& r) {
  return babc_kernel(params.a, params.b, params.c, q, r);
}

Box min_containing(const DyadicCube& q, const DyadicCube& r) {
  if (q.dim() != r.dim()) throw PreconditionError("min_containing: dimension mismatch");
  const auto qa = q.anchor(), qb = q.upper(), ra = r.anchor(), rb = r.upper();
  Box s{std::vector<double>(q.dim()), std::vector<double>(q.dim())};
  double side = 0.0;
  for (int i = 0; i < q.dim(); ++i) {
    s.lo[i] = std::min(qa[i], ra[i]);
    side = std::max(side, std::max(qb[i], rb[i]) - s.lo[i]);
  }
  for (int i = 0; i < q.dim(); ++i) s.hi[i] = s.lo[i] + side;
  return s;
}

GridWindow::GridWindow(int n, int j_min, int j_max, Box box)
    : n_(n), j_min_(j_min), j_max_(j_max), box_(std::move(box)) {
  if (n < 1) throw PreconditionError("window dimension must be positive");
  if (j_min > j_max) throw PreconditionError("window requires j_min <= j_max");
  if (box_.dim() != n) throw PreconditionError("window box dimension mismatch");
  for (int i = 0; i < n; ++i)
    if (!(box_.hi[i] > box_.lo[i])) throw PreconditionError("empty window box");
  total_ = 0;
  for (int j = j_min; j <= j_max; ++j) {
    std::vector<std::int64_t> lo(n), hi(n);
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) {
      lo[i] = static_cast<std::int64_t>(std::floor(std::ldexp(box_.lo[i], j)));
      hi[i] = static_cast<std::int64_t>(std::ceil(std::ldexp(box_.hi[i], j)));
      count *= static_cast<std::size_t>(hi[i] - lo[i]);
    }
    lo_.push_back(std::move(lo));
    hi_.push_back(std::move(hi));
    begin_.push_back(total_);
    total_ += count;
  }
  begin_.push_back(total_);
}

std::size_t GridWindow::level_size(int j) const {
  if (j < j_min_ || j > j_max_) return 0;
  return begin_[j - j_min_ + 1] - begin_[j - j_min_];
}

std::size_t GridWindow::level_begin(int j) const { return begin_[j - j_min_]; }

DyadicCube GridWindow::cube(std::size_t index) const {
  const auto it = std::upper_bound(begin_.begin(), begin_.end(), index);
  const int li = static_cast<int>(it - begin_.begin()) - 1;
  std::size_t rem = index - begin_[li];
  DyadicCube q(j_min_ + li, std::vector<std::int64_t>(n_));
  for (int i = n_ - 1; i >= 0; --i) {
    const auto w = static_cast<std::size_t>(hi_[li][i] - lo_[li][i]);
    q.offset[i] = lo_[li][i] + static_cast<std::int64_t>(rem % w);
    rem /= w;
  }
  return q;
}

std::size_t GridWindow::index_of(const DyadicCube& q) const {
  if (q.dim() != n_ || q.level < j_min_ || q.level > j_max_) return total_;
  const int li = q.level - j_min_;
  std::size_t idx = 0;
  for (int i = 0; i < n_; ++i) {
    if (q.offset[i] < lo_[li][i] || q.offset[i] >= hi_[li][i]) return total_;
    idx = idx * static_cast<std::size_t>(hi_[li][i] - lo_[li][i]) + static_cast<std::size_t>(q.offset[i] - lo_[li][i]);
  }
  return begin_[li] + idx;
}

std::vector<DyadicCube> GridWindow::cubes() const {
  std::vector<DyadicCube> out;
  out.reserve(total_);
  for (std::size_t i = 0; i < total_; ++i) out.push_back(cube(i));
  return out;
}

std::vector<DyadicCube> GridWindow::level_cubes(int j) const {
  std::vector<DyadicCube> out;
  if (j < j_min_ || j > j_max_) return out;
  for (std::size_t i = level_begin(j); i < level_begin(j) + level_size(j); ++i) out.push_back(cube(i));
  return out;
}

bool GridWindow::operator==(const GridWindow& other) const {
  return n_ == other.n_ && j_min_ == other.j_min_ && j_max_ == other.j_max_ && lo_ == other.lo_ && hi_ == other.hi_;
}

GridWindow build_window(int n, int j_min, int j_max, const Box& box) { return GridWindow(n, j_min, j_max, box); }

}  // namespace owlab
