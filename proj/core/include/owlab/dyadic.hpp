#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace owlab {

// Q = 2^{-j}([0,1)^n + k)
struct DyadicCube {
  int level = 0;
  std::vector<std::int64_t> offset;

  DyadicCube() = default;
  DyadicCube(int j, std::vector<std::int64_t> k) : level(j), offset(std::move(k)) {}

  int dim() const { return static_cast<int>(offset.size()); }
  double side() const;
  double volume() const;
  // Lower-left corner 2^{-j} k.
  std::vector<double> anchor() const;
  std::vector<double> upper() const;

  DyadicCube parent() const;
  DyadicCube ancestor(int j) const;  // requires j <= level
  std::vector<DyadicCube> children() const;
  bool contains(const DyadicCube& other) const;
  bool contains_point(const double* x) const;

  std::string to_string() const;  // "(j,k1,...,kn)"

  // Level first, then lexicographic offset.
  auto operator<=>(const DyadicCube&) const = default;
  bool operator==(const DyadicCube&) const = default;
};

// Floor of a / 2^shift for signed a.
std::int64_t floor_shift(std::int64_t a, int shift);

// Axis-aligned box [lo, hi) in R^n.  A cube when all sides agree.
struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  double max_side() const;
  static Box of(const DyadicCube& q);
  static Box unit(int n);
  static Box interval(double a, double b) { return Box{{a}, {b}}; }
};

struct BabcParams {
  double a = 0.0, b = 0.0, c = 0.0;
};

// (1+l(R)/l(Q))^a (1+l(Q)/l(R))^b (1+|x_Q-x_R|/max(l(Q),l(R)))^c.
// Any real exponents are accepted here; almost-diagonal kernels use negative ones.
double babc_kernel(double a, double b, double c, const DyadicCube& q, const DyadicCube& r);
double babc_kernel(const BabcParams& params, const DyadicCube& q, const DyadicCube& r);

// Smallest axis-aligned cube containing Q and R, anchored at the componentwise minimum.
Box min_containing(const DyadicCube& q, const DyadicCube& r);

// All dyadic cubes of levels j_min..j_max meeting a fixed box, in (level, lexicographic) order.
class GridWindow {
 public:
  GridWindow() = default;
  GridWindow(int n, int j_min, int j_max, Box box);

  int dim() const { return n_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  const Box& box() const { return box_; }

  std::size_t size() const { return total_; }
  std::size_t level_size(int j) const;
  std::size_t level_begin(int j) const;  // index of the first cube of level j
  const std::vector<std::int64_t>& k_lo(int j) const { return lo_[j - j_min_]; }
  const std::vector<std::int64_t>& k_hi(int j) const { return hi_[j - j_min_]; }  // exclusive

  DyadicCube cube(std::size_t index) const;
  // Returns size() when the cube is not in the window.
  std::size_t index_of(const DyadicCube& q) const;
  bool contains(const DyadicCube& q) const { return index_of(q) != total_; }
  std::vector<DyadicCube> cubes() const;
  std::vector<DyadicCube> level_cubes(int j) const;

  bool operator==(const GridWindow& other) const;

 private:
  int n_ = 0, j_min_ = 0, j_max_ = -1;
  Box box_;
  std::vector<std::vector<std::int64_t>> lo_, hi_;
  std::vector<std::size_t> begin_;
  std::size_t total_ = 0;
};

GridWindow build_window(int n, int j_min, int j_max, const Box& box);

}  // namespace owlab
