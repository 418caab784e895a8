#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <variant>
#include <vector>

#include "owlab/dyadic.hpp"
#include "owlab/weights.hpp"

namespace owlab {

enum class SpaceKind { Besov, TL };

struct SpaceParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;  // may be +inf
  SpaceKind kind = SpaceKind::Besov;

  // n / min(1, p) for Besov, n / min(1, p, q) for TL.
  double J(int n) const;
  // n / min(p, u) for Besov, n / min(p, q, u) for TL.
  double J_u(int n, double u) const;
};

// (u, a, b, c) contract attached to a norm family.
struct NormMeta {
  double u = 1.0, a = 0.0, b = 0.0, c = 0.0;
};

// Per-cube quasi-norms rho_Q.
class NormFamily {
 public:
  using Fn = std::function<double(const DyadicCube&, const Vec&)>;

  // rho_Q = rho_{L^r(Q,V)}, cached per cube.
  static NormFamily from_weight(const WeightModel& v, double r, const Quadrature& quad = {}, NormMeta meta = {});
  // rho_Q = |.|_u on every cube.
  static NormFamily absolute(double u = 2.0, NormMeta meta = {});
  static NormFamily table(Fn fn, NormMeta meta = {});

  double operator()(const DyadicCube& q, const Vec& e) const;
  const NormMeta& meta() const;
  NormFamily with_meta(NormMeta meta) const;
  // Weight and exponent for weight-derived families, nullptr otherwise.
  const WeightModel* weight() const;
  double exponent() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// rho_Q(t_Q) replaced by the pointwise integrand |V(x) t_Q| in the norm.
struct PointwiseWeight {
  WeightModel v;
  Quadrature quad;
};

using NormSource = std::variant<NormFamily, PointwiseWeight>;

class DyadicSequence {
 public:
  DyadicSequence() = default;
  DyadicSequence(GridWindow window, int m);

  const GridWindow& window() const { return window_; }
  int m() const { return m_; }
  std::size_t size() const { return window_.size(); }

  Vec at(std::size_t index) const;
  Vec get(const DyadicCube& q) const;  // zero outside the window
  void set(std::size_t index, const Vec& v);
  void set(const DyadicCube& q, const Vec& v);
  bool nonzero(std::size_t index) const;
  std::vector<std::size_t> support() const;
  std::size_t support_size() const { return support().size(); }
  double max_abs() const;

  DyadicSequence& operator+=(const DyadicSequence& o);
  DyadicSequence& operator*=(double a);
  friend DyadicSequence operator+(DyadicSequence a, const DyadicSequence& b) { return a += b; }
  friend DyadicSequence operator*(double a, DyadicSequence b) { return b *= a; }

  const std::vector<double>& data() const { return data_; }

 private:
  GridWindow window_;
  int m_ = 1;
  std::vector<double> data_;
};

// Random coefficients in [-1, 1] on each cube, kept with the given probability.
DyadicSequence random_sequence(const GridWindow& window, int m, std::uint64_t seed, double density = 1.0);

// t_j(x) = t_Q / |Q|^{1/2} for the level-j cube Q containing x.
Vec layer_eval(const DyadicSequence& t, int j, const double* x);

double seq_norm(const DyadicSequence& t, const SpaceParams& params, const NormSource& source);

// Scalar sequence rho_Q(t_Q)^u l(Q)^{n(1-u)/2}.
DyadicSequence rescale_map(const DyadicSequence& t, const NormFamily& rho, double u);
// Parameters of the rescaled space: (s u, p / u, q / u).
SpaceParams rescaled_params(const SpaceParams& params, double u);

struct SingleCubeBound {
  bool holds = true;
  double lhs = 0.0;  // rho_R(t_R)
  double rhs = 0.0;  // l(R)^s |R|^{1/2-1/p} |t|
};

SingleCubeBound single_cube_bound(const DyadicSequence& t, const DyadicCube& r, const NormSource& source,
                                  const SpaceParams& params);

// Header line "dyadic_sequence n <n> m <m> levels <jmin> <jmax> box <lo1> <hi1> ...",
// then one line "j k1 .. kn v1 .. vm" per nonzero cube.
void write_sequence(std::ostream& os, const DyadicSequence& t);
DyadicSequence read_sequence(std::istream& is);

}  // namespace owlab
