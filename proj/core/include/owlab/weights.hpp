#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <vector>

#include "owlab/dyadic.hpp"

namespace owlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// l^u norm on R^m, u in [1, inf].
double lp_norm(const Vec& y, double u);
// Same, filling the (sub)gradient d|y|_u / dy.
double lp_norm_grad(const Vec& y, double u, Vec* grad);
// Hoelder conjugate; p' = inf for p <= 1.
double conjugate_exponent(double p);

struct TargetSpace {
  int m = 1;
  double u = 2.0;
};

struct Quadrature {
  int nodes = 64;  // midpoint nodes per axis per cube
};

// Normalized cubature rule on a box: weights sum to one.
struct NodeRule {
  int n = 1;
  std::vector<double> points;  // size() * n, row major
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t k) const { return points.data() + k * n; }
};

// Mean of |x - c|^gamma over [lo, hi], from the exact antiderivative split at c.
// Returns +inf when the integral diverges.
double power_mean_1d(double lo, double hi, double c, double gamma);

class WeightModel {
 public:
  enum class Kind { Identity, DiagonalPower, DiagonalLog, BlockBMO, PiecewiseConstant };

  static WeightModel identity(int n, int m, double u = 2.0);
  // V(x) = diag(|x - c_i|^{beta_i})
  static WeightModel diagonal_power(std::vector<std::vector<double>> centers, std::vector<double> exponents,
                                    double u = 2.0);
  // V(x) = diag(log|x - c_i|)
  static WeightModel diagonal_log(std::vector<std::vector<double>> centers, double u = 2.0);
  // Uniform grid of cells over box, values in row-major cell order (last axis fastest).
  static WeightModel piecewise_constant(Box box, std::vector<int> cells, std::vector<Mat> values, double u = 2.0);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  int m() const { return target_.m; }
  const TargetSpace& target() const { return target_; }
  WeightModel with_target_exponent(double u) const;

  Mat matrix_at(const double* x) const;
  Vec apply(const double* x, const Vec& e) const;

  bool is_diagonal() const;
  // Diagonal entries v_i(x); only for diagonal models.
  Vec diagonal_at(const double* x) const;
  // True when coordinate_power_mean is exact (1D powers, piecewise constants, identity).
  bool coordinate_means_exact() const;
  // fint_Q |v_i|^gamma for diagonal models.
  double coordinate_power_mean(const Box& q, int i, double gamma, const Quadrature& quad) const;

  // V^{-*} acting on the dual target (exponent u').
  WeightModel inverse_adjoint() const;
  // Copy with every singular center rounded to the nearest multiple of h.
  WeightModel snapped(double h) const;

  NodeRule rule_on(const Box& q, const Quadrature& quad) const;
  // Integral over q of |V(x) e|^p.
  double integrate_norm_pow(const Box& q, double p, const Vec& e, const Quadrature& quad) const;

  const std::vector<std::vector<double>>& centers() const { return centers_; }
  const std::vector<double>& exponents() const { return exponents_; }
  const WeightModel& inner() const { return *inner_; }
  bool is_inverse_adjoint_block() const { return adjoint_inverse_; }
  const Box& cell_box() const { return pc_box_; }
  const std::vector<int>& cells() const { return pc_cells_; }
  const std::vector<Mat>& cell_values() const { return pc_values_; }

  friend WeightModel make_bmo_block_weight(const WeightModel& inner);

 private:
  WeightModel() = default;
  std::size_t pc_cell_of(const double* x) const;
  NodeRule pc_rule(const Box& q) const;

  Kind kind_ = Kind::Identity;
  int n_ = 1;
  TargetSpace target_;
  std::vector<std::vector<double>> centers_;
  std::vector<double> exponents_;
  std::shared_ptr<const WeightModel> inner_;
  bool adjoint_inverse_ = false;
  Box pc_box_;
  std::vector<int> pc_cells_;
  std::vector<Mat> pc_values_;
  bool pc_diagonal_ = false;
};

// V(x) = [[I, 0], [B(x), I]] on 2m coordinates; V^{-1} = [[I, 0], [-B(x), I]].
WeightModel make_bmo_block_weight(const WeightModel& inner);

// rho_{L^p(Q,V)} frozen on one box: closed form for diagonal weights when the target
// exponent equals p (or m = 1), otherwise sampled on the quadrature rule.
class CubeNorm {
 public:
  CubeNorm(const WeightModel& v, const Box& q, double p, const Quadrature& quad = {});

  double p() const { return p_; }
  int m() const { return m_; }
  double target_exponent() const { return u_; }
  bool is_identity() const { return mode_ == Mode::Identity; }
  bool closed_form() const { return mode_ != Mode::Sampled; }
  // fint_Q |v_i|^p in closed-form mode.
  const Vec& coefficients() const { return coeffs_; }

  double operator()(const Vec& e) const { return eval(e, nullptr); }
  double eval(const Vec& e, Vec* grad) const;
  // min over quadrature nodes of |V(y) e|.
  double essinf(const Vec& e, Vec* grad) const;
  std::size_t node_count() const;

 private:
  enum class Mode { Identity, Closed, Sampled };
  void sample() const;

  std::shared_ptr<const WeightModel> model_;
  Box box_;
  Quadrature quad_;
  double p_, u_;
  int m_;
  Mode mode_;
  Vec coeffs_;
  Vec guard_;  // exact coordinate means used to detect divergence in sampled mode
  mutable bool sampled_ = false;
  mutable bool diag_ = false;
  mutable std::vector<double> w_;
  mutable Mat diag_nodes_;  // m x K
  mutable std::vector<Mat> mat_nodes_;
};

double rho_lp(const WeightModel& v, const Box& q, double p, const Vec& e, const Quadrature& quad = {});
double rho_lp(const WeightModel& v, const DyadicCube& q, double p, const Vec& e, const Quadrature& quad = {});

}  // namespace owlab
