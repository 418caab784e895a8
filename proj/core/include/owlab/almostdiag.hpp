#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "owlab/dyadic.hpp"
#include "owlab/seqspace.hpp"
#include "owlab/weights.hpp"

namespace owlab {

struct ADParams {
  double D = 0.0, E = 0.0, F = 0.0;
};

// Cube-indexed matrix over a window, dense or evaluated on demand.
class ADMatrix {
 public:
  enum class Source { Canonical, Table };
  static constexpr std::size_t kDenseLimit = 4096;

  ADMatrix() = default;
  // b_QR = B_{-E,-F,-D}(Q,R).
  static ADMatrix canonical(const ADParams& params, const GridWindow& window, std::size_t dense_limit = kDenseLimit);
  // User table; the bound constant is measured against B_{-E,-F,-D}.
  static ADMatrix table(const GridWindow& window, Mat entries, const ADParams& params);

  const GridWindow& window() const { return window_; }
  const ADParams& params() const { return params_; }
  Source source() const { return source_; }
  bool dense() const { return dense_; }
  // Smallest C with |b_QR| <= C B_{-E,-F,-D}(Q,R).
  double bound_constant() const { return bound_; }

  double entry(std::size_t qi, std::size_t ri) const;
  double entry(const DyadicCube& q, const DyadicCube& r) const;
  // Stored entries; only meaningful when dense().
  const Mat& entries() const { return b_; }
  Mat to_dense() const;
  ADMatrix transpose() const;

 private:
  GridWindow window_;
  ADParams params_;
  Source source_ = Source::Canonical;
  bool dense_ = true;
  double bound_ = 1.0;
  Mat b_;
  std::vector<DyadicCube> cubes_;
};

// (Bt)_Q = sum_R b_QR t_R over the window.
DyadicSequence ad_apply(const ADMatrix& b, const DyadicSequence& t);

struct ComposeCheck {
  double ratio = 0.0;
  DyadicCube q, r;  // pair attaining the ratio
  ADParams combined;
};

// max_{Q,R} sum_P B1(Q,P) B2(P,R) / B_{-E,-F,-D}(Q,R) with each of D,E,F the smaller of the two.
ComposeCheck ad_compose_check(const ADParams& p1, const ADParams& p2, const GridWindow& window);

struct OpnormEstimate {
  double value = 0.0;
  std::string probe;  // description of the maximizing probe
  std::size_t probes = 0;
};

// max |Bt| / |t| over a fixed probe set: coordinate sequences, 16 seeded +-1 sequences,
// and single-level indicator stacks.  m is the coefficient dimension.
OpnormEstimate ad_opnorm_estimate(const ADMatrix& b, const SpaceParams& params, const NormSource& source, int m);

// One "(j,k..) (j',k'..) value" line per nonzero entry.
void write_ad_matrix(std::ostream& os, const ADMatrix& b);
ADMatrix read_ad_matrix(std::istream& is, const GridWindow& window, const ADParams& params);

struct SharpAdRow {
  int M = 0;
  double lhs = 0.0;
  double norm = 0.0;  // |t| over levels 3..M
};

struct SharpAdResult {
  std::vector<SharpAdRow> rows;
  double slope = 0.0;            // of log2 lhs against M
  double corrected_slope = 0.0;  // of log2 (M lhs), removing the 1/M factor of the coefficients
};

// Lower-bound side of the layer-average estimate with v(x) = |x|^{(beta-1)/p}, u = 1, and the
// coefficient sequence supported on levels j >= 3 with nine neighbours per cube.
SharpAdResult sharp_ad_experiment(double p, double beta, int m_min, int m_max, const Quadrature& quad = {});

// The same level-M quantities through the generic weight and sequence machinery; small M only.
SharpAdRow sharp_ad_reference(double p, double beta, int M, const Quadrature& quad = {});

}  // namespace owlab
