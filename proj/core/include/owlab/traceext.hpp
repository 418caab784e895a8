#pragma once

#include <cstdint>
#include <vector>

#include "owlab/seqspace.hpp"

namespace owlab {

// Slab index k of the lifted cubes Q(I,k) = I x [k l(I), (k+1) l(I)).
struct TraceOffset {
  std::int64_t k = 0;
};

DyadicCube lifted_cube(const DyadicCube& i, TraceOffset k);

// Window in R^n holding every Q(I,k) for I in the (n-1)-dimensional window.
GridWindow lifted_window(const GridWindow& source, TraceOffset k);

// u_I -> l(I)^{1/2} u_I placed on Q(I,k).
DyadicSequence lift_sequence(const DyadicSequence& u, TraceOffset k);
// t -> l(I)^{-1/2} t_{Q(I,k)} over the projection of t's window.
DyadicSequence restrict_sequence(const DyadicSequence& t, TraceOffset k);

// d_I := rho_{Q(I,k)}
NormFamily trace_pullback(const NormFamily& rho, TraceOffset k);

struct TraceCheck {
  double lifted_norm = 0.0;  // in the n-dimensional space
  double source_norm = 0.0;  // in the Besov space of smoothness s - 1/p
  double ratio = 0.0;
  // min and max of d_I(e) / rho_{Q(I,k)}(e) over window cubes and probe directions;
  // zero when either side is not a norm family.
  double transfer_min = 0.0, transfer_max = 0.0;
};

// Source parameters are (s - 1/p, p, r) with r = q for Besov targets and r = p for TL targets.
SpaceParams trace_source_params(const SpaceParams& target);

TraceCheck trace_norm_check(const DyadicSequence& u, TraceOffset k, const SpaceParams& target,
                            const NormSource& rho, const NormSource& d, std::uint64_t seed = 0xA9);

}  // namespace owlab
