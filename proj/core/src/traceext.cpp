#include "owlab/traceext.hpp"

#include <algorithm>
#include <cmath>

#include "owlab/errors.hpp"
#include "owlab/estimators.hpp"

namespace owlab {

DyadicCube lifted_cube(const DyadicCube& i, TraceOffset k) {
  DyadicCube q = i;
  q.offset.push_back(k.k);
  return q;
}

GridWindow lifted_window(const GridWindow& source, TraceOffset k) {
  Box box = source.box();
  double lo = kInf, hi = -kInf;
  for (int j = source.j_min(); j <= source.j_max(); ++j) {
    lo = std::min(lo, std::ldexp(static_cast<double>(k.k), -j));
    hi = std::max(hi, std::ldexp(static_cast<double>(k.k + 1), -j));
  }
  box.lo.push_back(lo);
  box.hi.push_back(hi);
  return build_window(source.dim() + 1, source.j_min(), source.j_max(), box);
}

DyadicSequence lift_sequence(const DyadicSequence& u, TraceOffset k) {
  const auto& w = u.window();
  DyadicSequence t(lifted_window(w, k), u.m());
  for (const auto i : u.support()) {
    const DyadicCube c = w.cube(i);
    t.set(lifted_cube(c, k), std::sqrt(c.side()) * u.at(i));
  }
  return t;
}

DyadicSequence restrict_sequence(const DyadicSequence& t, TraceOffset k) {
  const auto& w = t.window();
  if (w.dim() < 2) throw PreconditionError("restrict_sequence needs dimension at least 2");
  Box box = w.box();
  box.lo.pop_back();
  box.hi.pop_back();
  DyadicSequence u(build_window(w.dim() - 1, w.j_min(), w.j_max(), box), t.m());
  const auto& uw = u.window();
  for (std::size_t i = 0; i < uw.size(); ++i) {
    const DyadicCube c = uw.cube(i);
    const auto ti = w.index_of(lifted_cube(c, k));
    if (ti == w.size() || !t.nonzero(ti)) continue;
    u.set(i, t.at(ti) / std::sqrt(c.side()));
  }
  return u;
}

NormFamily trace_pullback(const NormFamily& rho, TraceOffset k) {
  return NormFamily::table([rho, k](const DyadicCube& i, const Vec& e) { return rho(lifted_cube(i, k), e); },
                           rho.meta());
}

SpaceParams trace_source_params(const SpaceParams& target) {
  SpaceParams s;
  s.s = target.s - 1.0 / target.p;
  s.p = target.p;
  s.q = target.kind == SpaceKind::Besov ? target.q : target.p;
  s.kind = SpaceKind::Besov;
  return s;
}

TraceCheck trace_norm_check(const DyadicSequence& u, TraceOffset k, const SpaceParams& target, const NormSource& rho,
                            const NormSource& d, std::uint64_t seed) {
  if (const auto* pw = std::get_if<PointwiseWeight>(&rho); pw && pw->v.dim() != u.window().dim() + 1)
    throw PreconditionError("trace_norm_check: target weight must live in one dimension more than the sequence");
  if (const auto* pw = std::get_if<PointwiseWeight>(&d); pw && pw->v.dim() != u.window().dim())
    throw PreconditionError("trace_norm_check: source weight dimension does not match the sequence");
  TraceCheck out;
  out.lifted_norm = seq_norm(lift_sequence(u, k), target, rho);
  out.source_norm = seq_norm(u, trace_source_params(target), d);
  out.ratio = out.source_norm > 0 ? out.lifted_norm / out.source_norm : (out.lifted_norm > 0 ? kInf : 1.0);

  const auto* fr = std::get_if<NormFamily>(&rho);
  const auto* fd = std::get_if<NormFamily>(&d);
  if (fr && fd) {
    out.transfer_min = kInf;
    out.transfer_max = 0.0;
    const auto dirs = probe_directions(u.m(), 8, seed);
    const auto& w = u.window();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const DyadicCube c = w.cube(i);
      for (const auto& e : dirs) {
        const double r = (*fd)(c, e) / (*fr)(lifted_cube(c, k), e);
        out.transfer_min = std::min(out.transfer_min, r);
        out.transfer_max = std::max(out.transfer_max, r);
      }
    }
  }
  return out;
}

}  // namespace owlab
