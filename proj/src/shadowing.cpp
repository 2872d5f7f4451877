#include "fiberdyn/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiberdyn/error.hpp"

namespace fiberdyn {

namespace {

void require_affine(const SkewSystem &sys) {
  if (!sys.globally_affine_hyperbolic()) {
    throw Error(ErrorKind::NotAffine,
                "shadowing needs a single hyperbolic matrix with affine "
                "stable and unstable lines");
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw Error(ErrorKind::EpsilonTooLarge, "epsilon must lie in (0, 1/4)");
  }
}

using LVec = std::array<long double, 2>;

long double dot(const LVec &a, const LVec &b) { return a[0] * b[0] + a[1] * b[1]; }
long double sup_norm(const LVec &a) { return std::max(std::abs(a[0]), std::abs(a[1])); }
LVec add(const LVec &a, const LVec &b, long double k) {
  return {a[0] + k * b[0], a[1] + k * b[1]};
}

}  // namespace

OmegaSpecification::OmegaSpecification(BasePoint omega,
                                       std::vector<SpecInterval> intervals,
                                       int spacing)
    : omega_(omega), intervals_(std::move(intervals)), spacing_(spacing) {
  if (intervals_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "a specification needs an interval");
  }
  if (spacing_ < 0) throw Error(ErrorKind::InvalidArgument, "negative spacing");
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (intervals_[i].a > intervals_[i].b) {
      throw Error(ErrorKind::InvalidArgument, "interval with a > b");
    }
    if (i > 0 && !(intervals_[i].a > intervals_[i - 1].b + spacing_)) {
      throw Error(ErrorKind::InvalidArgument,
                  "intervals must satisfy a_{i+1} > b_i + spacing");
    }
  }
}

WideFiberPoint OmegaSpecification::point_at(const SkewSystem &sys,
                                            std::size_t k,
                                            std::int64_t t) const {
  const SpecInterval &iv = intervals_.at(k);
  if (t < iv.a || t > iv.b) {
    throw Error(ErrorKind::InvalidArgument, "time outside the interval");
  }
  const BasePoint start = base_step(sys.base(), omega_, iv.a);
  return fiber_step(sys, start, widen(iv.anchor), t - iv.a);
}

double AffineManifold::line_residual(const FiberPoint &p) const {
  const Vec2 v = offset(base, p);
  return std::abs(v[0] * direction[1] - v[1] * direction[0]);
}

bool AffineManifold::contains(const FiberPoint &p, double tol) const {
  const Vec2 v = offset(base, p);
  const double along = v[0] * direction[0] + v[1] * direction[1];
  return line_residual(p) <= tol && std::abs(along) <= half_length + tol;
}

AffineManifold stable_manifold(const HyperbolicFrame &frame,
                               const FiberPoint &x, double half_length) {
  return {x, frame.stable, half_length};
}

AffineManifold unstable_manifold(const HyperbolicFrame &frame,
                                 const FiberPoint &x, double half_length) {
  return {x, frame.unstable, half_length};
}

double local_product_radius(const HyperbolicFrame &frame, double epsilon) {
  return 0.5 * epsilon * frame.sin_angle();
}

FiberPoint local_product(const FiberPoint &x, const FiberPoint &y,
                         double epsilon, const HyperbolicFrame &frame) {
  const double radius = local_product_radius(frame, epsilon);
  const double d = torus_distance(x, y);
  if (!(d < radius)) {
    throw Error(ErrorKind::PointsTooFar,
                "points are " + std::to_string(d) +
                    " apart; local product needs < " + std::to_string(radius));
  }
  // y - x = s e^s - u e^u with z = x + s e^s = y + u e^u.
  const Vec2 us = frame.coordinates(offset(x, y));
  return translate(x, frame.vector(0.0, us[1]));
}

int unstable_crossing_gap(const SkewSystem &sys, double epsilon) {
  require_affine(sys);
  check_epsilon(epsilon);
  const double lambda = hyperbolic_frame(sys).lambda_u;
  const double gamma = epsilon / 8.0;
  for (int n = 1; n < 1000; ++n) {
    const double grown = std::pow(lambda, n);
    if (grown * gamma > std::sqrt(2.0) + 1.0 && 1.0 / grown <= 0.5) return n;
  }
  throw Error(ErrorKind::NotHyperbolic, "expansion too weak for a crossing");
}

bool parallelogram_covers_torus(const HyperbolicFrame &frame,
                                double unstable_half, double stable_half) {
  // The integer lattice in frame coordinates scaled to the unit square. A
  // basis with sup-norms summing to <= 2 leaves every point within sup
  // distance 1 of the lattice, by rounding its basis coefficients.
  const Vec2 c1 = frame.coordinates({1.0, 0.0});
  const Vec2 c2 = frame.coordinates({0.0, 1.0});
  LVec b1{c1[0] / unstable_half, c1[1] / stable_half};
  LVec b2{c2[0] / unstable_half, c2[1] / stable_half};
  for (int iter = 0; iter < 200; ++iter) {
    if (dot(b1, b1) > dot(b2, b2)) std::swap(b1, b2);
    const long double mu = std::round(dot(b1, b2) / dot(b1, b1));
    if (mu == 0.0L) break;
    b2 = add(b2, b1, -mu);
  }
  const LVec sum = add(b1, b2, 1.0L), diff = add(b1, b2, -1.0L);
  const long double best = std::min(
      {sup_norm(b1) + sup_norm(b2), sup_norm(b1) + sup_norm(sum),
       sup_norm(b1) + sup_norm(diff), sup_norm(b2) + sup_norm(sum),
       sup_norm(b2) + sup_norm(diff)});
  return best <= 2.0L * (1.0L - 1e-12L);
}

int mixing_gap(const SkewSystem &sys, double epsilon) {
  const int start = unstable_crossing_gap(sys, epsilon);
  const HyperbolicFrame frame = hyperbolic_frame(sys);
  const double gamma = epsilon / 8.0;
  for (int n = start; n < 1000; ++n) {
    if (parallelogram_covers_torus(frame, gamma * std::pow(frame.lambda_u, n),
                                   gamma)) {
      return n;
    }
  }
  throw Error(ErrorKind::NotHyperbolic, "no certified crossing gap found");
}

namespace {

template <class Word>
ShadowingCheck verify_impl(const SkewSystem &sys, const OmegaSpecification &spec,
                           BasicFiberPoint<Word> x, double epsilon) {
  const DrivingSystem &base = sys.base();
  const auto &ivs = spec.intervals();
  ShadowingCheck out;
  out.passed = true;
  std::int64_t now = 0;
  BasePoint w = spec.omega();
  for (std::size_t k = 0; k < ivs.size(); ++k) {
    x = fiber_step(sys, w, x, ivs[k].a - now);
    w = base_step(base, w, ivs[k].a - now);
    now = ivs[k].a;
    BasicFiberPoint<Word> p;
    if constexpr (std::is_same_v<Word, Turn>) {
      p = ivs[k].anchor;
    } else {
      p = widen(ivs[k].anchor);
    }
    double worst = 0.0;
    for (std::int64_t t = ivs[k].a;; ++t) {
      const double d = torus_distance(x, p);
      out.distances.push_back({t, k, d});
      worst = std::max(worst, d);
      if (d > out.max_distance) {
        out.max_distance = d;
        out.worst_t = t;
        out.worst_interval = k;
      }
      if (!(d < epsilon)) out.passed = false;
      if (t == ivs[k].b) break;
      const AffineStep step = sys.step_at(w);
      x = step.apply(x);
      p = step.apply(p);
      w = base_step(base, w, 1);
      ++now;
    }
    out.interval_max.push_back(worst);
  }
  return out;
}

struct PreciseCoordinates {
  Real u, s;
};

PreciseCoordinates precise_coordinates(const PreciseFrame &f, const Real &v0,
                                       const Real &v1) {
  const Real det = f.eu[0] * f.es[1] - f.es[0] * f.eu[1];
  return {(v0 * f.es[1] - f.es[0] * v1) / det,
          (f.eu[0] * v1 - v0 * f.eu[1]) / det};
}

// The point target + s e^s, |s| <= gamma, congruent to p + u e^u with
// |u| <= reach. Among admissible lattice lifts the one with the smallest |s|
// is used.
WideFiberPoint glue(const WideFiberPoint &p, const WideFiberPoint &target,
                    const HyperbolicFrame &frame, const PreciseFrame &pf,
                    double reach, double gamma) {
  const Vec2 w = offset(p, target);
  const Vec2 col1 = frame.coordinates({1.0, 0.0});
  const Vec2 col2 = frame.coordinates({0.0, 1.0});
  const Vec2 cw = frame.coordinates(w);
  if (std::abs(col2[1]) < 1e-12) {
    throw Error(ErrorKind::NotHyperbolic, "degenerate stable direction");
  }
  const double slack = 1.0 + 1e-9;
  const double r1 = reach * std::abs(frame.unstable[0]) +
                    gamma * std::abs(frame.stable[0]);
  const auto lo1 = static_cast<std::int64_t>(std::ceil(w[0] - r1));
  const auto hi1 = static_cast<std::int64_t>(std::floor(w[0] + r1));

  bool found = false;
  std::int64_t best1 = 0, best2 = 0;
  double best_s = std::numeric_limits<double>::infinity();
  for (std::int64_t m1 = lo1; m1 <= hi1; ++m1) {
    // c_s(m) = m1 col1_s + m2 col2_s - cw_s must lie in [-gamma, gamma].
    const double base_s = static_cast<double>(m1) * col1[1] - cw[1];
    double a = (-gamma * slack - base_s) / col2[1];
    double b = (gamma * slack - base_s) / col2[1];
    if (a > b) std::swap(a, b);
    for (auto m2 = static_cast<std::int64_t>(std::ceil(a));
         m2 <= static_cast<std::int64_t>(std::floor(b)); ++m2) {
      const double cu = static_cast<double>(m1) * col1[0] +
                        static_cast<double>(m2) * col2[0] - cw[0];
      const double cs = base_s + static_cast<double>(m2) * col2[1];
      if (std::abs(cu) <= reach * slack && std::abs(cs) < best_s) {
        found = true;
        best_s = std::abs(cs);
        best1 = m1;
        best2 = m2;
      }
    }
  }
  if (!found) {
    throw Error(ErrorKind::SpacingTooSmall,
                "expanded unstable segment misses the next stable segment");
  }

  const Real v0 = Real(best1) - signed_wide_to_real(target.c[0] - p.c[0]);
  const Real v1 = Real(best2) - signed_wide_to_real(target.c[1] - p.c[1]);
  const Real s = precise_coordinates(pf, v0, v1).s;
  WideFiberPoint z = target;
  z.c[0] += wide_from_real(s * pf.es[0]);
  z.c[1] += wide_from_real(s * pf.es[1]);
  return z;
}

}  // namespace

ShadowingCheck verify_shadowing(const SkewSystem &sys,
                                const OmegaSpecification &spec,
                                const WideFiberPoint &x, double epsilon) {
  return verify_impl(sys, spec, x, epsilon);
}

ShadowingCheck verify_shadowing(const SkewSystem &sys,
                                const OmegaSpecification &spec,
                                const FiberPoint &x, double epsilon) {
  return verify_impl(sys, spec, x, epsilon);
}

ShadowResult shadow(const SkewSystem &sys, const OmegaSpecification &spec,
                    double epsilon) {
  require_affine(sys);
  check_epsilon(epsilon);
  const int gap = mixing_gap(sys, epsilon);
  // A single segment needs no gluing, so its spacing is irrelevant.
  if (spec.intervals().size() > 1 && spec.spacing() < gap) {
    throw Error(ErrorKind::SpacingTooSmall,
                "spacing " + std::to_string(spec.spacing()) +
                    " is below the mixing gap " + std::to_string(gap));
  }
  const HyperbolicFrame frame = hyperbolic_frame(sys);
  const PreciseFrame pf = precise_frame(sys.matrix());
  const double gamma = epsilon / 8.0;
  const double reach = gamma * std::pow(frame.lambda_u, gap);
  const DrivingSystem &base = sys.base();
  const auto &ivs = spec.intervals();

  ShadowResult out;
  out.mixing_gap = gap;
  out.gamma = gamma;

  // x_{a_1} = P(a_1); each later x_{a_{k+1}} sits on the stable line of
  // P(a_{k+1}) and on the pushed-forward unstable line of x_{a_k}.
  WideFiberPoint xk = widen(ivs[0].anchor);
  std::vector<WideFiberPoint> ends;
  for (std::size_t k = 0; k + 1 < ivs.size(); ++k) {
    const BasePoint wa = base_step(base, spec.omega(), ivs[k].a);
    const WideFiberPoint y = fiber_step(sys, wa, xk, ivs[k].b - ivs[k].a);
    ends.push_back(y);
    const BasePoint wb = base_step(base, spec.omega(), ivs[k].b);
    const WideFiberPoint p = fiber_step(sys, wb, y, ivs[k + 1].a - ivs[k].b);
    xk = glue(p, widen(ivs[k + 1].anchor), frame, pf, reach, gamma);
  }
  const std::int64_t last = ivs.back().a;
  out.point = fiber_step(sys, base_step(base, spec.omega(), last), xk, -last);
  out.rounded = narrow(out.point);
  out.certificate = verify_shadowing(sys, spec, out.point, epsilon);

  // Offsets at the segment ends are pure unstable and summed geometrically.
  for (std::size_t j = 0; j < ends.size(); ++j) {
    const WideFiberPoint at =
        fiber_step(sys, spec.omega(), out.point, ivs[j].b);
    const PreciseCoordinates c = precise_coordinates(
        pf, signed_wide_to_real(at.c[0] - ends[j].c[0]),
        signed_wide_to_real(at.c[1] - ends[j].c[1]));
    LedgerEntry e;
    e.interval = j;
    e.unstable_offset = std::abs(static_cast<double>(c.u));
    e.stable_offset = std::abs(static_cast<double>(c.s));
    e.bound = 2.0 * gamma;
    if (!(e.unstable_offset <= e.bound && e.stable_offset <= 1e-30)) {
      out.ledger_ok = false;
    }
    out.ledger.push_back(e);
  }
  return out;
}

}  // namespace fiberdyn
