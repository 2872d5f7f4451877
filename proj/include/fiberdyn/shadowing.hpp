#pragma once

// Constructive fiber specification for affine hyperbolic fiber maps: orbit
// segments with large enough gaps are glued into one true orbit by sliding
// along stable and unstable lines.

#include <cstdint>
#include <vector>

#include "fiberdyn/skew_system.hpp"

namespace fiberdyn {

struct SpecInterval {
  std::int64_t a = 0, b = 0;  // inclusive time range
  FiberPoint anchor;          // P(a); the rest of the segment is its orbit
};

class OmegaSpecification {
 public:
  // Requires a <= b in every interval and a_{i+1} > b_i + spacing.
  OmegaSpecification(BasePoint omega, std::vector<SpecInterval> intervals,
                     int spacing);

  const BasePoint &omega() const { return omega_; }
  const std::vector<SpecInterval> &intervals() const { return intervals_; }
  int spacing() const { return spacing_; }

  // P(t) for t in interval k, iterated from the anchor.
  WideFiberPoint point_at(const SkewSystem &sys, std::size_t k,
                          std::int64_t t) const;

 private:
  BasePoint omega_;
  std::vector<SpecInterval> intervals_;
  int spacing_;
};

// The segment {base + t * direction : |t| <= half_length}.
struct AffineManifold {
  FiberPoint base;
  Vec2 direction{1, 0};
  double half_length = 0.0;

  // Distance from p to the segment's line, and whether p lies on the
  // segment within `tol`.
  double line_residual(const FiberPoint &p) const;
  bool contains(const FiberPoint &p, double tol) const;
};

AffineManifold stable_manifold(const HyperbolicFrame &frame,
                               const FiberPoint &x, double half_length);
AffineManifold unstable_manifold(const HyperbolicFrame &frame,
                                 const FiberPoint &x, double half_length);

// eps * sin(angle between the eigendirections) / 2.
double local_product_radius(const HyperbolicFrame &frame, double epsilon);

// The point of x + R e^s that lies on y + R e^u, for the lift of y nearest x.
FiberPoint local_product(const FiberPoint &x, const FiberPoint &y,
                         double epsilon, const HyperbolicFrame &frame);

// Smallest N with lambda_u^N * eps/8 > sqrt(2) + 1 and lambda_u^-N <= 1/2.
int unstable_crossing_gap(const SkewSystem &sys, double epsilon);

// True when every point of the plane lies within the parallelogram
// |u| <= unstable_half, |s| <= stable_half of some integer point.
bool parallelogram_covers_torus(const HyperbolicFrame &frame,
                                double unstable_half, double stable_half);

// Smallest N that satisfies unstable_crossing_gap's inequalities and for
// which the expanded parallelogram with half-widths gamma*lambda_u^N and
// gamma = eps/8 certifiably covers the torus.
int mixing_gap(const SkewSystem &sys, double epsilon);

struct CertificateEntry {
  std::int64_t t = 0;
  std::size_t interval = 0;
  double distance = 0.0;
};

struct ShadowingCheck {
  bool passed = false;
  double max_distance = 0.0;
  std::int64_t worst_t = 0;
  std::size_t worst_interval = 0;
  std::vector<double> interval_max;
  std::vector<CertificateEntry> distances;
};

// d(F^t x, P(t)) for every t of every interval; passes when all are < eps.
ShadowingCheck verify_shadowing(const SkewSystem &sys,
                                const OmegaSpecification &spec,
                                const WideFiberPoint &x, double epsilon);
ShadowingCheck verify_shadowing(const SkewSystem &sys,
                                const OmegaSpecification &spec,
                                const FiberPoint &x, double epsilon);

// Unstable offset of the shadowing orbit from the pushed segment end y_j at
// time b_j, against the geometric bound 2*gamma.
struct LedgerEntry {
  std::size_t interval = 0;
  double unstable_offset = 0.0;
  double stable_offset = 0.0;
  double bound = 0.0;
};

struct ShadowResult {
  // Full-precision shadowing point; `rounded` is its nearest 64-bit point,
  // which only shadows short specifications.
  WideFiberPoint point;
  FiberPoint rounded;
  int mixing_gap = 0;
  double gamma = 0.0;
  std::vector<LedgerEntry> ledger;
  bool ledger_ok = true;
  ShadowingCheck certificate;
};

ShadowResult shadow(const SkewSystem &sys, const OmegaSpecification &spec,
                    double epsilon);

}  // namespace fiberdyn
