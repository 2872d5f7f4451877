#pragma once

// Fiber map families over a driving system. Every supported fiber map is
// affine on the circle or the 2-torus, x -> A_omega x + c(omega) with an
// integer matrix A_omega, so orbit differences evolve by the linear part only.

#include <cstdint>
#include <string>
#include <vector>

#include "fiberdyn/base_systems.hpp"
#include "fiberdyn/torus.hpp"

namespace fiberdyn {

enum class FiberKind { AffineToral, MatrixCocycle, Doubling };

std::string fiber_kind_name(FiberKind kind);

// c + sum_m a_m cos(2 pi m w) + b_m sin(2 pi m w), m = 1, 2, ...
struct FourierSeries {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  double operator()(double w) const;
  bool empty() const;
};

struct Forcing {
  FourierSeries h1, h2;
};

// One fiber map x -> matrix * x + shift.
struct AffineStep {
  IntMatrix2 matrix;
  FiberPoint shift;

  template <class Word>
  BasicFiberPoint<Word> apply(const BasicFiberPoint<Word> &x) const {
    BasicFiberPoint<Word> y = matrix.apply(x);
    if constexpr (std::is_same_v<Word, Turn>) {
      y.c[0] += shift.c[0];
      y.c[1] += shift.c[1];
    } else {
      y.c[0] += widen(shift.c[0]);
      y.c[1] += widen(shift.c[1]);
    }
    return y;
  }
};

class SkewSystem {
 public:
  static SkewSystem affine_toral(DrivingSystem base, IntMatrix2 matrix,
                                 Forcing forcing = {});
  static SkewSystem matrix_cocycle(DrivingSystem base,
                                   std::vector<IntMatrix2> generators);
  // x -> 2x mod 1 over the one-point base; forward only.
  static SkewSystem doubling();

  FiberKind kind() const { return kind_; }
  const DrivingSystem &base() const { return base_; }
  int dimension() const { return kind_ == FiberKind::Doubling ? 1 : 2; }
  bool invertible() const { return kind_ != FiberKind::Doubling; }
  // A single constant hyperbolic matrix with affine stable/unstable lines.
  bool globally_affine_hyperbolic() const {
    return kind_ == FiberKind::AffineToral;
  }

  const IntMatrix2 &matrix() const { return generators_.front(); }
  const std::vector<IntMatrix2> &generators() const { return generators_; }
  const Forcing &forcing() const { return forcing_; }
  const std::vector<std::string> &warnings() const { return warnings_; }
  bool shadowing_enabled() const;

  AffineStep step_at(const BasePoint &omega) const;
  // Uniform lower bound on unstable expansion per step.
  double min_expansion() const;
  double max_operator_norm() const;

 private:
  SkewSystem(FiberKind kind, DrivingSystem base,
             std::vector<IntMatrix2> generators, Forcing forcing);

  FiberKind kind_;
  DrivingSystem base_;
  std::vector<IntMatrix2> generators_;
  Forcing forcing_;
  std::vector<std::string> warnings_;
};

// The fiber maps F_{theta^i omega}, i = 0..length-1, precomputed along one
// base orbit so that many fiber points can be pushed cheaply.
class FiberSchedule {
 public:
  FiberSchedule(const SkewSystem &sys, const BasePoint &omega, int length);

  int length() const { return static_cast<int>(steps_.size()); }
  const AffineStep &operator[](int i) const { return steps_[i]; }
  int dimension() const { return dimension_; }

  // F_omega^i x for i = 0..n-1 written to `out` (size >= n).
  void orbit(const FiberPoint &x, int n, FiberPoint *out) const;

 private:
  std::vector<AffineStep> steps_;
  int dimension_;
};

template <class Word>
BasicFiberPoint<Word> fiber_step(const SkewSystem &sys, const BasePoint &omega,
                                 BasicFiberPoint<Word> x, std::int64_t t);

extern template FiberPoint fiber_step(const SkewSystem &, const BasePoint &,
                                      FiberPoint, std::int64_t);
extern template WideFiberPoint fiber_step(const SkewSystem &,
                                          const BasePoint &, WideFiberPoint,
                                          std::int64_t);

// Product A_{theta^{n-1} omega} ... A_omega of the linear parts.
Matrix2 linear_product(const SkewSystem &sys, const BasePoint &omega, int n);

// max_{0<=i<n} d_M(F^i x, F^i y).
double bowen_distance(const SkewSystem &sys, const BasePoint &omega,
                      const FiberPoint &x, const FiberPoint &y, int n);
double bowen_distance(const FiberSchedule &schedule, const FiberPoint &x,
                      const FiberPoint &y, int n);

struct HyperbolicFrame {
  Vec2 unstable{1, 0};
  Vec2 stable{0, 1};
  double lambda_u = 1;  // modulus of the expanding eigenvalue
  double lambda_s = 1;  // modulus of the contracting eigenvalue
  int sign_u = 1;       // T e_u = sign_u * lambda_u * e_u
  int sign_s = 1;

  // Coordinates (u, s) of v in the (unstable, stable) basis.
  Vec2 coordinates(Vec2 v) const;
  Vec2 vector(double u, double s) const;
  // |sin| of the angle between the eigendirections.
  double sin_angle() const;
  double lambda0() const;
};

// Extended-precision version of the frame for the shadowing construction.
struct PreciseFrame {
  Real eu[2], es[2];
  Real lambda_u, lambda_s;
  int sign_u = 1, sign_s = 1;
};

HyperbolicFrame hyperbolic_frame(const SkewSystem &sys);
HyperbolicFrame hyperbolic_frame(const IntMatrix2 &matrix);
PreciseFrame precise_frame(const IntMatrix2 &matrix);

// |d_frame| <= |d| <= 2 |d_frame| style constants between the frame
// max-metric and the Euclidean torus metric: lower*frame <= euclid <= upper*frame.
struct FrameMetricEquivalence {
  double lower = 1, upper = 1;
};
FrameMetricEquivalence frame_metric_equivalence(const HyperbolicFrame &frame);

// max_{0<=i<n} max(|u_i|, |s_i|) for the orbit offsets in the frame basis.
double frame_bowen_distance(const SkewSystem &sys, const HyperbolicFrame &frame,
                            const BasePoint &omega, const FiberPoint &x,
                            const FiberPoint &y, int n);

struct ExpansivityReport {
  double eta = 0;
  double epsilon = 0;
  int horizon = 0;             // L(epsilon)
  double min_expansion = 1;    // per-step expansion used for L
  double max_operator_norm = 1;
};

ExpansivityReport expansivity_constants(const SkewSystem &sys, double epsilon);

// Lebesgue area of the frame max-metric Bowen ball B_n(omega, x, epsilon):
// the parallelogram |u| < eps*lambda_u^{-(n-1)}, |s| < eps.
double bowen_ball_area(const SkewSystem &sys, int n, double epsilon);

}  // namespace fiberdyn
