#include "fiberdyn/skew_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fiberdyn/error.hpp"

namespace fiberdyn {

std::string fiber_kind_name(FiberKind kind) {
  switch (kind) {
    case FiberKind::AffineToral: return "affine_toral";
    case FiberKind::MatrixCocycle: return "matrix_cocycle";
    case FiberKind::Doubling: return "doubling";
  }
  return "unknown";
}

double FourierSeries::operator()(double w) const {
  double v = constant;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t m = 0; m < cos_coeffs.size(); ++m)
    v += cos_coeffs[m] * std::cos(two_pi * static_cast<double>(m + 1) * w);
  for (std::size_t m = 0; m < sin_coeffs.size(); ++m)
    v += sin_coeffs[m] * std::sin(two_pi * static_cast<double>(m + 1) * w);
  return v;
}

bool FourierSeries::empty() const {
  return constant == 0.0 &&
         std::all_of(cos_coeffs.begin(), cos_coeffs.end(),
                     [](double c) { return c == 0.0; }) &&
         std::all_of(sin_coeffs.begin(), sin_coeffs.end(),
                     [](double c) { return c == 0.0; });
}

SkewSystem::SkewSystem(FiberKind kind, DrivingSystem base,
                       std::vector<IntMatrix2> generators, Forcing forcing)
    : kind_(kind),
      base_(base),
      generators_(std::move(generators)),
      forcing_(std::move(forcing)) {}

SkewSystem SkewSystem::affine_toral(DrivingSystem base, IntMatrix2 matrix,
                                    Forcing forcing) {
  const std::int64_t det = matrix.det();
  if (det != 1 && det != -1) {
    throw Error(ErrorKind::InvalidArgument,
                "affine toral matrix needs |det| = 1, got " +
                    matrix.to_string());
  }
  hyperbolic_frame(matrix);  // throws NotHyperbolic
  return SkewSystem(FiberKind::AffineToral, base, {matrix},
                    std::move(forcing));
}

SkewSystem SkewSystem::matrix_cocycle(DrivingSystem base,
                                      std::vector<IntMatrix2> generators) {
  if (generators.empty())
    throw Error(ErrorKind::InvalidArgument, "matrix cocycle needs generators");
  if (base.kind() == BaseKind::Sturmian && generators.size() < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "Sturmian base uses symbols 1 and 2; need 2 generators");
  }
  for (const auto &g : generators) {
    if (g.a <= 0 || g.b <= 0 || g.c <= 0 || g.d <= 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "cocycle generators need strictly positive entries, got " +
                      g.to_string());
    }
    if (g.det() != 1 && g.det() != -1) {
      throw Error(ErrorKind::InvalidArgument,
                  "cocycle generators need |det| = 1, got " + g.to_string());
    }
  }
  SkewSystem sys(FiberKind::MatrixCocycle, base, std::move(generators), {});
  // Positive matrices map the positive cone into itself; the l1 expansion
  // on that cone is the smallest column sum.
  for (const auto &g : sys.generators_) {
    if (g.min_column_sum() <= 1.0) {
      sys.warnings_.push_back("generator " + g.to_string() +
                              " does not expand the positive cone; "
                              "shadowing disabled");
    }
  }
  return sys;
}

SkewSystem SkewSystem::doubling() {
  return SkewSystem(FiberKind::Doubling, DrivingSystem::point(),
                    {IntMatrix2{2, 0, 0, 0}}, {});
}

bool SkewSystem::shadowing_enabled() const {
  return kind_ == FiberKind::AffineToral && warnings_.empty();
}

AffineStep SkewSystem::step_at(const BasePoint &omega) const {
  switch (kind_) {
    case FiberKind::AffineToral: {
      const double w = omega.coordinate();
      return {generators_.front(),
              FiberPoint{{turn_from_double(forcing_.h1(w)),
                          turn_from_double(forcing_.h2(w))}}};
    }
    case FiberKind::MatrixCocycle: {
      const int symbol = base_symbol(base_, omega, 0);
      const auto idx = std::min<std::size_t>(symbol - 1, generators_.size() - 1);
      return {generators_[idx], FiberPoint{}};
    }
    case FiberKind::Doubling:
      return {generators_.front(), FiberPoint{}};
  }
  return {};
}

double SkewSystem::min_expansion() const {
  switch (kind_) {
    case FiberKind::AffineToral:
      return hyperbolic_frame(generators_.front()).lambda_u;
    case FiberKind::MatrixCocycle: {
      double m = std::numeric_limits<double>::infinity();
      for (const auto &g : generators_) m = std::min(m, g.min_column_sum());
      return m;
    }
    case FiberKind::Doubling:
      return 2.0;
  }
  return 1.0;
}

double SkewSystem::max_operator_norm() const {
  if (kind_ == FiberKind::Doubling) return 2.0;
  double m = 0.0;
  for (const auto &g : generators_) m = std::max(m, g.operator_norm());
  return m;
}

FiberSchedule::FiberSchedule(const SkewSystem &sys, const BasePoint &omega,
                             int length)
    : dimension_(sys.dimension()) {
  steps_.reserve(std::max(length, 0));
  BasePoint w = omega;
  for (int i = 0; i < length; ++i) {
    steps_.push_back(sys.step_at(w));
    w = base_step(sys.base(), w, 1);
  }
}

void FiberSchedule::orbit(const FiberPoint &x, int n, FiberPoint *out) const {
  FiberPoint p = x;
  for (int i = 0; i < n; ++i) {
    out[i] = p;
    if (i + 1 < n) p = steps_[i].apply(p);
  }
}

template <class Word>
BasicFiberPoint<Word> fiber_step(const SkewSystem &sys, const BasePoint &omega,
                                 BasicFiberPoint<Word> x, std::int64_t t) {
  if (t < 0 && !sys.invertible()) {
    throw Error(ErrorKind::BackwardNotInvertible,
                "backward iteration requested on a non-invertible fiber map");
  }
  BasePoint w = omega;
  for (std::int64_t i = 0; i < t; ++i) {
    x = sys.step_at(w).apply(x);
    w = base_step(sys.base(), w, 1);
  }
  for (std::int64_t i = 0; i > t; --i) {
    w = base_step(sys.base(), w, -1);
    const AffineStep step = sys.step_at(w);
    BasicFiberPoint<Word> y = x;
    if constexpr (std::is_same_v<Word, Turn>) {
      y.c[0] -= step.shift.c[0];
      y.c[1] -= step.shift.c[1];
    } else {
      y.c[0] -= widen(step.shift.c[0]);
      y.c[1] -= widen(step.shift.c[1]);
    }
    x = step.matrix.inverse().apply(y);
  }
  return x;
}

template FiberPoint fiber_step(const SkewSystem &, const BasePoint &,
                               FiberPoint, std::int64_t);
template WideFiberPoint fiber_step(const SkewSystem &, const BasePoint &,
                                   WideFiberPoint, std::int64_t);

Matrix2 linear_product(const SkewSystem &sys, const BasePoint &omega, int n) {
  Matrix2 acc;
  BasePoint w = omega;
  for (int i = 0; i < n; ++i) {
    acc = Matrix2::from(sys.step_at(w).matrix) * acc;
    w = base_step(sys.base(), w, 1);
  }
  return acc;
}

double bowen_distance(const FiberSchedule &schedule, const FiberPoint &x,
                      const FiberPoint &y, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  double worst = 0.0;
  FiberPoint p = x, q = y;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, torus_distance(p, q));
    if (i + 1 < n) {
      p = schedule[i].apply(p);
      q = schedule[i].apply(q);
    }
  }
  return worst;
}

double bowen_distance(const SkewSystem &sys, const BasePoint &omega,
                      const FiberPoint &x, const FiberPoint &y, int n) {
  return bowen_distance(FiberSchedule(sys, omega, n), x, y, n);
}

Vec2 HyperbolicFrame::coordinates(Vec2 v) const {
  const double det = unstable[0] * stable[1] - stable[0] * unstable[1];
  return {(v[0] * stable[1] - stable[0] * v[1]) / det,
          (unstable[0] * v[1] - v[0] * unstable[1]) / det};
}

Vec2 HyperbolicFrame::vector(double u, double s) const {
  return {u * unstable[0] + s * stable[0], u * unstable[1] + s * stable[1]};
}

double HyperbolicFrame::sin_angle() const {
  return std::abs(unstable[0] * stable[1] - stable[0] * unstable[1]);
}

double HyperbolicFrame::lambda0() const {
  return std::min(std::log(lambda_u), -std::log(lambda_s));
}

namespace {

template <class T>
void eigenvector(const IntMatrix2 &m, const T &lambda, T out[2]) {
  // (b, lambda - a) and (lambda - d, c) both solve (M - lambda) v = 0.
  T v1[2] = {T(static_cast<double>(m.b)), lambda - T(static_cast<double>(m.a))};
  T v2[2] = {lambda - T(static_cast<double>(m.d)), T(static_cast<double>(m.c))};
  using std::sqrt;
  const T n1 = sqrt(v1[0] * v1[0] + v1[1] * v1[1]);
  const T n2 = sqrt(v2[0] * v2[0] + v2[1] * v2[1]);
  const T *v = n1 >= n2 ? v1 : v2;
  const T n = n1 >= n2 ? n1 : n2;
  out[0] = v[0] / n;
  out[1] = v[1] / n;
  // Canonical orientation: first nonzero component positive.
  if (out[0] < T(0) || (out[0] == T(0) && out[1] < T(0))) {
    out[0] = -out[0];
    out[1] = -out[1];
  }
}

}  // namespace

HyperbolicFrame hyperbolic_frame(const IntMatrix2 &m) {
  const double t = static_cast<double>(m.trace());
  const double det = static_cast<double>(m.det());
  const double disc = t * t - 4.0 * det;
  if (disc <= 0.0) {
    throw Error(ErrorKind::NotHyperbolic,
                "matrix " + m.to_string() + " has no real eigenvalues");
  }
  const double root = std::sqrt(disc);
  // Stable evaluation of both roots.
  const double big = t >= 0 ? 0.5 * (t + root) : 0.5 * (t - root);
  const double other = det / big;
  if (std::abs(big) <= 1.0 + 1e-12 || std::abs(other) >= 1.0 - 1e-12) {
    throw Error(ErrorKind::NotHyperbolic,
                "matrix " + m.to_string() + " is not hyperbolic");
  }
  HyperbolicFrame f;
  f.lambda_u = std::abs(big);
  f.lambda_s = std::abs(other);
  f.sign_u = big > 0 ? 1 : -1;
  f.sign_s = other > 0 ? 1 : -1;
  double eu[2], es[2];
  eigenvector(m, big, eu);
  eigenvector(m, other, es);
  f.unstable = {eu[0], eu[1]};
  f.stable = {es[0], es[1]};
  return f;
}

HyperbolicFrame hyperbolic_frame(const SkewSystem &sys) {
  if (sys.kind() != FiberKind::AffineToral) {
    throw Error(ErrorKind::NotAffine,
                "hyperbolic frame needs an affine toral system");
  }
  return hyperbolic_frame(sys.matrix());
}

PreciseFrame precise_frame(const IntMatrix2 &m) {
  const HyperbolicFrame coarse = hyperbolic_frame(m);  // validates
  const Real t = Real(static_cast<double>(m.trace()));
  const Real det = Real(static_cast<double>(m.det()));
  const Real root = sqrt(t * t - 4 * det);
  const Real big = t >= 0 ? Real((t + root) / 2) : Real((t - root) / 2);
  const Real other = det / big;
  PreciseFrame f;
  f.lambda_u = abs(big);
  f.lambda_s = abs(other);
  f.sign_u = coarse.sign_u;
  f.sign_s = coarse.sign_s;
  eigenvector(m, big, f.eu);
  eigenvector(m, other, f.es);
  return f;
}

FrameMetricEquivalence frame_metric_equivalence(const HyperbolicFrame &f) {
  // |v| <= |u| + |s| <= 2 max(|u|,|s|), and max(|u|,|s|) <= ||E^-1||_2 |v|.
  const Matrix2 e{f.unstable[0], f.stable[0], f.unstable[1], f.stable[1]};
  const SingularFrame sv = singular_frame(e);
  return {sv.sigma_min, 2.0};
}

double frame_bowen_distance(const SkewSystem &sys, const HyperbolicFrame &frame,
                            const BasePoint &omega, const FiberPoint &x,
                            const FiberPoint &y, int n) {
  const FiberSchedule schedule(sys, omega, n);
  double worst = 0.0;
  FiberPoint p = x, q = y;
  for (int i = 0; i < n; ++i) {
    const Vec2 us = frame.coordinates(offset(p, q));
    worst = std::max({worst, std::abs(us[0]), std::abs(us[1])});
    if (i + 1 < n) {
      p = schedule[i].apply(p);
      q = schedule[i].apply(q);
    }
  }
  return worst;
}

ExpansivityReport expansivity_constants(const SkewSystem &sys,
                                        double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1/4)");
  }
  ExpansivityReport r;
  r.epsilon = epsilon;
  r.max_operator_norm = sys.max_operator_norm();
  r.min_expansion = sys.min_expansion();
  r.eta = 1.0 / (4.0 * (1.0 + r.max_operator_norm));
  if (epsilon >= r.eta) return r;
  double grown = epsilon;
  while (!(grown > 0.5)) {
    grown *= r.min_expansion;
    ++r.horizon;
  }
  return r;
}

double bowen_ball_area(const SkewSystem &sys, int n, double epsilon) {
  if (sys.kind() != FiberKind::AffineToral) {
    throw Error(ErrorKind::NotAffine, "Bowen-ball area needs an affine toral system");
  }
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(epsilon < 0.25)) {
    throw Error(ErrorKind::EpsilonTooLarge,
                "epsilon must be below the injectivity scale 1/4");
  }
  const HyperbolicFrame f = hyperbolic_frame(sys);
  return 4.0 * epsilon * epsilon * std::pow(f.lambda_u, -(n - 1)) *
         f.sin_angle();
}

}  // namespace fiberdyn
