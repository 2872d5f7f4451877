#include <cmath>
#include <random>

#include "doctest.h"
#include "fiberdyn/error.hpp"
#include "fiberdyn/skew_system.hpp"

using namespace fiberdyn;

namespace {

const double kGoldenLambda = (3.0 + std::sqrt(5.0)) / 2.0;
const IntMatrix2 kCat{2, 1, 1, 1};

SkewSystem forced_cat() {
  return SkewSystem::affine_toral(
      DrivingSystem::rotation(std::sqrt(2.0) - 1.0), kCat,
      Forcing{{0.1, {0.2}, {}}, {0.0, {}, {0.3}}});
}

SkewSystem random_composition() {
  return SkewSystem::matrix_cocycle(
      DrivingSystem::sturmian(std::sqrt(2.0) - 1.0), {{2, 1, 1, 1}, {1, 1, 1, 2}});
}

}  // namespace

TEST_CASE("cat map step") {
  const SkewSystem cat = SkewSystem::affine_toral(
      DrivingSystem::rotation(std::sqrt(2.0) - 1.0), kCat);
  const FiberPoint x = make_point(0.5, 0.5);
  const BasePoint w = BasePoint::at(0.2);
  CHECK(fiber_step(cat, w, x, 1) == make_point(0.5, 0.0));
  CHECK(fiber_step(cat, w, x, 0) == x);
}

TEST_CASE("cocycle law on both example systems") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> time(-20, 20);
  for (const SkewSystem &sys : {forced_cat(), random_composition()}) {
    for (int trial = 0; trial < 500; ++trial) {
      const BasePoint w = BasePoint::at(unit(rng));
      const FiberPoint x = make_point(unit(rng), unit(rng));
      const int s = time(rng), t = time(rng);
      const FiberPoint direct = fiber_step(sys, w, x, s + t);
      const FiberPoint twice =
          fiber_step(sys, base_step(sys.base(), w, s), fiber_step(sys, w, x, s), t);
      CHECK(torus_distance(direct, twice) <= 1e-9);
    }
  }
}

TEST_CASE("doubling map is forward only") {
  const SkewSystem dbl = SkewSystem::doubling();
  CHECK(dbl.dimension() == 1);
  CHECK(torus_distance(fiber_step(dbl, BasePoint{}, make_point(0.3), 2),
                       make_point(0.2)) < 1e-15);
  CHECK_THROWS_AS(fiber_step(dbl, BasePoint{}, make_point(0.3), -1), Error);
  try {
    fiber_step(dbl, BasePoint{}, make_point(0.3), -1);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::BackwardNotInvertible);
  }
}

TEST_CASE("Bowen distance") {
  const SkewSystem cat = forced_cat();
  const BasePoint w = BasePoint::at(0.7);
  const FiberPoint x = make_point(0.25, 0.6), y = make_point(0.3, 0.55);
  CHECK(bowen_distance(cat, w, x, y, 1) == doctest::Approx(torus_distance(x, y)));

  // Growth by lambda_u per step, compared with powers of the matrix applied
  // to the displacement.
  const FiberPoint o = make_point(0.0, 0.0), p = make_point(1e-6, 0.0);
  double v[2] = {1e-6, 0.0};
  for (int n = 1; n <= 8; ++n) {
    CHECK(bowen_distance(cat, w, o, p, n) ==
          doctest::Approx(std::hypot(v[0], v[1])).epsilon(1e-6));
    const double v0 = 2 * v[0] + v[1], v1 = v[0] + v[1];
    v[0] = v0;
    v[1] = v1;
  }
  const double ratio =
      bowen_distance(cat, w, o, p, 9) / bowen_distance(cat, w, o, p, 8);
  CHECK(ratio == doctest::Approx(kGoldenLambda).epsilon(1e-4));
}

TEST_CASE("hyperbolic frame of the cat map") {
  const HyperbolicFrame f = hyperbolic_frame(kCat);
  CHECK(f.lambda_u == doctest::Approx(kGoldenLambda).epsilon(1e-12));
  // root of the characteristic polynomial
  CHECK(std::abs(f.lambda_u * f.lambda_u - 3 * f.lambda_u + 1) < 1e-12);
  CHECK(std::abs(f.lambda_u * f.lambda_s - 1.0) < 1e-10);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(f.unstable[0] / f.unstable[1] == doctest::Approx(golden).epsilon(1e-12));
  for (const auto &[e, lam, sign] :
       {std::tuple{f.unstable, f.lambda_u, f.sign_u},
        std::tuple{f.stable, f.lambda_s, f.sign_s}}) {
    const Vec2 te = kCat.apply(e);
    CHECK(std::abs(te[0] - sign * lam * e[0]) < 1e-12);
    CHECK(std::abs(te[1] - sign * lam * e[1]) < 1e-12);
  }
}

TEST_CASE("elliptic matrix is rejected") {
  CHECK_THROWS_AS(hyperbolic_frame(IntMatrix2{0, 1, -1, 0}), Error);
  try {
    SkewSystem::affine_toral(DrivingSystem::rotation(std::sqrt(2.0) - 1.0),
                             IntMatrix2{0, 1, -1, 0});
    FAIL("expected NotHyperbolic");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::NotHyperbolic);
  }
}

TEST_CASE("expansivity constants") {
  const SkewSystem cat = forced_cat();
  const ExpansivityReport r = expansivity_constants(cat, 0.01);
  CHECK(r.eta == doctest::Approx(1.0 / (4.0 * (1.0 + kGoldenLambda))).epsilon(1e-9));
  CHECK(r.eta == doctest::Approx(0.0691).epsilon(0.001));
  CHECK(r.horizon == 5);
  CHECK(expansivity_constants(cat, 0.1).horizon == 0);
  // The horizon really separates: lambda_u^L * eps/2 beats the diameter.
  for (double eps : {0.001, 0.005, 0.01, 0.03}) {
    const int L = expansivity_constants(cat, eps).horizon;
    CHECK(std::pow(kGoldenLambda, L) * eps > 0.5);
    CHECK(std::pow(kGoldenLambda, L - 1) * eps <= 0.5);
  }
}

TEST_CASE("Bowen ball area against Monte Carlo") {
  const SkewSystem cat = forced_cat();
  const HyperbolicFrame f = hyperbolic_frame(cat);
  const double eps = 0.05;
  const BasePoint w = BasePoint::at(0.3);
  const FiberPoint x = make_point(0.4, 0.7);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> box(-0.1, 0.1);
  const int samples = 1000000;
  for (int n : {1, 2, 3}) {
    int inside = 0;
    for (int i = 0; i < samples; ++i) {
      const FiberPoint y = translate(x, Vec2{box(rng), box(rng)});
      inside += frame_bowen_distance(cat, f, w, x, y, n) < eps;
    }
    const double mc = inside / double(samples) * 0.04;
    const double tol = n == 1 ? 0.01 : 0.02;
    CHECK(bowen_ball_area(cat, n, eps) == doctest::Approx(mc).epsilon(tol));
  }
  for (int n = 3; n <= 10; ++n) {
    const double ratio = bowen_ball_area(cat, n + 1, eps) / bowen_ball_area(cat, n, eps);
    CHECK(ratio == doctest::Approx(1.0 / kGoldenLambda).epsilon(1e-9));
  }
}
