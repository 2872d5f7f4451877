#include <cmath>
#include <random>

#include "doctest.h"
#include "fiberdyn/error.hpp"
#include "fiberdyn/shadowing.hpp"

using namespace fiberdyn;

namespace {

SkewSystem forced_cat() {
  return SkewSystem::affine_toral(
      DrivingSystem::rotation(std::sqrt(2.0) - 1.0), IntMatrix2{2, 1, 1, 1},
      Forcing{{0.1, {0.2}, {}}, {0.0, {}, {0.3}}});
}

OmegaSpecification random_spec(std::mt19937_64 &rng, int k, int spacing) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> length(0, 6), extra(0, 3);
  std::vector<SpecInterval> ivs;
  std::int64_t t = extra(rng);
  for (int i = 0; i < k; ++i) {
    SpecInterval iv;
    iv.a = t;
    iv.b = t + length(rng);
    iv.anchor = make_point(unit(rng), unit(rng));
    ivs.push_back(iv);
    t = iv.b + spacing + 1 + extra(rng);
  }
  return OmegaSpecification(BasePoint::at(unit(rng)), ivs, spacing);
}

double cross(Vec2 a, Vec2 b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

TEST_CASE("local product") {
  const HyperbolicFrame f = hyperbolic_frame(IntMatrix2{2, 1, 1, 1});
  const FiberPoint x = make_point(0.3, 0.6);
  CHECK(local_product(x, x, 0.1, f) == x);

  // y on the unstable line through x: the stable line through x meets it at x.
  const FiberPoint y = translate(x, f.vector(0.02, 0.0));
  const FiberPoint z = local_product(x, y, 0.1, f);
  CHECK(torus_distance(z, x) < 1e-12);
  CHECK(unstable_manifold(f, y, 0.05).line_residual(z) < 1e-12);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0), small(-0.02, 0.02);
  for (int trial = 0; trial < 200; ++trial) {
    const FiberPoint a = make_point(unit(rng), unit(rng));
    const FiberPoint b = translate(a, Vec2{small(rng), small(rng)});
    const FiberPoint c = local_product(a, b, 0.1, f);
    CHECK(std::abs(cross(offset(a, c), f.stable)) < 1e-12);
    CHECK(std::abs(cross(offset(b, c), f.unstable)) < 1e-12);
    CHECK(stable_manifold(f, a, 0.1).contains(c, 1e-12));
    CHECK(unstable_manifold(f, b, 0.1).contains(c, 1e-12));
  }
  CHECK_THROWS_AS(local_product(x, make_point(0.8, 0.1), 0.1, f), Error);
}

TEST_CASE("manifolds are eigen-lines") {
  const HyperbolicFrame f = hyperbolic_frame(IntMatrix2{2, 1, 1, 1});
  const FiberPoint x = make_point(0.1, 0.2);
  const AffineManifold ws = stable_manifold(f, x, 0.1);
  CHECK(ws.direction == f.stable);
  CHECK(ws.contains(translate(x, f.vector(0.0, 0.05)), 1e-12));
  CHECK_FALSE(ws.contains(translate(x, f.vector(0.05, 0.0)), 1e-12));
  CHECK_FALSE(ws.contains(translate(x, f.vector(0.0, 0.2)), 1e-12));
  CHECK(unstable_manifold(f, x, 0.1).line_residual(translate(x, f.vector(0.07, 0.0))) < 1e-12);
}

TEST_CASE("crossing gaps") {
  const SkewSystem cat = forced_cat();
  const double lambda = hyperbolic_frame(cat).lambda_u;
  CHECK(unstable_crossing_gap(cat, 0.1) == 6);
  for (double eps : {0.02, 0.05, 0.1}) {
    const int n = unstable_crossing_gap(cat, eps);
    CHECK(std::pow(lambda, n) * eps / 8 > std::sqrt(2.0) + 1);
    CHECK(std::pow(lambda, n - 1) * eps / 8 <= std::sqrt(2.0) + 1);
    const int doubled = unstable_crossing_gap(cat, 2 * eps);
    CHECK(doubled <= n);
    CHECK(doubled >= n - 1);
    CHECK(mixing_gap(cat, eps) >= n);
  }
  const SkewSystem square = SkewSystem::affine_toral(
      DrivingSystem::rotation(std::sqrt(2.0) - 1.0), IntMatrix2{5, 3, 3, 2});
  CHECK(hyperbolic_frame(square).lambda_u == doctest::Approx(6.854102).epsilon(1e-6));
  for (double eps : {0.05, 0.1, 0.2}) {
    const int n = unstable_crossing_gap(cat, eps);
    const int half = unstable_crossing_gap(square, eps);
    CHECK(std::abs(2 * half - n) <= 2);
  }
  CHECK(mixing_gap(cat, 0.05) == 11);
  CHECK(mixing_gap(cat, 0.1) == 9);
  CHECK(mixing_gap(cat, 0.2) == 8);
}

TEST_CASE("parallelogram covering") {
  const HyperbolicFrame f = hyperbolic_frame(IntMatrix2{2, 1, 1, 1});
  CHECK(parallelogram_covers_torus(f, 1.0, 1.0));
  CHECK_FALSE(parallelogram_covers_torus(f, 0.1, 0.1));
  // Any cover must have area at least one.
  for (double u : {0.5, 2.0, 10.0, 50.0}) {
    for (double s : {0.01, 0.05, 0.2}) {
      if (parallelogram_covers_torus(f, u, s)) CHECK(4 * u * s >= 1.0);
    }
  }
}

TEST_CASE("one interval shadows itself") {
  const SkewSystem cat = forced_cat();
  const SpecInterval iv{3, 9, make_point(0.2, 0.7)};
  const OmegaSpecification spec(BasePoint::at(0.4), {iv}, 0);
  const ShadowResult r = shadow(cat, spec, 0.1);
  CHECK(r.certificate.passed);
  CHECK(r.certificate.max_distance == 0.0);

  const FiberPoint x = fiber_step(cat, base_step(cat.base(), spec.omega(), 3),
                                  iv.anchor, -3);
  const ShadowingCheck direct = verify_shadowing(cat, spec, x, 0.1);
  CHECK(direct.passed);
  CHECK(direct.max_distance == 0.0);
}

TEST_CASE("two intervals stay within half of epsilon") {
  const SkewSystem cat = forced_cat();
  std::mt19937_64 rng(21);
  for (double eps : {0.05, 0.1, 0.2}) {
    const int m = mixing_gap(cat, eps);
    for (int trial = 0; trial < 20; ++trial) {
      const ShadowResult r = shadow(cat, random_spec(rng, 2, m), eps);
      CHECK(r.certificate.passed);
      CHECK(r.certificate.max_distance < eps);
      for (double d : r.certificate.interval_max) CHECK(d <= eps / 2);
      CHECK(r.ledger_ok);
    }
  }
}

TEST_CASE("five intervals, one hundred seeds") {
  const SkewSystem cat = forced_cat();
  const int m = mixing_gap(cat, 0.1);
  int passed = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const ShadowResult r = shadow(cat, random_spec(rng, 5, m), 0.1);
    passed += r.certificate.passed && r.ledger_ok;
  }
  CHECK(passed == 100);
}

TEST_CASE("a pushed point fails the certificate late") {
  const SkewSystem cat = forced_cat();
  const double eps = 0.1;
  const int m = mixing_gap(cat, eps);
  const OmegaSpecification spec(
      BasePoint::at(0.15),
      {{0, 0, make_point(0.3, 0.3)}, {m + 1, m + 5, make_point(0.6, 0.1)}}, m);
  const ShadowResult r = shadow(cat, spec, eps);
  REQUIRE(r.certificate.passed);

  const HyperbolicFrame f = hyperbolic_frame(cat);
  const WideFiberPoint pushed = translate(r.point, f.vector(2 * eps, 0.0));
  const ShadowingCheck bad = verify_shadowing(cat, spec, pushed, eps);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_interval == 1);
}

TEST_CASE("anchors on one orbit return that orbit") {
  const SkewSystem cat = forced_cat();
  const BasePoint w = BasePoint::at(0.77);
  const FiberPoint x0 = make_point(0.41, 0.83);
  const int m = mixing_gap(cat, 0.1);
  std::vector<SpecInterval> ivs;
  for (std::int64_t a : {2, 2 + m + 3, 2 + 2 * m + 9}) {
    ivs.push_back({a, a + 2, fiber_step(cat, w, x0, a)});
  }
  const ShadowResult r = shadow(cat, OmegaSpecification(w, ivs, m), 0.1);
  CHECK(torus_distance(r.rounded, x0) <= 1e-9);
  CHECK(r.certificate.max_distance <= 1e-9);
}

TEST_CASE("shadowing is deterministic") {
  const SkewSystem cat = forced_cat();
  std::mt19937_64 rng(8);
  const OmegaSpecification spec = random_spec(rng, 4, mixing_gap(cat, 0.2));
  const ShadowResult a = shadow(cat, spec, 0.2);
  const ShadowResult b = shadow(cat, spec, 0.2);
  CHECK(a.point == b.point);
  CHECK(a.certificate.max_distance == b.certificate.max_distance);
}

TEST_CASE("shadowing preconditions") {
  const SkewSystem cat = forced_cat();
  const OmegaSpecification tight(
      BasePoint::at(0.1), {{0, 1, make_point(0.1, 0.1)}, {5, 6, make_point(0.5, 0.5)}}, 3);
  auto kind_of = [](auto &&f) {
    try {
      f();
    } catch (const Error &e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  CHECK(kind_of([&] { shadow(cat, tight, 0.1); }) == ErrorKind::SpacingTooSmall);
  CHECK(kind_of([&] { shadow(cat, tight, 0.3); }) == ErrorKind::EpsilonTooLarge);
  CHECK(kind_of([&] { shadow(SkewSystem::doubling(), tight, 0.1); }) ==
        ErrorKind::NotAffine);
  const SkewSystem cocycle = SkewSystem::matrix_cocycle(
      DrivingSystem::sturmian(std::sqrt(2.0) - 1.0), {{2, 1, 1, 1}, {1, 1, 1, 2}});
  CHECK(kind_of([&] { shadow(cocycle, tight, 0.1); }) == ErrorKind::NotAffine);
  CHECK_THROWS_AS(OmegaSpecification(BasePoint{}, {{0, 4, {}}, {6, 7, {}}}, 3), Error);
  CHECK_THROWS_AS(OmegaSpecification(BasePoint{}, {{3, 2, {}}}, 0), Error);
}
