#include <cmath>
#include <random>

#include "doctest.h"
#include "fiberdyn/error.hpp"
#include "fiberdyn/pressure.hpp"

using namespace fiberdyn;

namespace {

const double kLog2 = std::log(2.0);
const double kGoldenEntropy = std::log((3.0 + std::sqrt(5.0)) / 2.0);

double binary_entropy(double a) {
  return -a * std::log(a) - (1 - a) * std::log(1 - a);
}

SkewSystem forced_cat() {
  return SkewSystem::affine_toral(
      DrivingSystem::rotation(std::sqrt(2.0) - 1.0), IntMatrix2{2, 1, 1, 1},
      Forcing{{0.1, {0.2}, {}}, {0.0, {}, {0.3}}});
}

Observable cat_potential() {
  return Observable::fiber_trig(0.0, {{1, 0, 0.5, 0.0}, {0, 1, 0.0, 0.25}});
}

std::vector<int> range(int from, int to, int step = 1) {
  std::vector<int> out;
  for (int n = from; n <= to; n += step) out.push_back(n);
  return out;
}

PressureOptions cylinder_options(std::vector<int> ns) {
  PressureOptions o;
  o.method = CountMethod::Cylinder;
  o.n_values = std::move(ns);
  return o;
}

PressureOptions cat_options() {
  PressureOptions o;
  o.epsilon = 0.1;
  o.n_values = range(3, 6);
  o.max_candidates = 20000;
  return o;
}

// One point in the middle of every length-n binary cylinder.
SeparatedSet cylinder_centres(int n) {
  SeparatedSet set;
  set.n = n;
  for (int k = 0; k < (1 << n); ++k) {
    set.points.push_back(make_point((k + 0.5) / double(1 << n)));
  }
  return set;
}

std::vector<double> q_range(double from, double to, double step) {
  std::vector<double> out;
  for (int i = 0; from + i * step <= to + 1e-12; ++i) out.push_back(from + i * step);
  return out;
}

}  // namespace

TEST_CASE("least squares slope") {
  const SlopeFit f = fit_slope({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.stderr_slope == doctest::Approx(0.0));
}

TEST_CASE("Birkhoff sums") {
  const SkewSystem dbl = SkewSystem::doubling();
  const FiberPoint x = make_point(0.2);
  CHECK(birkhoff_sum(dbl, Observable::constant(0.3), BasePoint{}, x, 7) ==
        doctest::Approx(2.1));
  const Observable digit = Observable::digit();
  CHECK(birkhoff_sum(dbl, digit, BasePoint{}, x, 1) == digit(BasePoint{}, x));
  CHECK(birkhoff_sum(dbl, digit, BasePoint{}, make_point(1.0 / 3.0), 10) == 5.0);

  const SkewSystem cat = forced_cat();
  const Observable phi = Observable::product({0.5, {0.3}, {0.1}}, 0.2,
                                             {{1, 1, 0.4, -0.2}});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const BasePoint w = BasePoint::at(unit(rng));
    const FiberPoint y = make_point(unit(rng), unit(rng));
    const int m = 1 + trial % 7, n = 1 + trial % 5;
    const double whole = birkhoff_sum(cat, phi, w, y, m + n);
    const double split =
        birkhoff_sum(cat, phi, w, y, m) +
        birkhoff_sum(cat, phi, base_step(cat.base(), w, m), fiber_step(cat, w, y, m), n);
    CHECK(std::abs(whole - split) <= 1e-9);
  }
}

TEST_CASE("partition sums") {
  const SkewSystem dbl = SkewSystem::doubling();
  const Observable digit = Observable::digit();
  for (int n : {3, 8, 12}) {
    const SeparatedSet set = cylinder_centres(n);
    CHECK(partition_sum(dbl, Observable::constant(0.0), BasePoint{}, set, n) ==
          double(set.points.size()));
    for (double q : {-2.0, 0.5, 1.0}) {
      CHECK(log_partition_sum(dbl, digit.scaled(q), BasePoint{}, set, n) ==
            doctest::Approx(n * std::log1p(std::exp(q))).epsilon(1e-12));
    }
  }
  SeparatedSet single;
  single.points = {make_point(0.3)};
  CHECK(partition_sum(dbl, digit, BasePoint{}, single, 6) ==
        doctest::Approx(std::exp(birkhoff_sum(dbl, digit, BasePoint{}, make_point(0.3), 6))));
  // No overflow for huge sums.
  CHECK(std::isfinite(log_partition_sum(dbl, digit.scaled(900.0), BasePoint{},
                                        cylinder_centres(4), 4)));
}

TEST_CASE("pressure on the doubling map") {
  const SkewSystem dbl = SkewSystem::doubling();
  const Observable digit = Observable::digit();
  StepBudget budget;
  const PressureOptions o = cylinder_options(range(8, 16));
  CHECK(pressure_estimate(dbl, digit.scaled(0.0), o, budget).pressure ==
        doctest::Approx(kLog2).epsilon(0.01 / kLog2));
  CHECK(pressure_estimate(dbl, digit, o, budget).pressure ==
        doctest::Approx(1.313262).epsilon(0.01 / 1.313262));
}

TEST_CASE("entropy of the forced cat map") {
  const SkewSystem cat = forced_cat();
  PressureOptions o;
  o.epsilon = 0.05;
  o.n_values = range(6, 12);
  StepBudget budget(10'000'000);
  const PressureEstimate e =
      pressure_estimate(cat, Observable::constant(0.0), o, budget);
  CHECK(std::abs(e.pressure - kGoldenEntropy) <= 0.05 * kGoldenEntropy);
  CHECK(budget.used() <= 10'000'000);
}

TEST_CASE("pressure curves on the oracle") {
  const SkewSystem dbl = SkewSystem::doubling();
  StepBudget budget;
  const std::vector<double> qs = q_range(-3, 3, 1);
  const PressureOptions o = cylinder_options(range(8, 16));

  const PressureCurve flat =
      pressure_curve(dbl, Observable::digit(0.0, 0.0), qs, o, budget);
  for (double p : flat.pressure) CHECK(p == doctest::Approx(flat.entropy).epsilon(1e-12));

  const PressureCurve curve = pressure_curve(dbl, Observable::digit(), qs, o, budget);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(std::abs(curve.pressure[i] - std::log1p(std::exp(qs[i]))) <= 0.02);
  }
  CHECK(curve.entropy == doctest::Approx(kLog2).epsilon(1e-9));

  const PressureCurve mirrored =
      pressure_curve(dbl, Observable::digit(0.0, -1.0), qs, o, budget);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    CHECK(std::abs(mirrored.pressure[i] - curve.pressure[qs.size() - 1 - i]) <= 1e-9);
  }
}

TEST_CASE("Legendre conjugate") {
  PressureCurve constant;
  constant.q = q_range(-2, 2, 0.5);
  constant.pressure.assign(constant.q.size(), 0.8);
  const SpectrumCurve s = legendre_conjugate(constant, {-0.4, 0.0, 0.3});
  CHECK(s.value[0] == doctest::Approx(0.8 - 2 * 0.4));
  CHECK(s.value[1] == doctest::Approx(0.8));
  CHECK(s.value[2] == doctest::Approx(0.8 - 2 * 0.3));

  const SkewSystem dbl = SkewSystem::doubling();
  StepBudget budget;
  const PressureCurve curve = pressure_curve(
      dbl, Observable::digit(), q_range(-6, 6, 0.01), cylinder_options(range(8, 16)),
      budget);
  const SpectrumCurve oracle = legendre_conjugate(curve, {0.3, 0.5});
  CHECK(oracle.value[0] == doctest::Approx(0.610864).epsilon(1e-4));
  CHECK(oracle.value[1] == doctest::Approx(kLog2).epsilon(1e-6));
  CHECK_FALSE(oracle.boundary[0]);
}

TEST_CASE("level set rates from binomial counts") {
  const SkewSystem dbl = SkewSystem::doubling();
  const Observable digit = Observable::digit();
  StepBudget budget;

  LevelSetRate r = level_set_rate(dbl, digit, BasePoint{}, 0.5, {0.05},
                                  cylinder_options(range(10, 20, 2)), budget);
  CHECK(std::abs(r.rate - kLog2) <= 0.05);

  r = level_set_rate(dbl, digit, BasePoint{}, 0.3, {0.02},
                     cylinder_options(range(10, 50, 10)), budget);
  CHECK(std::abs(r.rate - binary_entropy(0.3)) <= 0.05);

  r = level_set_rate(dbl, digit, BasePoint{}, 1.5, {0.05},
                     cylinder_options(range(10, 20, 2)), budget);
  CHECK(r.rate == 0.0);
  CHECK(r.out_of_range);
  for (const CountRow &row : r.counts.rows) CHECK(row.count == 1.0);
}

TEST_CASE("spectrum crosscheck on the oracle") {
  const SkewSystem dbl = SkewSystem::doubling();
  StepBudget budget(100'000'000);
  const PressureOptions o = cylinder_options(range(40, 80, 5));
  const CrosscheckReport report =
      spectrum_crosscheck(dbl, Observable::digit(), {0.3, 0.4, 0.5, 0.6, 0.7},
                          q_range(-3, 3, 0.25), {0.1, 0.05, 0.03}, o, budget);
  CHECK(report.max_interior_discrepancy <= 0.05);
  for (const CrosscheckRow &row : report.rows) {
    CHECK(std::abs(row.legendre - binary_entropy(row.alpha)) <= 0.05);
    CHECK(std::abs(row.counting_rate - binary_entropy(row.alpha)) <= 0.05);
  }

  // A constant potential: the level set is everything.
  const CrosscheckReport flat =
      spectrum_crosscheck(dbl, Observable::digit(0.4, 0.4), {0.4},
                          q_range(-3, 3, 1), {0.1, 0.05}, o, budget);
  REQUIRE(flat.rows.size() == 1);
  CHECK(std::abs(flat.rows[0].legendre - flat.curve.entropy) <= 0.05);
  CHECK(std::abs(flat.rows[0].counting_rate - flat.curve.entropy) <= 0.05);
}

TEST_CASE("level set rates agree across base points") {
  const SkewSystem cat = forced_cat();
  PressureOptions o = cat_options();
  o.omega_samples = 2;
  StepBudget budget(100'000'000);
  const CrosscheckReport report = spectrum_crosscheck(
      cat, cat_potential(), {0.0}, q_range(-2, 2, 1), {0.2, 0.1}, o, budget);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].omega_index != report.rows[1].omega_index);
  CHECK(std::abs(report.rows[0].counting_rate - report.rows[1].counting_rate) <= 0.05);
}

TEST_CASE("pressure monotonicity and translation") {
  const SkewSystem cat = forced_cat();
  const PressureOptions o = cat_options();
  StepBudget budget(100'000'000);
  const Observable phi = cat_potential();
  // psi - phi = 0.3 + 0.3 cos(2 pi x2) >= 0
  const Observable psi = Observable::fiber_trig(
      0.3, {{1, 0, 0.5, 0.0}, {0, 1, 0.3, 0.25}});
  const PressureEstimate p = pressure_estimate(cat, phi, o, budget);
  const PressureEstimate q = pressure_estimate(cat, psi, o, budget);
  CHECK(p.pressure <= q.pressure + 2 * std::max(p.stderr_slope, q.stderr_slope));

  const PressureEstimate shifted = pressure_estimate(cat, phi.shifted(0.7), o, budget);
  CHECK(std::abs(shifted.pressure - (p.pressure + 0.7)) <=
        2 * p.stderr_slope + 1e-9);
}

TEST_CASE("curve shapes on the forced cat map") {
  const SkewSystem cat = forced_cat();
  StepBudget budget(100'000'000);
  const PressureCurve curve =
      pressure_curve(cat, cat_potential(), q_range(-3, 3, 0.5), cat_options(), budget);
  CHECK(curve.convexity_defect <= 1e-2);
  const std::size_t zero = 6;
  REQUIRE(curve.q[zero] == 0.0);
  CHECK(curve.entropy == curve.pressure[zero]);

  const SpectrumCurve spectrum =
      legendre_conjugate(curve, {-0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5});
  CHECK(spectrum.concavity_defect <= 1e-2);
  for (std::size_t i = 0; i < spectrum.alpha.size(); ++i) {
    CHECK(spectrum.value[i] <= curve.entropy + 1e-12);
    if (spectrum.argmin_q[i] == 0.0) {
      CHECK(spectrum.value[i] == doctest::Approx(curve.entropy).epsilon(1e-6));
    }
  }
}

TEST_CASE("invalid pressure options") {
  const SkewSystem dbl = SkewSystem::doubling();
  StepBudget budget;
  CHECK_THROWS_AS(pressure_estimate(dbl, Observable::digit(), cylinder_options({8, 9}),
                                    budget),
                  Error);
  const SkewSystem cat = forced_cat();
  CHECK_THROWS_AS(pressure_estimate(cat, cat_potential(), cylinder_options(range(8, 12)),
                                    budget),
                  Error);
}
