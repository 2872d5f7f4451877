#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fiberdyn/counting.hpp"
#include "fiberdyn/error.hpp"
#include "fiberdyn/pressure.hpp"

using namespace fiberdyn;

namespace {

SkewSystem forced_cat() {
  return SkewSystem::affine_toral(
      DrivingSystem::rotation(std::sqrt(2.0) - 1.0), IntMatrix2{2, 1, 1, 1},
      Forcing{{0.1, {0.2}, {}}, {0.0, {}, {0.3}}});
}

// Words of length n over {0,1} whose digit average is within delta of alpha.
double brute_force_words(int n, double alpha, double delta) {
  double count = 0;
  for (std::uint32_t w = 0; w < (1u << n); ++w) {
    const double avg = __builtin_popcount(w) / double(n);
    count += std::abs(avg - alpha) < delta;
  }
  return count;
}

}  // namespace

TEST_CASE("deviation set membership") {
  const SkewSystem dbl = SkewSystem::doubling();
  const Observable c = Observable::constant(0.7);
  const FiberPoint x = make_point(0.123);
  CHECK(deviation_set_membership(dbl, c, BasePoint{}, x, 9, 0.7, 0.01));
  CHECK_FALSE(deviation_set_membership(dbl, c, BasePoint{}, x, 9, 0.7 + 0.02, 0.01));
  const Observable digit = Observable::digit();
  CHECK(deviation_set_membership(dbl, digit, BasePoint{}, make_point(1.0 / 3.0), 10,
                                 0.5, 0.06));
}

TEST_CASE("doubling map separated sets") {
  const SkewSystem dbl = SkewSystem::doubling();
  CHECK(max_separated_set(dbl, BasePoint{}, 1, 0.3).count() == 3);

  // Brute force on a 10^4-point circle grid: greedy packing with gap 0.3.
  std::vector<double> pts;
  for (int k = 0; k < 10000; ++k) pts.push_back(k / 10000.0);
  CHECK(arc_packing_count(pts, 0.3) == 3);

  // Against exact cylinder structure: log count - n log 2 stays bounded.
  std::vector<double> ns, logs;
  for (int n = 1; n <= 12; ++n) {
    StepBudget budget(1'000'000'000);
    const CandidateGrid grid = adapted_grid(dbl, BasePoint{}, 0.4, n, 200000);
    const SeparatedSet set =
        max_separated_set(dbl, BasePoint{}, n, 0.4, std::nullopt, grid, budget);
    const double exact = std::log(cylinder_count(Observable::digit(), n, 0.5, 1.0));
    CHECK(std::abs(std::log(double(set.count())) - exact) <= 0.05 * n);
    if (n >= 6) {
      ns.push_back(n);
      logs.push_back(std::log(double(set.count())));
    }
  }
  CHECK(fit_slope(ns, logs).slope == doctest::Approx(std::log(2.0)).epsilon(0.05));
}

TEST_CASE("impossible level gives the empty-set count") {
  const SkewSystem dbl = SkewSystem::doubling();
  const Observable digit = Observable::digit();
  const SeparatedSet set = max_separated_set(
      dbl, BasePoint{}, 5, 0.2,
      DeviationRestriction{digit, digit.sup_norm() + 1.0, 0.05});
  CHECK(set.points.empty());
  CHECK(set.restricted);
  CHECK(set.count() == 1);
  CHECK(log_cylinder_count(digit, 10, 1.5, 0.05) == -INFINITY);
}

TEST_CASE("cylinder counts against brute force") {
  const Observable digit = Observable::digit();
  CHECK(cylinder_count(digit, 10, 0.5, 0.051) == 252);
  CHECK(cylinder_count(digit, 10, 0.0, 0.051) == 1);
  CHECK(cylinder_count(digit, 10, 0.3, 0.11) == 375);
  for (double alpha : {0.0, 0.2, 0.35, 0.5, 0.81}) {
    for (double delta : {0.03, 0.1, 0.26}) {
      for (int n : {1, 7, 12, 16}) {
        CHECK(cylinder_count(digit, n, alpha, delta) ==
              brute_force_words(n, alpha, delta));
      }
    }
  }
  // The log form stays finite far beyond 2^53.
  const double l = log_cylinder_count(digit, 80, 0.5, 0.001);
  CHECK(l == doctest::Approx(std::lgamma(81.0) - 2 * std::lgamma(41.0)).epsilon(1e-12));
}

TEST_CASE("separated sets are certified and maximal") {
  const SkewSystem cat = forced_cat();
  const BasePoint w = BasePoint::at(0.37);
  for (int n : {2, 4, 6}) {
    StepBudget budget(100'000'000);
    const CandidateGrid grid = adapted_grid(cat, w, 0.1, n, 20000);
    const SeparatedSet set =
        max_separated_set(cat, w, n, 0.1, std::nullopt, grid, budget);
    CHECK(set.count() >= 1);
    CHECK(min_pairwise_distance(cat, set) > 0.1 - 1e-12);
    CHECK(covering_radius(cat, set, grid, std::nullopt) <= 0.1);
  }
}

TEST_CASE("one pass serves many n") {
  const SkewSystem cat = forced_cat();
  const BasePoint w = BasePoint::at(0.61);
  StepBudget budget(100'000'000);
  const CandidateGrid grid = adapted_grid(cat, w, 0.1, 5, 20000);
  const auto sets = separated_sets(cat, w, {3, 4, 5}, 0.1, grid, std::nullopt, budget);
  REQUIRE(sets.size() == 3);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const SeparatedSet single =
        max_separated_set(cat, w, sets[i].n, 0.1, std::nullopt, grid, budget);
    CHECK(single.points == sets[i].points);
  }
  CHECK(sets[0].count() <= sets[1].count());
  CHECK(sets[1].count() <= sets[2].count());
}

TEST_CASE("counts do not decrease as epsilon decreases on a fixed grid") {
  const SkewSystem cat = forced_cat();
  const BasePoint w = BasePoint::at(0.2);
  const CandidateGrid grid = lattice_grid(2, 0.01);
  std::size_t previous = 0;
  for (double eps : {0.3, 0.2, 0.1, 0.05}) {
    StepBudget budget(100'000'000);
    const std::size_t c =
        max_separated_set(cat, w, 3, eps, std::nullopt, grid, budget).count();
    CHECK(c >= previous);
    previous = c;
  }
}

TEST_CASE("N <= M <= N(eps/2) on the interval oracle") {
  const Observable digit = Observable::digit();
  for (double eps : {0.1, 0.2, 0.3}) {
    for (int n : {1, 3, 6}) {
      for (const auto &r :
           {std::optional<DeviationRestriction>{},
            std::optional<DeviationRestriction>{DeviationRestriction{digit, 0.5, 0.2}},
            std::optional<DeviationRestriction>{DeviationRestriction{digit, 3.0, 0.1}}}) {
        const auto full = doubling_interval_counts(n, eps, 4001, r);
        const auto half = doubling_interval_counts(n, eps / 2, 4001, r);
        CHECK(full.spanning <= full.separated);
        CHECK(full.separated <= half.spanning);
      }
    }
  }
}

TEST_CASE("arc covers") {
  CHECK(arc_cover_count({0.0, 0.1, 0.5}, 0.06) == 2);
  CHECK(arc_cover_count({0.95, 0.02}, 0.04) == 1);
  CHECK(arc_packing_count({0.0, 0.1, 0.5}, 0.2) == 2);
  CHECK(arc_cover_count({}, 0.1) == 0);
}

TEST_CASE("spanning counts") {
  const SkewSystem cat = forced_cat();
  const BasePoint w = BasePoint::at(0.5);
  const FiberPoint x = make_point(0.3, 0.4);
  CHECK(min_spanning_count(cat, w, 5, 0.1, {x}, 0.1) == 1);

  // A tight cluster is inside one ball.
  std::vector<FiberPoint> cluster;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> tiny(-1e-6, 1e-6);
  for (int i = 0; i < 50; ++i) cluster.push_back(translate(x, Vec2{tiny(rng), tiny(rng)}));
  CHECK(min_spanning_count(cat, w, 4, 0.1, cluster, 0.1) == 1);

  CHECK_THROWS_AS(min_spanning_count(cat, w, 4, 0.1, {}, 0.1), Error);
}

TEST_CASE("budget is reserved before work starts") {
  const SkewSystem cat = forced_cat();
  StepBudget budget(1000);
  const CandidateGrid grid = lattice_grid(2, 0.01);
  try {
    max_separated_set(cat, BasePoint::at(0.1), 5, 0.1, std::nullopt, grid, budget);
    FAIL("expected BudgetExceeded");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
  CHECK(budget.used() == 0);
}

TEST_CASE("count table csv") {
  const SkewSystem dbl = SkewSystem::doubling();
  CountTable table;
  table.add(max_separated_set(dbl, BasePoint{}, 1, 0.3), std::nullopt);
  const DeviationRestriction r{Observable::digit(), 0.5, 0.1};
  table.add(max_separated_set(dbl, BasePoint{}, 2, 0.3, r), r);
  std::ostringstream out;
  table.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,epsilon,alpha,delta,count,method");
  std::getline(in, line);
  CHECK(line.rfind("1,0.3,,,3,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("2,0.3,0.5,0.1,", 0) == 0);
}
