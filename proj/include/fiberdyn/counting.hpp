#pragma once

// Separated and spanning sets for the fiber Bowen metric, and the
// deviation-restricted counts built on them.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fiberdyn/observable.hpp"
#include "fiberdyn/skew_system.hpp"

namespace fiberdyn {

inline constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

// Counts fiber steps. Work is reserved before it starts, so an oversized
// request is refused instead of being run partially.
class StepBudget {
 public:
  explicit StepBudget(std::uint64_t limit = kDefaultStepBudget)
      : limit_(limit) {}

  void reserve(std::uint64_t steps, const std::string &what);

  std::uint64_t limit() const { return limit_; }
  std::uint64_t used() const { return used_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

// origin + i*step1 + j*step2 for i < count1, j < count2, enumerated with i
// major. Steps are wrapping fixed-point offsets, so a grid may be a full
// lattice on the torus or a thin window along some direction.
struct CandidateGrid {
  int dimension = 2;
  FiberPoint origin;
  FiberPoint step1, step2;
  std::size_t count1 = 1, count2 = 1;
  double resolution = 0.0;  // largest spacing between neighbours
  std::string layout;

  std::size_t size() const { return count1 * count2; }
  FiberPoint point(std::size_t index) const;
};

// Axis-aligned lattice covering the whole fiber with spacing 1/K, K the
// smallest integer with 1/K <= spacing.
CandidateGrid lattice_grid(int dimension, double spacing);

// Grid resolving Bowen balls up to time n_max: spacing eps/8 along the least
// expanded singular direction of the linear part of F^{n_max-1} and eps/(8
// sigma_max) along the most expanded one. The whole fiber is used when it
// fits in `max_candidates`, otherwise a window of width about eps across the
// expanding direction.
CandidateGrid adapted_grid(const SkewSystem &sys, const BasePoint &omega,
                           double epsilon, int n_max,
                           std::size_t max_candidates);

struct DeviationRestriction {
  Observable phi;
  double alpha = 0.0;
  double delta = 0.0;
};

// |S_n phi(omega, x)/n - alpha| < delta.
bool deviation_set_membership(const SkewSystem &sys, const Observable &phi,
                              const BasePoint &omega, const FiberPoint &x,
                              int n, double alpha, double delta);

struct SeparatedSet {
  std::vector<FiberPoint> points;
  BasePoint omega;
  double epsilon = 0.0;
  int n = 1;
  std::string method = "grid";
  double resolution = 0.0;
  std::size_t candidates = 0;  // grid points examined
  std::size_t eligible = 0;    // grid points inside the deviation set
  bool restricted = false;

  // Cardinality with the convention that an empty deviation set counts 1.
  std::size_t count() const {
    return points.empty() && restricted ? 1 : points.size();
  }
};

// Greedy maximal (omega, eps, n)-separated subsets of the grid points (or of
// the grid points in the deviation set), one per requested n. Candidates are
// scanned once in grid order and each orbit is computed once up to max(ns).
std::vector<SeparatedSet> separated_sets(
    const SkewSystem &sys, const BasePoint &omega, const std::vector<int> &ns,
    double epsilon, const CandidateGrid &grid,
    const std::optional<DeviationRestriction> &restriction,
    StepBudget &budget);

SeparatedSet max_separated_set(
    const SkewSystem &sys, const BasePoint &omega, int n, double epsilon,
    const std::optional<DeviationRestriction> &restriction,
    const CandidateGrid &grid, StepBudget &budget);

// Same with the default lattice grid of spacing eps/8.
SeparatedSet max_separated_set(
    const SkewSystem &sys, const BasePoint &omega, int n, double epsilon,
    const std::optional<DeviationRestriction> &restriction = std::nullopt);

// Smallest pairwise Bowen distance within the set (infinity below 2 points).
double min_pairwise_distance(const SkewSystem &sys, const SeparatedSet &set);

// Largest distance from an eligible grid point to the set; maximality means
// this is <= eps.
double covering_radius(const SkewSystem &sys, const SeparatedSet &set,
                       const CandidateGrid &grid,
                       const std::optional<DeviationRestriction> &restriction);

// Number of binary words of length n whose digit observable average lies
// within delta of alpha: sum of C(n, j) over admissible j. Exact below 2^53.
double cylinder_count(const Observable &phi, int n, double alpha,
                      double delta);
// log of the same count, -infinity when no word qualifies.
double log_cylinder_count(const Observable &phi, int n, double alpha,
                          double delta);

// Exact counts for finite point sets on the circle. Used with the doubling
// map, whose closed Bowen eps-ball at time n is the arc of radius
// eps*2^{-(n-1)} when eps < 1/3.
// Fewest open arcs of radius `radius` covering the points.
std::size_t arc_cover_count(std::vector<double> points, double radius);
// Largest subset with pairwise circular distance > `gap`.
std::size_t arc_packing_count(std::vector<double> points, double gap);

struct IntervalOracleCounts {
  std::size_t spanning = 0;   // N(alpha, delta, n, eps)
  std::size_t separated = 0;  // M(alpha, delta, n, eps)
  std::size_t points = 0;     // grid points in the deviation set
};

// N and M for the doubling map on the grid k/K (K odd), restricted to the
// deviation set of the digit observable when `restriction` is given. Both
// counts follow the empty-set convention.
IntervalOracleCounts doubling_interval_counts(
    int n, double epsilon, std::size_t grid_size,
    const std::optional<DeviationRestriction> &restriction);

// Greedy set cover of `sample` by closed Bowen eps-balls centred at sample
// points until at least (1 - delta) of the sample is covered. An upper bound
// on the minimal spanning count.
std::size_t min_spanning_count(const SkewSystem &sys, const BasePoint &omega,
                               int n, double epsilon,
                               const std::vector<FiberPoint> &sample,
                               double delta, StepBudget &budget);
std::size_t min_spanning_count(const SkewSystem &sys, const BasePoint &omega,
                               int n, double epsilon,
                               const std::vector<FiberPoint> &sample,
                               double delta);

struct CountRow {
  int n = 0;
  double epsilon = 0.0;
  std::optional<double> alpha, delta;
  double count = 0.0;
  std::string method;
};

struct CountTable {
  std::vector<CountRow> rows;

  void add(const SeparatedSet &set,
           const std::optional<DeviationRestriction> &restriction);
  // Columns n,epsilon,alpha,delta,count,method; unrestricted rows leave alpha
  // and delta empty.
  void write_csv(std::ostream &out) const;
};

}  // namespace fiberdyn
