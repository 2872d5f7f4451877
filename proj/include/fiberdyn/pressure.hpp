#pragma once

// Partition sums over separated sets, finite-scale pressure, pressure curves
// in q, their Legendre conjugates and level-set counting rates.

#include <cstdint>
#include <string>
#include <vector>

#include "fiberdyn/counting.hpp"
#include "fiberdyn/observable.hpp"
#include "fiberdyn/skew_system.hpp"

namespace fiberdyn {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
SlopeFit fit_slope(const std::vector<double> &x, const std::vector<double> &y);

// S_n phi(omega, x) = sum_{i<n} phi(Theta^i(omega, x)).
double birkhoff_sum(const SkewSystem &sys, const Observable &phi,
                    const BasePoint &omega, const FiberPoint &x, int n);

// Z_n = sum_{x in Q} exp(S_n phi(omega, x)) and its logarithm, computed
// without overflow.
double partition_sum(const SkewSystem &sys, const Observable &phi,
                     const BasePoint &omega, const SeparatedSet &set, int n);
double log_partition_sum(const SkewSystem &sys, const Observable &phi,
                         const BasePoint &omega, const SeparatedSet &set,
                         int n);

enum class CountMethod { Grid, Cylinder };

std::string count_method_name(CountMethod method);

struct PressureOptions {
  double epsilon = 0.05;
  std::vector<int> n_values;  // arithmetic, at least 4 entries
  int omega_samples = 1;
  std::uint64_t seed = 1;
  // Cylinder: exact binary-word sums, doubling map with the digit observable.
  CountMethod method = CountMethod::Grid;
  std::size_t max_candidates = 200000;  // per base point
  int threads = 1;  // crosscheck rows run concurrently; results do not change
};

// Base points drawn uniformly from the base, reproducible from `seed`.
std::vector<BasePoint> sample_base_points(const SkewSystem &sys, int count,
                                          std::uint64_t seed);

struct PressureEstimate {
  double pressure = 0.0;
  double stderr_slope = 0.0;
  std::vector<BasePoint> omegas;
  std::vector<double> per_omega;
  // Largest deviation of a per-omega slope from the mean; the a.s. limit is
  // omega-independent.
  double omega_spread = 0.0;
  std::vector<int> n_values;
  std::vector<std::vector<double>> log_sums;  // [omega][n]
  double epsilon = 0.0;
  CountMethod method = CountMethod::Grid;
};

PressureEstimate pressure_estimate(const SkewSystem &sys,
                                   const Observable &phi,
                                   const PressureOptions &options,
                                   StepBudget &budget);

struct PressureCurve {
  std::vector<double> q;
  std::vector<double> pressure;
  std::vector<double> stderr_slope;
  std::vector<double> omega_spread;
  int n_min = 0, n_max = 0;
  double epsilon = 0.0;
  CountMethod method = CountMethod::Grid;
  double entropy = 0.0;  // the estimate at q = 0
  // Largest amount by which a grid value exceeds the chord of its
  // neighbours; 0 for a convex sample.
  double convexity_defect = 0.0;
};

// pressure_estimate of q*phi for every q, reusing one separated set per
// (omega, n) for the whole grid.
PressureCurve pressure_curve(const SkewSystem &sys, const Observable &phi,
                             const std::vector<double> &q_grid,
                             const PressureOptions &options,
                             StepBudget &budget, double q_max = 6.0);

struct SpectrumCurve {
  std::vector<double> alpha;
  std::vector<double> value;
  std::vector<double> argmin_q;
  // The minimum over the q grid sits at an endpoint, so the true infimum may
  // be lower.
  std::vector<bool> boundary;
  double concavity_defect = 0.0;
};

// min over the curve's q grid of pressure(q) - q * alpha.
SpectrumCurve legendre_conjugate(const PressureCurve &curve,
                                 const std::vector<double> &alpha_grid);

struct LevelSetRate {
  double rate = 0.0;  // slope at the smallest delta
  double stderr_slope = 0.0;
  std::vector<double> deltas;
  std::vector<double> slopes;
  // Every count at the smallest delta came from an empty deviation set.
  bool out_of_range = false;
  CountTable counts;
};

LevelSetRate level_set_rate(const SkewSystem &sys, const Observable &phi,
                            const BasePoint &omega, double alpha,
                            const std::vector<double> &delta_schedule,
                            const PressureOptions &options,
                            StepBudget &budget);

struct CrosscheckRow {
  double alpha = 0.0;
  int omega_index = 0;
  double counting_rate = 0.0;
  double legendre = 0.0;
  double discrepancy = 0.0;
  bool boundary = false;
  bool out_of_range = false;
};

struct CrosscheckReport {
  PressureCurve curve;
  SpectrumCurve spectrum;
  std::vector<CrosscheckRow> rows;
  // Over rows that are neither boundary-flagged nor out of range.
  double max_interior_discrepancy = 0.0;
};

CrosscheckReport spectrum_crosscheck(const SkewSystem &sys,
                                     const Observable &phi,
                                     const std::vector<double> &alpha_grid,
                                     const std::vector<double> &q_grid,
                                     const std::vector<double> &delta_schedule,
                                     const PressureOptions &options,
                                     StepBudget &budget);

}  // namespace fiberdyn
