#include "fiberdyn/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fiberdyn/error.hpp"
#include "parallel.hpp"

namespace fiberdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double> &terms) {
  if (terms.empty()) return kNegInf;
  const double top = *std::max_element(terms.begin(), terms.end());
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

double log_sum_exp_scaled(const std::vector<double> &sums, double q) {
  std::vector<double> terms(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) terms[i] = q * sums[i];
  return log_sum_exp(terms);
}

double log_binomial(int n, int j) {
  return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
}

void check_options(const PressureOptions &o) {
  const auto &ns = o.n_values;
  if (ns.size() < 4) {
    throw Error(ErrorKind::InvalidArgument, "n range needs at least 4 entries");
  }
  const int step = ns[1] - ns[0];
  if (ns[0] < 1 || step < 1) {
    throw Error(ErrorKind::InvalidArgument, "n range must increase from n >= 1");
  }
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] - ns[i - 1] != step) {
      throw Error(ErrorKind::InvalidArgument, "n range must be arithmetic");
    }
  }
  if (o.omega_samples < 1) {
    throw Error(ErrorKind::InvalidArgument, "need at least one base sample");
  }
  if (!(o.epsilon > 0.0 && o.epsilon < 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1/2)");
  }
}

void check_cylinder(const SkewSystem &sys, const Observable &phi) {
  if (sys.kind() != FiberKind::Doubling || phi.kind() != ObservableKind::Digit) {
    throw Error(ErrorKind::InvalidArgument,
                "cylinder sums need the doubling map and the digit observable");
  }
}

// log Z_n(q phi) over the 2^n cylinders of the doubling map.
double cylinder_log_sum(const Observable &phi, int n, double q) {
  const double v0 = phi.digit_value(0), v1 = phi.digit_value(1);
  std::vector<double> terms(n + 1);
  for (int j = 0; j <= n; ++j) {
    terms[j] = log_binomial(n, j) + q * ((n - j) * v0 + j * v1);
  }
  return log_sum_exp(terms);
}

// S_n phi at every member of every separated set, per base point.
struct SampledSums {
  std::vector<BasePoint> omegas;
  std::vector<std::vector<std::vector<double>>> sums;  // [omega][n][member]
};

SampledSums grid_sums(const SkewSystem &sys, const Observable &phi,
                      const PressureOptions &o, StepBudget &budget) {
  SampledSums out;
  out.omegas = sample_base_points(sys, o.omega_samples, o.seed);
  const int n_max = o.n_values.back();
  for (const BasePoint &omega : out.omegas) {
    const CandidateGrid grid =
        adapted_grid(sys, omega, o.epsilon, n_max, o.max_candidates);
    const std::vector<SeparatedSet> sets = separated_sets(
        sys, omega, o.n_values, o.epsilon, grid, std::nullopt, budget);
    const FiberSchedule schedule(sys, omega, n_max);
    std::vector<BasePoint> bases(n_max);
    bases[0] = omega;
    for (int i = 1; i < n_max; ++i) bases[i] = base_step(sys.base(), bases[i - 1], 1);

    std::vector<std::vector<double>> per_n;
    std::vector<FiberPoint> orbit(n_max);
    for (const SeparatedSet &set : sets) {
      budget.reserve(set.points.size() * static_cast<std::uint64_t>(set.n),
                     "Birkhoff sums");
      std::vector<double> s;
      s.reserve(set.points.size());
      for (const FiberPoint &x : set.points) {
        schedule.orbit(x, set.n, orbit.data());
        double acc = 0.0;
        for (int i = 0; i < set.n; ++i) acc += phi(bases[i], orbit[i]);
        s.push_back(acc);
      }
      per_n.push_back(std::move(s));
    }
    out.sums.push_back(std::move(per_n));
  }
  return out;
}

std::vector<double> as_doubles(const std::vector<int> &v) {
  return std::vector<double>(v.begin(), v.end());
}

struct Aggregate {
  double mean = 0.0, stderr_slope = 0.0, spread = 0.0;
  std::vector<double> slopes;
};

Aggregate aggregate(const std::vector<double> &ns,
                    const std::vector<std::vector<double>> &log_sums) {
  Aggregate a;
  double var = 0.0;
  for (const auto &ys : log_sums) {
    const SlopeFit f = fit_slope(ns, ys);
    a.slopes.push_back(f.slope);
    a.mean += f.slope;
    var += f.stderr_slope * f.stderr_slope;
  }
  const double m = static_cast<double>(log_sums.size());
  a.mean /= m;
  a.stderr_slope = std::sqrt(var) / m;
  for (double s : a.slopes) a.spread = std::max(a.spread, std::abs(s - a.mean));
  return a;
}

}  // namespace

SlopeFit fit_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "slope fit needs >= 2 matched points");
  }
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "degenerate x values");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (f.slope * x[i] + f.intercept);
      ssr += r * r;
    }
    f.stderr_slope = std::sqrt(ssr / (m - 2.0) / sxx);
  }
  return f;
}

double birkhoff_sum(const SkewSystem &sys, const Observable &phi,
                    const BasePoint &omega, const FiberPoint &x, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  double sum = 0.0;
  BasePoint w = omega;
  FiberPoint p = x;
  for (int i = 0; i < n; ++i) {
    sum += phi(w, p);
    if (i + 1 < n) {
      p = sys.step_at(w).apply(p);
      w = base_step(sys.base(), w, 1);
    }
  }
  return sum;
}

double log_partition_sum(const SkewSystem &sys, const Observable &phi,
                         const BasePoint &omega, const SeparatedSet &set,
                         int n) {
  std::vector<double> terms;
  terms.reserve(set.points.size());
  for (const FiberPoint &x : set.points) {
    terms.push_back(birkhoff_sum(sys, phi, omega, x, n));
  }
  return log_sum_exp(terms);
}

double partition_sum(const SkewSystem &sys, const Observable &phi,
                     const BasePoint &omega, const SeparatedSet &set, int n) {
  double z = 0.0;
  for (const FiberPoint &x : set.points) {
    z += std::exp(birkhoff_sum(sys, phi, omega, x, n));
  }
  return z;
}

std::string count_method_name(CountMethod method) {
  return method == CountMethod::Grid ? "grid" : "cylinder";
}

std::vector<BasePoint> sample_base_points(const SkewSystem &sys, int count,
                                          std::uint64_t seed) {
  std::vector<BasePoint> out;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const Turn t = rng();
    out.push_back(sys.base().kind() == BaseKind::Point ? BasePoint{}
                                                       : BasePoint{t});
  }
  return out;
}

PressureEstimate pressure_estimate(const SkewSystem &sys,
                                   const Observable &phi,
                                   const PressureOptions &options,
                                   StepBudget &budget) {
  check_options(options);
  PressureEstimate e;
  e.n_values = options.n_values;
  e.epsilon = options.epsilon;
  e.method = options.method;
  if (options.method == CountMethod::Cylinder) {
    check_cylinder(sys, phi);
    std::vector<double> ys;
    for (int n : options.n_values) ys.push_back(cylinder_log_sum(phi, n, 1.0));
    e.omegas = {BasePoint{}};
    e.log_sums = {ys};
  } else {
    const SampledSums s = grid_sums(sys, phi, options, budget);
    e.omegas = s.omegas;
    for (const auto &per_n : s.sums) {
      std::vector<double> ys;
      for (const auto &sums : per_n) ys.push_back(log_sum_exp_scaled(sums, 1.0));
      e.log_sums.push_back(ys);
    }
  }
  const Aggregate a = aggregate(as_doubles(options.n_values), e.log_sums);
  e.pressure = a.mean;
  e.stderr_slope = a.stderr_slope;
  e.omega_spread = a.spread;
  e.per_omega = a.slopes;
  return e;
}

PressureCurve pressure_curve(const SkewSystem &sys, const Observable &phi,
                             const std::vector<double> &q_grid,
                             const PressureOptions &options,
                             StepBudget &budget, double q_max) {
  check_options(options);
  if (q_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty q grid");
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (std::abs(q_grid[i]) > q_max) {
      throw Error(ErrorKind::InvalidArgument, "|q| exceeds q_max");
    }
    if (i > 0 && !(q_grid[i] > q_grid[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "q grid must be increasing");
    }
  }

  const std::vector<double> ns = as_doubles(options.n_values);
  PressureCurve curve;
  curve.q = q_grid;
  curve.n_min = options.n_values.front();
  curve.n_max = options.n_values.back();
  curve.epsilon = options.epsilon;
  curve.method = options.method;

  auto add_point = [&](const std::vector<std::vector<double>> &log_sums,
                       bool record) {
    const Aggregate a = aggregate(ns, log_sums);
    if (record) {
      curve.pressure.push_back(a.mean);
      curve.stderr_slope.push_back(a.stderr_slope);
      curve.omega_spread.push_back(a.spread);
    }
    return a.mean;
  };

  if (options.method == CountMethod::Cylinder) {
    check_cylinder(sys, phi);
    auto sums_at = [&](double q) {
      std::vector<double> ys;
      for (int n : options.n_values) ys.push_back(cylinder_log_sum(phi, n, q));
      return std::vector<std::vector<double>>{ys};
    };
    for (double q : q_grid) add_point(sums_at(q), true);
    curve.entropy = add_point(sums_at(0.0), false);
  } else {
    const SampledSums s = grid_sums(sys, phi, options, budget);
    auto sums_at = [&](double q) {
      std::vector<std::vector<double>> out;
      for (const auto &per_n : s.sums) {
        std::vector<double> ys;
        for (const auto &sums : per_n) ys.push_back(log_sum_exp_scaled(sums, q));
        out.push_back(ys);
      }
      return out;
    };
    for (double q : q_grid) add_point(sums_at(q), true);
    curve.entropy = add_point(sums_at(0.0), false);
  }

  for (std::size_t i = 1; i + 1 < q_grid.size(); ++i) {
    const double t = (q_grid[i] - q_grid[i - 1]) / (q_grid[i + 1] - q_grid[i - 1]);
    const double chord =
        curve.pressure[i - 1] + t * (curve.pressure[i + 1] - curve.pressure[i - 1]);
    curve.convexity_defect =
        std::max(curve.convexity_defect, curve.pressure[i] - chord);
  }
  return curve;
}

SpectrumCurve legendre_conjugate(const PressureCurve &curve,
                                 const std::vector<double> &alpha_grid) {
  if (curve.q.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "Legendre transform needs >= 3 points");
  }
  SpectrumCurve out;
  out.alpha = alpha_grid;
  const std::size_t last = curve.q.size() - 1;
  for (double a : alpha_grid) {
    std::size_t best = 0;
    double value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= last; ++i) {
      const double v = curve.pressure[i] - curve.q[i] * a;
      if (v < value) {
        value = v;
        best = i;
      }
    }
    out.value.push_back(value);
    out.argmin_q.push_back(curve.q[best]);
    out.boundary.push_back(best == 0 || best == last);
  }
  for (std::size_t i = 1; i + 1 < alpha_grid.size(); ++i) {
    const double span = alpha_grid[i + 1] - alpha_grid[i - 1];
    if (!(span > 0.0)) continue;
    const double t = (alpha_grid[i] - alpha_grid[i - 1]) / span;
    const double chord = out.value[i - 1] + t * (out.value[i + 1] - out.value[i - 1]);
    out.concavity_defect = std::max(out.concavity_defect, chord - out.value[i]);
  }
  return out;
}

LevelSetRate level_set_rate(const SkewSystem &sys, const Observable &phi,
                            const BasePoint &omega, double alpha,
                            const std::vector<double> &delta_schedule,
                            const PressureOptions &options,
                            StepBudget &budget) {
  check_options(options);
  if (delta_schedule.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empty delta schedule");
  }
  for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
    if (!(delta_schedule[i] > 0.0) ||
        (i > 0 && !(delta_schedule[i] < delta_schedule[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument,
                  "delta schedule must be positive and strictly decreasing");
    }
  }
  if (options.method == CountMethod::Cylinder) check_cylinder(sys, phi);

  const std::vector<double> ns = as_doubles(options.n_values);
  LevelSetRate out;
  out.deltas = delta_schedule;
  SlopeFit last_fit;
  bool all_empty = false;
  for (double delta : delta_schedule) {
    std::vector<double> ys;
    all_empty = true;
    if (options.method == CountMethod::Cylinder) {
      for (int n : options.n_values) {
        const double lc = log_cylinder_count(phi, n, alpha, delta);
        const bool empty = lc == kNegInf;
        all_empty = all_empty && empty;
        ys.push_back(empty ? 0.0 : lc);
        CountRow row;
        row.n = n;
        row.epsilon = options.epsilon;
        row.alpha = alpha;
        row.delta = delta;
        row.count = empty ? 1.0 : std::exp(lc);
        row.method = "cylinder";
        out.counts.rows.push_back(row);
      }
    } else {
      const DeviationRestriction r{phi, alpha, delta};
      const CandidateGrid grid = adapted_grid(sys, omega, options.epsilon,
                                              options.n_values.back(),
                                              options.max_candidates);
      for (const SeparatedSet &set :
           separated_sets(sys, omega, options.n_values, options.epsilon, grid,
                          r, budget)) {
        all_empty = all_empty && set.points.empty();
        ys.push_back(std::log(static_cast<double>(set.count())));
        out.counts.add(set, r);
      }
    }
    last_fit = fit_slope(ns, ys);
    out.slopes.push_back(last_fit.slope);
  }
  out.rate = last_fit.slope;
  out.stderr_slope = last_fit.stderr_slope;
  out.out_of_range = all_empty;
  return out;
}

CrosscheckReport spectrum_crosscheck(const SkewSystem &sys,
                                     const Observable &phi,
                                     const std::vector<double> &alpha_grid,
                                     const std::vector<double> &q_grid,
                                     const std::vector<double> &delta_schedule,
                                     const PressureOptions &options,
                                     StepBudget &budget) {
  CrosscheckReport report;
  report.curve = pressure_curve(sys, phi, q_grid, options, budget);
  report.spectrum = legendre_conjugate(report.curve, alpha_grid);
  const std::vector<BasePoint> omegas =
      options.method == CountMethod::Cylinder
          ? std::vector<BasePoint>{BasePoint{}}
          : sample_base_points(sys, options.omega_samples, options.seed);
  // Each (omega, alpha) row gets an equal slice of the remaining budget, so
  // the outcome, refusals included, does not depend on the thread count.
  const std::size_t rows = omegas.size() * alpha_grid.size();
  const std::uint64_t slice =
      rows == 0 ? 0 : (budget.limit() - budget.used()) / rows;
  std::vector<LevelSetRate> rates(rows);
  std::vector<std::uint64_t> used(rows, 0);
  detail::parallel_for(rows, options.threads, [&](std::size_t r) {
    StepBudget local(slice);
    rates[r] = level_set_rate(sys, phi, omegas[r / alpha_grid.size()],
                              alpha_grid[r % alpha_grid.size()],
                              delta_schedule, options, local);
    used[r] = local.used();
  });
  std::uint64_t total = 0;
  for (std::uint64_t u : used) total += u;
  budget.reserve(total, "level-set counts");

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = r % alpha_grid.size();
    CrosscheckRow row;
    row.alpha = alpha_grid[i];
    row.omega_index = static_cast<int>(r / alpha_grid.size());
    row.counting_rate = rates[r].rate;
    row.legendre = report.spectrum.value[i];
    row.discrepancy = std::abs(row.counting_rate - row.legendre);
    row.boundary = report.spectrum.boundary[i];
    row.out_of_range = rates[r].out_of_range;
    if (!row.boundary && !row.out_of_range) {
      report.max_interior_discrepancy =
          std::max(report.max_interior_discrepancy, row.discrepancy);
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace fiberdyn
