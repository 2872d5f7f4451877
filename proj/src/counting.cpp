#include "fiberdyn/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "fiberdyn/error.hpp"

namespace fiberdyn {

namespace {

using u128 = unsigned __int128;

Turn turn_mul(Turn step, std::size_t k) { return step * static_cast<Turn>(k); }

// Cells of side >= eps at time n-1 and of side >= eps * time0_scale at time
// 0: points whose orbits stay within eps lie in the same or adjacent cells at
// both times.
class CellGeometry {
 public:
  CellGeometry(double epsilon, int dimension, double time0_scale = 1.0)
      : dimension_(dimension) {
    slot_bits_ = 32 / dimension;
    const double cap = std::ldexp(1.0, slot_bits_) - 1.0;
    cells_[0] = count(epsilon * time0_scale, cap);
    cells_[1] = count(epsilon, cap);
  }

  // Up to 3 distinct neighbour cells of c, including c.
  int neighbours(std::uint32_t c, std::uint32_t cells, std::uint32_t *out) const {
    if (cells <= 3) {
      for (std::uint32_t i = 0; i < cells; ++i) out[i] = i;
      return static_cast<int>(cells);
    }
    out[0] = c;
    out[1] = (c + 1) % cells;
    out[2] = (c + cells - 1) % cells;
    return 3;
  }

  std::uint64_t key(const FiberPoint *orbit, int n) const {
    std::uint64_t k = 0;
    for (int slot = 0; slot < 2; ++slot) {
      const FiberPoint &p = orbit[slot == 0 ? 0 : n - 1];
      for (int j = 0; j < dimension_; ++j) {
        k = (k << slot_bits_) | cell(p.c[j], cells_[slot]);
      }
    }
    return k;
  }

  template <class Fn>
  void for_each_neighbour_key(const FiberPoint *orbit, int n, Fn &&fn) const {
    std::uint32_t lists[4][3];
    int sizes[4];
    int slots = 0;
    for (int slot = 0; slot < 2; ++slot) {
      const FiberPoint &p = orbit[slot == 0 ? 0 : n - 1];
      for (int j = 0; j < dimension_; ++j) {
        sizes[slots] = neighbours(cell(p.c[j], cells_[slot]), cells_[slot],
                                  lists[slots]);
        ++slots;
      }
    }
    int idx[4] = {0, 0, 0, 0};
    while (true) {
      std::uint64_t k = 0;
      for (int s = 0; s < slots; ++s) k = (k << slot_bits_) | lists[s][idx[s]];
      fn(k);
      int s = slots - 1;
      while (s >= 0 && ++idx[s] == sizes[s]) idx[s--] = 0;
      if (s < 0) break;
    }
  }

 private:
  static std::uint32_t count(double side, double cap) {
    return static_cast<std::uint32_t>(std::clamp(std::floor(1.0 / side), 1.0, cap));
  }
  static std::uint32_t cell(Turn x, std::uint32_t cells) {
    return static_cast<std::uint32_t>((static_cast<u128>(x) * cells) >> 64);
  }

  int dimension_;
  int slot_bits_;
  std::uint32_t cells_[2];
};

// On a circle fiber, while eps * |A| < 1/2 the difference of two orbits that
// stay eps-close evolves linearly, so they start within eps / |A^(n-1)|.
double time0_scale(const SkewSystem &sys, const BasePoint &omega, int n,
                   double epsilon) {
  if (sys.dimension() != 1 || n < 2) return 1.0;
  if (!(epsilon * sys.max_operator_norm() < 0.5)) return 1.0;
  return 1.0 / singular_frame(linear_product(sys, omega, n - 1)).sigma_max;
}

// d(a_i, b_i) <= eps for every i < n, with eps2 = (eps * 2^64)^2 so that
// raw coordinate differences can be compared directly. The last time is
// checked first since it separates expanding orbits soonest.
bool within(const FiberPoint *a, const FiberPoint *b, int n, double eps2) {
  auto close = [&](int i) {
    const auto dx = static_cast<double>(static_cast<std::int64_t>(a[i].c[0] - b[i].c[0]));
    const auto dy = static_cast<double>(static_cast<std::int64_t>(a[i].c[1] - b[i].c[1]));
    return dx * dx + dy * dy <= eps2;
  };
  if (!close(n - 1)) return false;
  for (int i = 0; i + 1 < n; ++i) {
    if (!close(i)) return false;
  }
  return true;
}

double scaled_eps2(double epsilon) {
  const double e = epsilon * 0x1p64;
  return e * e;
}

double orbit_distance(const FiberPoint *a, const FiberPoint *b, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, torus_distance(a[i], b[i]));
  return worst;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1/2)");
  }
}

std::vector<BasePoint> base_orbit(const SkewSystem &sys, const BasePoint &omega,
                                  int n) {
  std::vector<BasePoint> out(n);
  BasePoint w = omega;
  for (int i = 0; i < n; ++i) {
    out[i] = w;
    w = base_step(sys.base(), w, 1);
  }
  return out;
}

bool admissible(double sum, int n, const DeviationRestriction &r) {
  return std::abs(sum / n - r.alpha) < r.delta;
}

// Sorted, de-duplicated circle positions laid out over three turns.
std::vector<double> unrolled(std::vector<double> points) {
  for (double &p : points) p -= std::floor(p);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t k = points.size();
  std::vector<double> out(3 * k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = points[i];
    out[i + k] = points[i] + 1.0;
    out[i + 2 * k] = points[i] + 2.0;
  }
  return out;
}

}  // namespace

void StepBudget::reserve(std::uint64_t steps, const std::string &what) {
  if (steps > limit_ || used_ > limit_ - steps) {
    throw Error(ErrorKind::BudgetExceeded,
                what + " needs " + std::to_string(steps) +
                    " fiber steps; budget has " +
                    std::to_string(limit_ - std::min(used_, limit_)) + " left");
  }
  used_ += steps;
}

FiberPoint CandidateGrid::point(std::size_t index) const {
  const std::size_t i = index / count2;
  const std::size_t j = index % count2;
  FiberPoint p = origin;
  for (int k = 0; k < 2; ++k) {
    p.c[k] += turn_mul(step1.c[k], i) + turn_mul(step2.c[k], j);
  }
  if (dimension == 1) p.c[1] = 0;
  return p;
}

CandidateGrid lattice_grid(int dimension, double spacing) {
  if (!(spacing > 0.0) || spacing > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "grid spacing must lie in (0, 1]");
  }
  const double k_real = std::ceil(1.0 / spacing - 1e-9);
  if (k_real > 4e9) {
    throw Error(ErrorKind::InvalidArgument, "grid spacing too fine");
  }
  const auto k = static_cast<std::uint64_t>(k_real);
  const Turn step = static_cast<Turn>((static_cast<u128>(1) << 64) / k);

  CandidateGrid g;
  g.dimension = dimension;
  g.step1.c[0] = step;
  g.count1 = k;
  if (dimension == 2) {
    g.step2.c[1] = step;
    g.count2 = k;
  }
  g.resolution = 1.0 / static_cast<double>(k);
  g.layout = "lattice";
  return g;
}

CandidateGrid adapted_grid(const SkewSystem &sys, const BasePoint &omega,
                           double epsilon, int n_max,
                           std::size_t max_candidates) {
  check_epsilon(epsilon);
  if (n_max < 1 || max_candidates < 1) {
    throw Error(ErrorKind::InvalidArgument, "n_max and the cap must be >= 1");
  }

  if (sys.dimension() == 1) {
    const double spacing = epsilon / (8.0 * std::ldexp(1.0, n_max - 1));
    if (std::ceil(1.0 / spacing) <= static_cast<double>(max_candidates)) {
      return lattice_grid(1, spacing);
    }
    CandidateGrid g;
    g.dimension = 1;
    g.step1.c[0] = turn_from_double(spacing);
    g.count1 = max_candidates;
    g.resolution = spacing;
    g.layout = "window";
    return g;
  }

  const SingularFrame sf = singular_frame(linear_product(sys, omega, n_max - 1));
  const double fine = epsilon / (8.0 * sf.sigma_max);
  const double coarse = epsilon / (8.0 * std::max(1.0, sf.sigma_min));
  const double per_axis = std::ceil(1.0 / fine);
  if (per_axis * per_axis <= static_cast<double>(max_candidates)) {
    return lattice_grid(2, fine);
  }

  CandidateGrid g;
  g.dimension = 2;
  g.count2 = static_cast<std::size_t>(std::ceil(epsilon / coarse)) + 1;
  g.count1 = std::max<std::size_t>(1, max_candidates / g.count2);
  const Vec2 v1 = sf.most_expanded, v2 = sf.least_expanded;
  g.step1 = FiberPoint{{turn_from_double(fine * v1[0]),
                        turn_from_double(fine * v1[1])}};
  g.step2 = FiberPoint{{turn_from_double(coarse * v2[0]),
                        turn_from_double(coarse * v2[1])}};
  // Centred on a fixed generic point.
  const double h1 = 0.5 * fine * static_cast<double>(g.count1 - 1);
  const double h2 = 0.5 * coarse * static_cast<double>(g.count2 - 1);
  g.origin = make_point(0.3183098861837907 - h1 * v1[0] - h2 * v2[0],
                        0.6180339887498949 - h1 * v1[1] - h2 * v2[1]);
  g.resolution = coarse;
  g.layout = "window";
  return g;
}

bool deviation_set_membership(const SkewSystem &sys, const Observable &phi,
                              const BasePoint &omega, const FiberPoint &x,
                              int n, double alpha, double delta) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
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
  return std::abs(sum / n - alpha) < delta;
}

std::vector<SeparatedSet> separated_sets(
    const SkewSystem &sys, const BasePoint &omega, const std::vector<int> &ns,
    double epsilon, const CandidateGrid &grid,
    const std::optional<DeviationRestriction> &restriction,
    StepBudget &budget) {
  check_epsilon(epsilon);
  if (ns.empty()) throw Error(ErrorKind::InvalidArgument, "no n requested");
  for (int n : ns) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  }
  if (restriction && !(restriction->delta > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
  }
  if (grid.dimension != sys.dimension()) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension does not match");
  }
  const int n_max = *std::max_element(ns.begin(), ns.end());
  const std::size_t size = grid.size();
  budget.reserve(static_cast<std::uint64_t>(size) * n_max,
                 "separated-set search");

  const FiberSchedule schedule(sys, omega, n_max);
  std::vector<BasePoint> bases;
  if (restriction) bases = base_orbit(sys, omega, n_max);
  const double eps2 = scaled_eps2(epsilon);

  struct Selector {
    int n;
    CellGeometry geometry;
    std::vector<FiberPoint> orbits;  // stride n
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells;
    SeparatedSet set;
  };
  std::vector<Selector> selectors;
  for (int n : ns) {
    Selector s{n, CellGeometry(epsilon, sys.dimension(),
                               time0_scale(sys, omega, n, epsilon)),
               {}, {}, {}};
    s.set.omega = omega;
    s.set.epsilon = epsilon;
    s.set.n = n;
    s.set.method = "grid";
    s.set.resolution = grid.resolution;
    s.set.candidates = size;
    s.set.restricted = restriction.has_value();
    selectors.push_back(std::move(s));
  }

  std::vector<FiberPoint> orbit(n_max);
  std::vector<double> prefix(n_max + 1, 0.0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    schedule.orbit(grid.point(idx), n_max, orbit.data());
    if (restriction) {
      for (int i = 0; i < n_max; ++i) {
        prefix[i + 1] = prefix[i] + restriction->phi(bases[i], orbit[i]);
      }
    }
    for (Selector &s : selectors) {
      if (restriction && !admissible(prefix[s.n], s.n, *restriction)) continue;
      ++s.set.eligible;
      bool conflict = false;
      s.geometry.for_each_neighbour_key(orbit.data(), s.n, [&](std::uint64_t k) {
        if (conflict) return;
        auto it = s.cells.find(k);
        if (it == s.cells.end()) return;
        for (std::uint32_t m : it->second) {
          if (within(orbit.data(), &s.orbits[std::size_t(m) * s.n], s.n, eps2)) {
            conflict = true;
            return;
          }
        }
      });
      if (conflict) continue;
      const auto member = static_cast<std::uint32_t>(s.set.points.size());
      s.set.points.push_back(orbit[0]);
      s.orbits.insert(s.orbits.end(), orbit.begin(), orbit.begin() + s.n);
      s.cells[s.geometry.key(orbit.data(), s.n)].push_back(member);
    }
  }

  std::vector<SeparatedSet> out;
  for (Selector &s : selectors) out.push_back(std::move(s.set));
  return out;
}

SeparatedSet max_separated_set(
    const SkewSystem &sys, const BasePoint &omega, int n, double epsilon,
    const std::optional<DeviationRestriction> &restriction,
    const CandidateGrid &grid, StepBudget &budget) {
  return separated_sets(sys, omega, {n}, epsilon, grid, restriction, budget)
      .front();
}

SeparatedSet max_separated_set(
    const SkewSystem &sys, const BasePoint &omega, int n, double epsilon,
    const std::optional<DeviationRestriction> &restriction) {
  check_epsilon(epsilon);
  StepBudget budget;
  return max_separated_set(sys, omega, n, epsilon, restriction,
                           lattice_grid(sys.dimension(), epsilon / 8.0),
                           budget);
}

double min_pairwise_distance(const SkewSystem &sys, const SeparatedSet &set) {
  const int n = set.n;
  const FiberSchedule schedule(sys, set.omega, n);
  const std::size_t k = set.points.size();
  std::vector<FiberPoint> orbits(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    schedule.orbit(set.points[i], n, &orbits[i * n]);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      best = std::min(best, orbit_distance(&orbits[i * n], &orbits[j * n], n));
    }
  }
  return best;
}

double covering_radius(const SkewSystem &sys, const SeparatedSet &set,
                       const CandidateGrid &grid,
                       const std::optional<DeviationRestriction> &restriction) {
  const int n = set.n;
  const FiberSchedule schedule(sys, set.omega, n);
  const std::size_t k = set.points.size();
  std::vector<FiberPoint> orbits(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    schedule.orbit(set.points[i], n, &orbits[i * n]);
  }
  std::vector<FiberPoint> orbit(n);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const FiberPoint p = grid.point(idx);
    if (restriction &&
        !deviation_set_membership(sys, restriction->phi, set.omega, p, n,
                                  restriction->alpha, restriction->delta)) {
      continue;
    }
    schedule.orbit(p, n, orbit.data());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      best = std::min(best, orbit_distance(orbit.data(), &orbits[i * n], n));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

namespace {

void check_digit(const Observable &phi, int n, double delta) {
  if (phi.kind() != ObservableKind::Digit) {
    throw Error(ErrorKind::InvalidArgument,
                "cylinder counts need the first-digit observable");
  }
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
}

double log_binomial(int n, int j) {
  return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
}

}  // namespace

double cylinder_count(const Observable &phi, int n, double alpha,
                      double delta) {
  check_digit(phi, n, delta);
  std::vector<double> row(n + 1, 0.0);
  row[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    for (int j = m; j > 0; --j) row[j] += row[j - 1];
  }
  const double v0 = phi.digit_value(0), v1 = phi.digit_value(1);
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double avg = ((n - j) * v0 + j * v1) / n;
    if (std::abs(avg - alpha) < delta) total += row[j];
  }
  return total;
}

double log_cylinder_count(const Observable &phi, int n, double alpha,
                          double delta) {
  check_digit(phi, n, delta);
  const double v0 = phi.digit_value(0), v1 = phi.digit_value(1);
  std::vector<double> terms;
  for (int j = 0; j <= n; ++j) {
    const double avg = ((n - j) * v0 + j * v1) / n;
    if (std::abs(avg - alpha) < delta) terms.push_back(log_binomial(n, j));
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

std::size_t arc_cover_count(std::vector<double> points, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
  const std::vector<double> p = unrolled(std::move(points));
  const std::size_t k = p.size() / 3;
  if (k == 0) return 0;
  const double width = 2.0 * radius;
  if (width >= 1.0) return 1;

  // next[i]: first point an open arc starting at p[i] fails to reach.
  std::vector<std::size_t> next(2 * k);
  std::size_t j = 0;
  for (std::size_t i = 0; i < 2 * k; ++i) {
    j = std::max(j, i + 1);
    while (j < i + k && p[j] - p[i] < width) ++j;
    next[i] = j;
  }
  std::size_t best = k;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t count = 0, cur = s;
    while (cur < s + k && count < best) {
      ++count;
      cur = next[cur];
    }
    best = std::min(best, count);
  }
  return best;
}

std::size_t arc_packing_count(std::vector<double> points, double gap) {
  if (!(gap >= 0.0)) throw Error(ErrorKind::InvalidArgument, "gap must be >= 0");
  const std::vector<double> p = unrolled(std::move(points));
  const std::size_t k = p.size() / 3;
  if (k == 0) return 0;

  // next[i]: first later point farther than `gap` from p[i].
  std::vector<std::size_t> next(2 * k);
  std::size_t j = 0;
  for (std::size_t i = 0; i < 2 * k; ++i) {
    j = std::max(j, i + 1);
    while (j < i + k && p[j] - p[i] <= gap) ++j;
    next[i] = j;
  }
  std::size_t best = 1;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t count = 1, cur = s;
    while (true) {
      const std::size_t nx = next[cur];
      if (nx >= s + k || p[s] + 1.0 - p[nx] <= gap) break;
      ++count;
      cur = nx;
    }
    best = std::max(best, count);
  }
  return best;
}

IntervalOracleCounts doubling_interval_counts(
    int n, double epsilon, std::size_t grid_size,
    const std::optional<DeviationRestriction> &restriction) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "Bowen balls of the doubling map are arcs only for eps < 1/3");
  }
  if (grid_size < 1) throw Error(ErrorKind::InvalidArgument, "empty grid");
  const SkewSystem sys = SkewSystem::doubling();
  const BasePoint omega;
  std::vector<double> points;
  for (std::size_t k = 0; k < grid_size; ++k) {
    const Turn t = static_cast<Turn>(((static_cast<u128>(k) << 64)) / grid_size);
    const FiberPoint x{{t, 0}};
    if (restriction &&
        !deviation_set_membership(sys, restriction->phi, omega, x, n,
                                  restriction->alpha, restriction->delta)) {
      continue;
    }
    points.push_back(turn_to_double(t));
  }
  IntervalOracleCounts out;
  out.points = points.size();
  const double radius = epsilon * std::ldexp(1.0, -(n - 1));
  out.spanning = std::max<std::size_t>(1, arc_cover_count(points, radius));
  out.separated = std::max<std::size_t>(1, arc_packing_count(points, radius));
  return out;
}

namespace {

// Static neighbour index over sample orbits for the spanning cover. Orbits
// are stored grouped by cell key so that a bucket scan reads contiguous
// memory.
class OrbitIndex {
 public:
  OrbitIndex(const std::vector<FiberPoint> &orbits, int n, double epsilon,
             int dimension, double time0_scale)
      : n_(n), eps2_(scaled_eps2(epsilon)),
        geometry_(epsilon, dimension, time0_scale) {
    const std::size_t k = orbits.size() / n;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(k);
    for (std::size_t i = 0; i < k; ++i) {
      keyed[i] = {geometry_.key(&orbits[i * n], n), static_cast<std::uint32_t>(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    sorted_.resize(orbits.size());
    original_.resize(k);
    position_.resize(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::uint32_t i = keyed[r].second;
      std::copy_n(&orbits[std::size_t(i) * n], n, &sorted_[r * n]);
      original_[r] = i;
      position_[i] = static_cast<std::uint32_t>(r);
      auto [it, fresh] = ranges_.try_emplace(keyed[r].first, r, r);
      it->second.second = r + 1;
    }
  }

  // fn(j) for every sample index j with d^n(i, j) <= eps, i included.
  template <class Fn>
  void for_each_neighbour(std::size_t i, Fn &&fn) const {
    const FiberPoint *me = &sorted_[std::size_t(position_[i]) * n_];
    geometry_.for_each_neighbour_key(me, n_, [&](std::uint64_t key) {
      auto it = ranges_.find(key);
      if (it == ranges_.end()) return;
      for (std::size_t r = it->second.first; r < it->second.second; ++r) {
        if (within(me, &sorted_[r * n_], n_, eps2_)) fn(original_[r]);
      }
    });
  }

 private:
  int n_;
  double eps2_;
  CellGeometry geometry_;
  std::vector<FiberPoint> sorted_;
  std::vector<std::uint32_t> original_, position_;
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> ranges_;
};

}  // namespace

std::size_t min_spanning_count(const SkewSystem &sys, const BasePoint &omega,
                               int n, double epsilon,
                               const std::vector<FiberPoint> &sample,
                               double delta, StepBudget &budget) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "empty sample");
  check_epsilon(epsilon);
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
  }
  const std::size_t k = sample.size();
  budget.reserve(static_cast<std::uint64_t>(k) * n, "spanning cover");

  const FiberSchedule schedule(sys, omega, n);
  std::vector<FiberPoint> orbits(k * n);
  for (std::size_t i = 0; i < k; ++i) schedule.orbit(sample[i], n, &orbits[i * n]);
  const OrbitIndex index(orbits, n, epsilon, sys.dimension(),
                         time0_scale(sys, omega, n, epsilon));

  const auto target = static_cast<std::size_t>(
      std::ceil((1.0 - delta) * static_cast<double>(k) - 1e-9));
  std::vector<char> covered(k, 0);
  std::size_t covered_count = 0, balls = 0;

  // gain[i] = uncovered sample points in the ball around i. Closeness is
  // symmetric, so covering j lowers the gain of exactly j's neighbours.
  // Buckets hold possibly stale entries that are re-filed when popped.
  std::vector<std::uint32_t> gain(k, 0);
  std::uint32_t top = 0;
  for (std::size_t i = 0; i < k; ++i) {
    index.for_each_neighbour(i, [&](std::uint32_t) { ++gain[i]; });
    top = std::max(top, gain[i]);
  }
  std::vector<std::vector<std::uint32_t>> buckets(top + 1);
  for (std::size_t i = k; i-- > 0;) {
    buckets[gain[i]].push_back(static_cast<std::uint32_t>(i));
  }
  while (covered_count < target && top > 0) {
    if (buckets[top].empty()) {
      --top;
      continue;
    }
    const std::uint32_t i = buckets[top].back();
    buckets[top].pop_back();
    if (gain[i] != top) {
      if (gain[i] > 0) buckets[gain[i]].push_back(i);
      continue;
    }
    ++balls;
    index.for_each_neighbour(i, [&](std::uint32_t j) {
      if (covered[j]) return;
      covered[j] = 1;
      ++covered_count;
      index.for_each_neighbour(j, [&](std::uint32_t m) { --gain[m]; });
    });
  }
  return std::max<std::size_t>(1, balls);
}

std::size_t min_spanning_count(const SkewSystem &sys, const BasePoint &omega,
                               int n, double epsilon,
                               const std::vector<FiberPoint> &sample,
                               double delta) {
  StepBudget budget;
  return min_spanning_count(sys, omega, n, epsilon, sample, delta, budget);
}

void CountTable::add(const SeparatedSet &set,
                     const std::optional<DeviationRestriction> &restriction) {
  CountRow row;
  row.n = set.n;
  row.epsilon = set.epsilon;
  if (restriction) {
    row.alpha = restriction->alpha;
    row.delta = restriction->delta;
  }
  row.count = static_cast<double>(set.count());
  row.method = set.method;
  rows.push_back(row);
}

void CountTable::write_csv(std::ostream &out) const {
  out << "n,epsilon,alpha,delta,count,method\n";
  for (const CountRow &r : rows) {
    out << r.n << ',' << r.epsilon << ',';
    if (r.alpha) out << *r.alpha;
    out << ',';
    if (r.delta) out << *r.delta;
    out << ',' << r.count << ',' << r.method << '\n';
  }
}

}  // namespace fiberdyn
