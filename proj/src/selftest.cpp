#include "fiberdyn/selftest.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fiberdyn/counting.hpp"
#include "fiberdyn/katok.hpp"
#include "fiberdyn/pressure.hpp"
#include "fiberdyn/shadowing.hpp"

namespace fiberdyn {

namespace {

// log of the cat map's unstable eigenvalue (3 + sqrt 5)/2.
const double kGoldenEntropy = std::log((3.0 + std::sqrt(5.0)) / 2.0);

// The forced cat map over the rotation by sqrt(2) - 1.
SkewSystem forced_cat_map() {
  return SkewSystem::affine_toral(
      DrivingSystem::rotation(std::numbers::sqrt2 - 1.0), {2, 1, 1, 1},
      Forcing{{0.1, {0.2}, {}}, {0.0, {}, {0.3}}});
}

double binary_entropy(double a) {
  return -a * std::log(a) - (1.0 - a) * std::log(1.0 - a);
}

std::vector<int> range(int from, int to, int step = 1) {
  std::vector<int> out;
  for (int n = from; n <= to; n += step) out.push_back(n);
  return out;
}

class Detail {
 public:
  Detail &add(const std::string &label, double value) {
    if (!text_.empty()) text_ += "; ";
    text_ += label + "=" + format_number(round6(value));
    return *this;
  }
  Detail &note(const std::string &s) {
    if (!text_.empty()) text_ += "; ";
    text_ += s;
    return *this;
  }
  std::string str() const { return text_; }

 private:
  // Six significant digits keep the report readable and stable.
  static double round6(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double scale = std::pow(10.0, 5 - std::floor(std::log10(std::abs(v))));
    return std::round(v * scale) / scale;
  }
  std::string text_;
};

PressureCurve oracle_curve() {
  PressureOptions o;
  o.method = CountMethod::Cylinder;
  o.n_values = range(8, 16);
  StepBudget budget;
  return pressure_curve(SkewSystem::doubling(), Observable::digit(),
                        {-3, -2, -1, 0, 1, 2, 3}, o, budget);
}

}  // namespace

CheckResult check_oracle_pressure(const SelftestOptions &) {
  const PressureCurve c = oracle_curve();
  double worst = 0.0;
  for (std::size_t i = 0; i < c.q.size(); ++i) {
    worst = std::max(worst,
                     std::abs(c.pressure[i] - std::log1p(std::exp(c.q[i]))));
  }
  CheckResult r{1, "oracle pressure log(1+e^q)", worst <= 0.02, ""};
  r.detail = Detail().add("max_error", worst).add("tolerance", 0.02).str();
  return r;
}

CheckResult check_oracle_spectrum(const SelftestOptions &) {
  const std::vector<double> alphas = {0.3, 0.4, 0.5, 0.6, 0.7};
  const SpectrumCurve spectrum = legendre_conjugate(oracle_curve(), alphas);

  PressureOptions o;
  o.method = CountMethod::Cylinder;
  o.n_values = range(40, 80, 5);
  StepBudget budget;
  double legendre_err = 0.0, rate_err = 0.0, mutual = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const LevelSetRate rate =
        level_set_rate(SkewSystem::doubling(), Observable::digit(), BasePoint{},
                       alphas[i], {0.1, 0.05, 0.03}, o, budget);
    const double h = binary_entropy(alphas[i]);
    legendre_err = std::max(legendre_err, std::abs(spectrum.value[i] - h));
    rate_err = std::max(rate_err, std::abs(rate.rate - h));
    mutual = std::max(mutual, std::abs(rate.rate - spectrum.value[i]));
  }
  const bool ok = legendre_err <= 0.05 && rate_err <= 0.05 && mutual <= 0.05;
  CheckResult r{2, "oracle spectrum H(alpha)", ok, ""};
  r.detail = Detail()
                 .add("legendre_error", legendre_err)
                 .add("counting_error", rate_err)
                 .add("discrepancy", mutual)
                 .add("tolerance", 0.05)
                 .str();
  return r;
}

CheckResult check_skew_entropy(const SelftestOptions &options) {
  const SkewSystem sys = forced_cat_map();
  const double expected = kGoldenEntropy + std::log(options.lambda_scale);
  PressureOptions o;
  o.epsilon = 0.05;
  o.n_values = range(6, 12);
  o.omega_samples = 3;
  o.seed = options.seed;
  StepBudget budget(10'000'000);
  const PressureEstimate e =
      pressure_estimate(sys, Observable::constant(0.0), o, budget);
  const auto [lo, hi] = std::minmax_element(e.per_omega.begin(), e.per_omega.end());
  const double rel = std::abs(e.pressure - expected) / expected;
  const double spread = *hi - *lo;
  CheckResult r{3, "skew product entropy", rel <= 0.05 && spread <= 0.05, ""};
  Detail d;
  d.add("estimate", e.pressure).add("oracle", expected).add("relative_error", rel);
  for (std::size_t k = 0; k < e.per_omega.size(); ++k) {
    d.add("omega" + std::to_string(k), e.per_omega[k]);
  }
  d.add("spread", spread).add("steps", static_cast<double>(budget.used()));
  r.detail = d.str();
  return r;
}

CheckResult check_fiber_independence(const SelftestOptions &options) {
  const SkewSystem forced = forced_cat_map();
  const SkewSystem plain = SkewSystem::affine_toral(
      DrivingSystem::rotation(std::numbers::sqrt2 - 1.0), {2, 1, 1, 1});
  std::mt19937_64 rng(options.seed);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const BasePoint w1{rng()}, w2{rng()};
    const FiberPoint x{{rng(), rng()}};
    FiberPoint y = x;
    // Nearby partners make the Bowen distance depend on many iterates.
    y.c[0] += rng() >> (8 + trial % 24);
    y.c[1] += rng() >> (8 + (trial / 24) % 24);
    const int n = 1 + static_cast<int>(rng() % 25);
    const double d1 = bowen_distance(forced, w1, x, y, n);
    const double d2 = bowen_distance(forced, w2, x, y, n);
    const double d0 = bowen_distance(plain, w1, x, y, n);
    const double gap = std::max(std::abs(d1 - d2), std::abs(d1 - d0));
    worst = std::max(worst, gap);
    if (gap > 1e-12) ++failures;
  }
  CheckResult r{4, "fiber independence of Bowen distance", failures == 0, ""};
  r.detail = Detail()
                 .add("checks", 1000)
                 .add("failures", failures)
                 .add("max_gap", worst)
                 .add("tolerance", 1e-12)
                 .str();
  return r;
}

CheckResult check_shadowing(const SelftestOptions &options) {
  const SkewSystem sys = forced_cat_map();
  const double epsilons[] = {0.05, 0.1, 0.2};
  int gaps[3];
  for (int i = 0; i < 3; ++i) gaps[i] = mixing_gap(sys, epsilons[i]);

  std::mt19937_64 rng(options.seed);
  int verified = 0, intervals = 0, within_half = 0, ledgers = 0;
  double worst = 0.0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    const double eps = epsilons[trial % 3];
    const int m = gaps[trial % 3];
    const int k = 1 + static_cast<int>(rng() % 6);
    std::vector<SpecInterval> iv;
    std::int64_t t = static_cast<std::int64_t>(rng() % 21) - 10;
    for (int i = 0; i < k; ++i) {
      const auto len = static_cast<std::int64_t>(rng() % 15);
      iv.push_back({t, t + len, FiberPoint{{rng(), rng()}}});
      t += len + m + 1 + static_cast<std::int64_t>(rng() % 5);
    }
    const OmegaSpecification spec(BasePoint{rng()}, iv, m);
    const ShadowResult res = shadow(sys, spec, eps);
    verified += res.certificate.passed && res.certificate.max_distance < eps;
    ledgers += res.ledger_ok;
    worst = std::max(worst, res.certificate.max_distance / eps);
    for (double d : res.certificate.interval_max) {
      ++intervals;
      within_half += d <= eps / 2.0;
    }
  }
  const double fraction = static_cast<double>(within_half) / intervals;
  CheckResult r{5, "constructive shadowing", verified == trials && fraction >= 0.99,
                ""};
  r.detail = Detail()
                 .add("verified", verified)
                 .add("specifications", trials)
                 .add("worst_distance_over_eps", worst)
                 .add("half_eps_fraction", fraction)
                 .add("ledger_ok", ledgers)
                 .add("mixing_gap_0.05", gaps[0])
                 .add("mixing_gap_0.1", gaps[1])
                 .add("mixing_gap_0.2", gaps[2])
                 .str();
  return r;
}

CheckResult check_katok(const SelftestOptions &options) {
  struct Case {
    SkewSystem sys;
    double epsilon;
    std::vector<int> ns;
    std::size_t sample;
    double oracle;
  };
  const SkewSystem cat = forced_cat_map();
  const Case cases[] = {
      {SkewSystem::doubling(), 0.2, range(6, 12), 60000,
       std::log(2.0 * options.lambda_scale)},
      {cat, 0.1, range(2, 7), 100000,
       kGoldenEntropy + std::log(options.lambda_scale)},
  };
  const char *names[] = {"doubling", "cat"};
  bool ok = true;
  Detail d;
  for (int c = 0; c < 2; ++c) {
    double slope[2];
    const double deltas[] = {0.1, 0.3};
    for (int k = 0; k < 2; ++k) {
      KatokOptions o;
      o.epsilon = cases[c].epsilon;
      o.delta = deltas[k];
      o.n_values = cases[c].ns;
      o.sample_size = cases[c].sample;
      o.threads = options.threads;
      StepBudget budget(10'000'000);
      slope[k] = katok_entropy_estimate(cases[c].sys,
                                        default_sampler(cases[c].sys, options.seed),
                                        BasePoint::at(0.3), o, budget)
                     .entropy;
    }
    const double rel = std::abs(slope[0] - cases[c].oracle) / cases[c].oracle;
    const double gap = std::abs(slope[0] - slope[1]);
    ok = ok && rel <= 0.10 && gap <= 0.1;
    d.add(std::string(names[c]) + "_slope", slope[0])
        .add(std::string(names[c]) + "_slope_delta0.3", slope[1])
        .add(std::string(names[c]) + "_relative_error", rel)
        .add(std::string(names[c]) + "_delta_gap", gap);
  }
  return {6, "Katok entropy", ok, d.str()};
}

CheckResult check_gibbs_ratio(const SelftestOptions &options) {
  const SkewSystem sys = forced_cat_map();
  const double lambda = (3.0 + std::sqrt(5.0)) / 2.0 * options.lambda_scale;
  double lo = INFINITY, hi = 0.0;
  for (int n = 3; n <= 10; ++n) {
    const double v = bowen_ball_area(sys, n, 0.1) * std::pow(lambda, n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double variation = hi / lo - 1.0;
  CheckResult r{7, "Gibbs ratio of Bowen balls", variation <= 0.02, ""};
  r.detail = Detail().add("relative_variation", variation).add("tolerance", 0.02).str();
  return r;
}

CheckResult check_invariants(const SelftestOptions &options) {
  std::mt19937_64 rng(options.seed);
  std::vector<std::string> failed;
  const SkewSystem cat = forced_cat_map();
  const SkewSystem cocycle = SkewSystem::matrix_cocycle(
      DrivingSystem::sturmian(std::numbers::sqrt2 - 1.0),
      {{2, 1, 1, 1}, {1, 1, 1, 2}});

  // Metric axioms of the fiber Bowen metric.
  {
    bool ok = true;
    for (int trial = 0; trial < 300; ++trial) {
      const SkewSystem &sys = trial % 2 ? cat : cocycle;
      const BasePoint w{rng()};
      const FiberPoint x{{rng(), rng()}}, y{{rng(), rng()}}, z{{rng(), rng()}};
      const int n = 1 + static_cast<int>(rng() % 12);
      const double xy = bowen_distance(sys, w, x, y, n);
      ok = ok && bowen_distance(sys, w, x, x, n) == 0.0;
      ok = ok && xy == bowen_distance(sys, w, y, x, n);
      ok = ok && xy <= bowen_distance(sys, w, x, z, n) +
                           bowen_distance(sys, w, z, y, n) + 1e-15;
      ok = ok && (x == y || xy > 0.0);
    }
    if (!ok) failed.push_back("metric axioms");
  }
  // Cocycle law F^{s+t}_w = F^t_{theta^s w} F^s_w, exact in fixed point.
  {
    bool ok = true;
    for (int trial = 0; trial < 300; ++trial) {
      const SkewSystem &sys = trial % 2 ? cat : cocycle;
      const BasePoint w{rng()};
      const FiberPoint x{{rng(), rng()}};
      const auto s = static_cast<std::int64_t>(rng() % 41) - 20;
      const auto t = static_cast<std::int64_t>(rng() % 41) - 20;
      const FiberPoint direct = fiber_step(sys, w, x, s + t);
      const FiberPoint split =
          fiber_step(sys, base_step(sys.base(), w, s), fiber_step(sys, w, x, s), t);
      ok = ok && direct == split;
    }
    if (!ok) failed.push_back("cocycle law");
  }
  // Separated counts grow with n and shrink as eps grows.
  {
    StepBudget budget;
    const BasePoint w = BasePoint::at(0.3);
    const CandidateGrid grid = lattice_grid(2, 0.02);
    const std::vector<int> ns = range(1, 5);
    std::vector<std::size_t> coarse, fine;
    for (const SeparatedSet &s : separated_sets(cat, w, ns, 0.2, grid, std::nullopt, budget)) {
      coarse.push_back(s.count());
    }
    for (const SeparatedSet &s : separated_sets(cat, w, ns, 0.1, grid, std::nullopt, budget)) {
      fine.push_back(s.count());
    }
    bool ok = true;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      ok = ok && coarse[i] <= fine[i];
      if (i > 0) ok = ok && coarse[i - 1] <= coarse[i] && fine[i - 1] <= fine[i];
    }
    if (!ok) failed.push_back("count monotonicity");
  }
  // N(eps) <= M(eps) <= N(eps/2) on the circle oracle.
  {
    bool ok = true;
    for (int n = 1; n <= 10; ++n) {
      for (double eps : {0.05, 0.1, 0.2}) {
        for (double alpha : {-1.0, 0.3, 0.5}) {
          std::optional<DeviationRestriction> r;
          if (alpha >= 0.0) r = DeviationRestriction{Observable::digit(), alpha, 0.15};
          const IntervalOracleCounts a = doubling_interval_counts(n, eps, 4001, r);
          const IntervalOracleCounts b = doubling_interval_counts(n, eps / 2, 4001, r);
          ok = ok && a.spanning <= a.separated && a.separated <= b.spanning;
        }
      }
    }
    if (!ok) failed.push_back("spanning/separated sandwich");
  }
  // Convexity of pressure curves, concavity of their conjugates and the
  // Legendre upper bound on level-set counting rates.
  {
    const std::vector<double> qs = {-3, -2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2, 3};
    PressureOptions exact;
    exact.method = CountMethod::Cylinder;
    exact.n_values = range(8, 16);
    StepBudget budget;
    const Observable digit = Observable::digit(-0.5, 1.5);
    const PressureCurve c1 =
        pressure_curve(SkewSystem::doubling(), digit, qs, exact, budget);

    PressureOptions grid;
    grid.epsilon = 0.1;
    grid.n_values = range(3, 7);
    grid.seed = options.seed;
    const Observable trig = Observable::fiber_trig(0.2, {{1, 0, 0.5, 0.0}, {0, 1, 0.0, 0.3}});
    const PressureCurve c2 = pressure_curve(cat, trig, {-2, -1, 0, 1, 2}, grid, budget);
    if (c1.convexity_defect > 1e-9 || c2.convexity_defect > 1e-9) {
      failed.push_back("pressure convexity");
    }

    const std::vector<double> alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
    const SpectrumCurve s1 = legendre_conjugate(c1, alphas);
    const SpectrumCurve s2 = legendre_conjugate(c2, {-0.2, 0.0, 0.2, 0.4, 0.6});
    if (s1.concavity_defect > 1e-9 || s2.concavity_defect > 1e-9) {
      failed.push_back("spectrum concavity");
    }

    PressureOptions level = exact;
    level.n_values = range(40, 80, 5);
    bool ok = true;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const LevelSetRate r = level_set_rate(SkewSystem::doubling(), digit, BasePoint{},
                                            alphas[i], {0.1, 0.05, 0.03}, level,
                                            budget);
      ok = ok && (r.out_of_range || r.rate <= s1.value[i] + 0.05);
    }
    if (!ok) failed.push_back("Legendre upper bound");
  }

  CheckResult r{8, "invariant suites", failed.empty(), ""};
  Detail d;
  d.add("suites", 7).add("failed", static_cast<double>(failed.size()));
  for (const std::string &f : failed) d.note("failed " + f);
  r.detail = d.str();
  return r;
}

const std::vector<CheckFunction> &selftest_checks() {
  static const std::vector<CheckFunction> checks = {
      check_oracle_pressure, check_oracle_spectrum, check_skew_entropy,
      check_fiber_independence, check_shadowing, check_katok,
      check_gibbs_ratio, check_invariants,
  };
  return checks;
}

bool SelftestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult &c) { return c.passed; });
}

std::string SelftestReport::table() const {
  std::ostringstream s;
  for (const CheckResult &c : checks) {
    s << (c.passed ? "PASS" : "FAIL") << "  " << c.criterion << "  " << c.name
      << "  [" << c.detail << "]\n";
  }
  return s.str();
}

SelftestReport run_selftest(
    const SelftestOptions &options,
    const std::function<CheckResult(CheckFunction, const SelftestOptions &)>
        &runner) {
  SelftestReport report;
  for (CheckFunction f : selftest_checks()) {
    report.checks.push_back(runner ? runner(f, options) : f(options));
  }

  const std::string settings = "selftest seed=" + std::to_string(options.seed) +
                               " lambda_scale=" +
                               format_number(options.lambda_scale);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : settings) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  std::string text = "# fiberdyn " + std::string(kVersion) + "\n";
  text += "# config_hash = " + std::string(hex) + "\n";
  text += "# seed = " + std::to_string(options.seed) + "\n";
  text += "# lambda_scale = " + format_number(options.lambda_scale) + "\n";
  text += "criterion,name,passed,detail\n";
  for (const CheckResult &c : report.checks) {
    text += std::to_string(c.criterion) + "," + c.name + "," +
            (c.passed ? "1" : "0") + ",\"" + c.detail + "\"\n";
  }
  report.artifacts.push_back({"selftest.csv", text});
  return report;
}

}  // namespace fiberdyn
