#pragma once

// The oracle battery behind `selftest` and the acceptance binary. Every check
// is deterministic given the seed; timings are left to the caller.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fiberdyn/harness.hpp"

namespace fiberdyn {

struct SelftestOptions {
  std::uint64_t seed = 1;
  // Multiplies the unstable eigenvalue used as the entropy oracle; anything
  // but 1 should make the entropy checks fail.
  double lambda_scale = 1.0;
  int threads = 1;
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values against their tolerances
};

CheckResult check_oracle_pressure(const SelftestOptions &options);
CheckResult check_oracle_spectrum(const SelftestOptions &options);
CheckResult check_skew_entropy(const SelftestOptions &options);
CheckResult check_fiber_independence(const SelftestOptions &options);
CheckResult check_shadowing(const SelftestOptions &options);
CheckResult check_katok(const SelftestOptions &options);
CheckResult check_gibbs_ratio(const SelftestOptions &options);
CheckResult check_invariants(const SelftestOptions &options);

using CheckFunction = CheckResult (*)(const SelftestOptions &);

// Criteria 1..8 in order.
const std::vector<CheckFunction> &selftest_checks();

struct SelftestReport {
  std::vector<CheckResult> checks;
  std::vector<Artifact> artifacts;  // selftest.csv

  bool passed() const;
  std::string table() const;
};

// Runs every check in order. A `runner`, when given, makes each call itself,
// e.g. to time it.
SelftestReport run_selftest(
    const SelftestOptions &options,
    const std::function<CheckResult(CheckFunction, const SelftestOptions &)>
        &runner = {});

}  // namespace fiberdyn
