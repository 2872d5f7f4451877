// Acceptance run: one PASS/FAIL line per criterion. A criterion passes when
// its check passes within its runtime limit. Exit status 1 on any failure.

#include <chrono>
#include <cstdio>
#include <map>

#include "fiberdyn/selftest.hpp"

using namespace fiberdyn;

int main() {
  // seconds
  const std::map<int, double> limits = {{1, 10},  {2, 30}, {3, 300}, {4, 5},
                                        {5, 60},  {6, 180}, {7, 1},  {8, 120}};
  SelftestOptions options;
  std::map<int, double> elapsed;

  const SelftestReport first = run_selftest(
      options, [&](CheckFunction check, const SelftestOptions &o) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult r = check(o);
        elapsed[r.criterion] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
      });

  bool all = true;
  for (const CheckResult &r : first.checks) {
    const double limit = limits.at(r.criterion);
    const bool in_time = elapsed[r.criterion] < limit;
    const bool ok = r.passed && in_time;
    all = all && ok;
    std::printf("%s criterion %d: %s (%.2f s, limit %.0f s%s) [%s]\n", ok ? "PASS" : "FAIL",
                r.criterion, r.name.c_str(), elapsed[r.criterion], limit,
                in_time ? "" : ", too slow", r.detail.c_str());
    std::fflush(stdout);
  }

  const SelftestReport second = run_selftest(options);
  bool identical = first.artifacts.size() == second.artifacts.size();
  std::size_t bytes = 0;
  for (std::size_t i = 0; identical && i < first.artifacts.size(); ++i) {
    identical = first.artifacts[i].name == second.artifacts[i].name &&
                first.artifacts[i].content == second.artifacts[i].content;
    bytes += first.artifacts[i].content.size();
  }
  all = all && identical;
  std::printf("%s criterion 9: determinism (%zu artifacts, %zu bytes %s)\n",
              identical ? "PASS" : "FAIL", first.artifacts.size(), bytes,
              identical ? "byte-identical" : "differ");
  return all ? 0 : 1;
}
