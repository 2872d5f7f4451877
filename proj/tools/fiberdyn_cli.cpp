// Command-line front end: one subcommand per experiment plus `selftest`.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fiberdyn/config.hpp"
#include "fiberdyn/harness.hpp"
#include "fiberdyn/selftest.hpp"

using namespace fiberdyn;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  int threads = 1;
};

int run_task(const std::string &task, const Common &c, const CLI::App &sub) {
  ExperimentConfig config;
  try {
    if (!c.config_path.empty()) config = ExperimentConfig::load(c.config_path);
    config.set("task", task);
    if (sub.count("--seed")) config.set("seed", std::to_string(c.seed));
    if (sub.count("--budget")) config.set("budget", std::to_string(c.budget));
    for (const std::string &kv : c.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(kv, "--set expects key=value");
      }
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const Error &e) {
    const std::string json = error_json(e, nullptr);
    std::cerr << json;
    try {
      write_artifacts({{"error.json", json}}, c.out_dir);
    } catch (const Error &) {
    }
    return exit_code_for(e);
  }

  const RunResult result = run(config, c.threads);
  try {
    write_artifacts(result.artifacts, c.out_dir);
  } catch (const Error &e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  }
  if (result.exit_code != kExitOk) {
    std::cerr << result.artifacts.front().content;
  } else {
    std::cout << result.summary << "\n";
    for (const Artifact &a : result.artifacts) {
      std::cout << "  wrote " << c.out_dir << "/" << a.name << "\n";
    }
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Fiber thermodynamic formalism experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  std::vector<std::pair<std::string, CLI::App *>> tasks;
  const char *descriptions[][2] = {
      {"pressure", "pressure curve over q_grid"},
      {"spectrum", "pressure curve and its Legendre conjugate"},
      {"shadow", "shadow a specification and certify it"},
      {"katok", "Katok spanning-cover entropy estimate"},
      {"crosscheck", "Legendre conjugate against level-set counting rates"},
  };
  for (const auto &d : descriptions) {
    CLI::App *sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("--config", common.config_path,
                    "key = value config file, or any artifact to re-run it")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "override the config seed");
    sub->add_option("--out", common.out_dir, "output directory")
        ->capture_default_str();
    sub->add_option("--budget", common.budget, "fiber-step budget");
    sub->add_option("--threads", common.threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--set", common.overrides, "extra key=value fields");
    tasks.emplace_back(d[0], sub);
  }

  SelftestOptions self;
  std::string self_out = "out";
  CLI::App *selftest = app.add_subcommand("selftest", "run the oracle battery");
  selftest->add_option("--seed", self.seed, "seed")->capture_default_str();
  selftest->add_option("--out", self_out, "output directory")->capture_default_str();
  selftest->add_option("--threads", self.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App *schema = app.add_subcommand("schema", "list config keys and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (schema->parsed()) {
    for (const SchemaEntry &e : config_schema()) {
      std::printf("%-22s %-22s %s\n", e.key.c_str(), e.default_value.c_str(),
                  e.meaning.c_str());
    }
    return 0;
  }
  if (selftest->parsed()) {
    const SelftestReport report = run_selftest(self);
    std::cout << report.table();
    try {
      write_artifacts(report.artifacts, self_out);
    } catch (const Error &e) {
      std::cerr << e.what() << "\n";
      return kExitInvalid;
    }
    return report.passed() ? 0 : 1;
  }
  for (const auto &[name, sub] : tasks) {
    if (sub->parsed()) return run_task(name, common, *sub);
  }
  return kExitInvalid;
}
