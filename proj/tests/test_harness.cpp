#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fiberdyn/config.hpp"
#include "fiberdyn/harness.hpp"
#include "fiberdyn/selftest.hpp"
#include "json.hpp"

using namespace fiberdyn;
namespace fs = std::filesystem;

namespace {

const Artifact &find(const RunResult &r, const std::string &name) {
  for (const Artifact &a : r.artifacts) {
    if (a.name == name) return a;
  }
  FAIL("missing artifact " << name);
  return r.artifacts.front();
}

std::vector<std::vector<std::string>> csv_rows(const std::string &content) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("fiberdyn_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

const char *kShadowConfig =
    "task = shadow\n"
    "fiber.kind = affine\n"
    "fiber.matrix = 2 1 1 1\n"
    "fiber.h1 = 0.1; 0.2; \n"
    "base.kind = rotation\n";

}  // namespace

TEST_CASE("default pressure run on the doubling map") {
  const RunResult r = run(ExperimentConfig::parse("task = pressure\n"));
  REQUIRE(r.exit_code == kExitOk);
  const auto rows = csv_rows(find(r, "pressure.csv").content);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0][0] == "q");
  CHECK(rows[0][1] == "pressure");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][1]) == doctest::Approx(0.6931).epsilon(1e-4));
  }
}

TEST_CASE("missing matrix names the field") {
  const RunResult r = run(ExperimentConfig::parse("task = pressure\nfiber.kind = affine\n"));
  CHECK(r.exit_code == kExitInvalid);
  const auto j = nlohmann::json::parse(find(r, "error.json").content);
  CHECK(j["error"]["field"] == "fiber.matrix");
  CHECK(j["error"]["kind"] == "InvalidConfig");
  CHECK(j["exit_code"] == 1);
}

TEST_CASE("shadow below the mixing gap is refused") {
  ExperimentConfig c = ExperimentConfig::parse(kShadowConfig);
  c.set("spec.spacing", "3");
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitRefused);
  const auto j = nlohmann::json::parse(find(r, "error.json").content);
  CHECK(j["error"]["kind"] == "SpacingTooSmall");
  CHECK(j["exit_code"] == 2);
  CHECK(j.contains("provenance"));
}

TEST_CASE("shadow run certifies its point") {
  const RunResult r = run(ExperimentConfig::parse(kShadowConfig));
  REQUIRE(r.exit_code == kExitOk);
  const auto j = nlohmann::json::parse(find(r, "shadow.json").content);
  CHECK(j["passed"] == true);
  CHECK(j["mixing_gap"] == 9);
  CHECK(j["max_distance"].get<double>() < 0.1);
  for (const auto &row : csv_rows(find(r, "certificate.csv").content)) {
    if (row[0] == "t") continue;
    CHECK(std::stod(row[1]) < 0.1);
  }
}

TEST_CASE("budget refusal") {
  ExperimentConfig c = ExperimentConfig::parse(
      "task = pressure\nfiber.kind = affine\nfiber.matrix = 2 1 1 1\n"
      "base.kind = rotation\nobservable.kind = trig\nobservable.terms = 1 0 0.5 0\n");
  c.set("budget", "1000");
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitRefused);
  const auto j = nlohmann::json::parse(find(r, "error.json").content);
  CHECK(j["error"]["kind"] == "BudgetExceeded");
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_THROWS_AS(c.set("no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("epsilon", "abc"), ConfigError);
  CHECK_THROWS_AS(c.set("task", "dance"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("task = pressure\nseed\n"), ConfigError);
  try {
    ExperimentConfig::parse("task = katok\ndelta = 1.5\n").resolved();
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    CHECK(e.field() == "delta");
  }
}

TEST_CASE("list syntax") {
  ExperimentConfig c = ExperimentConfig::parse(
      "task = spectrum\nn_values = 6..9\nq_grid = -1:1:0.5\nalpha_grid = 0.3, 0.5 0.7\n");
  const ExperimentConfig r = c.resolved();
  CHECK(r.integers("n_values") == std::vector<int>{6, 7, 8, 9});
  CHECK(r.reals("q_grid") == std::vector<double>{-1, -0.5, 0, 0.5, 1});
  CHECK(r.reals("alpha_grid") == std::vector<double>{0.3, 0.5, 0.7});
}

TEST_CASE("resolution is idempotent and hashed") {
  const ExperimentConfig r = ExperimentConfig::parse(kShadowConfig).resolved();
  const ExperimentConfig rr = r.resolved();
  CHECK(r.echo("") == rr.echo(""));
  CHECK(r.hash() == rr.hash());
  CHECK(r.hash().size() == 16);
  ExperimentConfig other = ExperimentConfig::parse(kShadowConfig);
  other.set("seed", "2");
  CHECK(other.resolved().hash() != r.hash());
  CHECK(ExperimentConfig::parse(r.echo("#@ ")).resolved().echo("") == r.echo(""));
}

TEST_CASE("specification files") {
  const fs::path dir = scratch("spec");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "spec.txt");
    out << "# three segments\nomega 0.25\nspacing 9\n"
           "interval 0 2 0.1 0.2\ninterval 12 12 0.5 0.5\ninterval 22 25 0.9 0.3\n";
  }
  ExperimentConfig c = ExperimentConfig::parse(kShadowConfig);
  c.set("spec.file", (dir / "spec.txt").string());
  const ExperimentConfig r = c.resolved();
  CHECK(r.real("spec.omega") == 0.25);
  CHECK(r.integer("spec.spacing") == 9);
  const OmegaSpecification spec = build_specification(r);
  REQUIRE(spec.intervals().size() == 3);
  CHECK(spec.intervals()[2].a == 22);
  CHECK(spec.intervals()[2].b == 25);
  CHECK(run(c).exit_code == kExitOk);
}

TEST_CASE("every artifact carries provenance and reproduces itself") {
  const std::vector<std::string> configs = {
      "task = pressure\n",
      "task = spectrum\n",
      "task = crosscheck\nn_values = 20:40:5\nalpha_grid = 0.4 0.5\n",
      "task = katok\nn_values = 4..7\nsample_size = 3000\n",
      kShadowConfig,
  };
  int index = 0;
  for (const std::string &text : configs) {
    const ExperimentConfig config = ExperimentConfig::parse(text);
    const RunResult first = run(config);
    REQUIRE(first.exit_code == kExitOk);
    const std::string hash = config.resolved().hash();
    const fs::path dir = scratch("repro" + std::to_string(index++));
    write_artifacts(first.artifacts, dir.string());
    for (const Artifact &a : first.artifacts) {
      INFO(a.name);
      CHECK(a.content.find(hash) != std::string::npos);
      CHECK(a.content.find("seed") != std::string::npos);
      std::ifstream in(dir / a.name);
      std::stringstream disk;
      disk << in.rdbuf();
      CHECK(disk.str() == a.content);

      const RunResult again = run(ExperimentConfig::load((dir / a.name).string()));
      REQUIRE(again.exit_code == kExitOk);
      REQUIRE(again.artifacts.size() == first.artifacts.size());
      for (std::size_t i = 0; i < again.artifacts.size(); ++i) {
        CHECK(again.artifacts[i].name == first.artifacts[i].name);
        CHECK(again.artifacts[i].content == first.artifacts[i].content);
      }
    }
  }
}

TEST_CASE("threads do not change artifacts") {
  const ExperimentConfig c =
      ExperimentConfig::parse("task = crosscheck\nn_values = 20:40:5\n");
  const RunResult one = run(c, 1);
  const RunResult two = run(c, 2);
  REQUIRE(one.exit_code == kExitOk);
  REQUIRE(one.artifacts.size() == two.artifacts.size());
  for (std::size_t i = 0; i < one.artifacts.size(); ++i) {
    CHECK(one.artifacts[i].content == two.artifacts[i].content);
  }
}

TEST_CASE("charts") {
  const std::string svg = svg_line_chart("t", "x", "y", {{"a", {0, 1, 2}, {1, 0.5, 2}}},
                                         "# header line\n");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<!--") != std::string::npos);
  CHECK(svg.find("# header line") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, -3.0, 1e-300, 0.6931471805599453, 12345.678}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(-3.0) == "-3");
}

TEST_CASE("selftest notices a wrong entropy oracle") {
  SelftestOptions honest;
  CHECK(check_gibbs_ratio(honest).passed);
  SelftestOptions skewed;
  skewed.lambda_scale = 1.1;
  const CheckResult entropy = check_skew_entropy(skewed);
  CHECK_FALSE(entropy.passed);
  CHECK(entropy.criterion == 3);
  CHECK_FALSE(check_gibbs_ratio(skewed).passed);
}
