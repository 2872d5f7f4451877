#pragma once

// Plain-text experiment configuration.
//
// One `key = value` per line; blank lines and lines starting with '#' are
// ignored. Every artifact the harness writes embeds its fully resolved
// configuration as `#@ key = value` lines. When a file contains such lines
// only those are read, so any artifact can be passed back as a config.
//
// Value syntax:
//   list      "1 2 3", "1, 2, 3", "6..12" (integers), "-3:3:0.5" (from:to:step)
//   matrix    "2 1 1 1" for [[2,1],[1,1]]
//   matrices  "2 1 1 1; 1 1 1 2"
//   fourier   "c; a1 a2 ...; b1 b2 ..." for c + sum a_m cos(2 pi m w) + b_m sin(2 pi m w)
//   terms     "m1 m2 a b; ..." for sum a cos(2 pi m.x) + b sin(2 pi m.x)
//   intervals "a b x1 x2; ..." for specification segments anchored at (x1, x2)

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fiberdyn/base_systems.hpp"
#include "fiberdyn/katok.hpp"
#include "fiberdyn/observable.hpp"
#include "fiberdyn/pressure.hpp"
#include "fiberdyn/shadowing.hpp"
#include "fiberdyn/skew_system.hpp"

namespace fiberdyn {

enum class Task { Pressure, Spectrum, Shadow, Katok, Crosscheck };

std::string task_name(Task task);

struct ConfigField {
  std::string key;
  std::string value;
};

class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  // Throws ConfigError naming the first bad field.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string &path);

  // Sets or replaces one field; the value is checked against the schema.
  void set(const std::string &key, const std::string &value);
  bool has(const std::string &key) const;

  // Fills every field the task uses, replacing "auto" and absent values by
  // concrete ones, and checks cross-field requirements. Idempotent; the
  // resolved form of a resolved config is itself.
  ExperimentConfig resolved() const;

  // Fields of a resolved config in schema order.
  std::vector<ConfigField> fields() const;
  // `prefix key = value` lines.
  std::string echo(std::string_view prefix) const;
  // FNV-1a of echo(""), as 16 hex digits.
  std::string hash() const;

  // Typed access; valid on a resolved config.
  Task task() const;
  std::uint64_t seed() const;
  std::uint64_t budget() const;
  double real(const std::string &key) const;
  std::int64_t integer(const std::string &key) const;
  const std::string &text(const std::string &key) const;
  std::vector<double> reals(const std::string &key) const;
  std::vector<int> integers(const std::string &key) const;

 private:
  std::map<std::string, std::string> values_;
};

SkewSystem build_system(const ExperimentConfig &config);
Observable build_observable(const ExperimentConfig &config,
                            const SkewSystem &sys);
PressureOptions build_pressure_options(const ExperimentConfig &config);
KatokOptions build_katok_options(const ExperimentConfig &config);
MeasureSampler build_sampler(const ExperimentConfig &config,
                             const SkewSystem &sys);
OmegaSpecification build_specification(const ExperimentConfig &config);

// Specification file: lines "omega W", "spacing M" and one
// "interval A B X1 X2" per segment; '#' starts a comment. Returns the
// equivalent spec.* fields.
std::vector<ConfigField> read_specification_file(const std::string &path);

// Documented schema: key, default and meaning, for `--help`-style listings.
struct SchemaEntry {
  std::string key;
  std::string default_value;
  std::string meaning;
};
const std::vector<SchemaEntry> &config_schema();

}  // namespace fiberdyn
