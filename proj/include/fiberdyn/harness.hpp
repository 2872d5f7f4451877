#pragma once

// Experiment orchestration: runs a configuration and renders its results as
// CSV, JSON and SVG artifacts that each carry the provenance header.

#include <cstdint>
#include <string>
#include <vector>

#include "fiberdyn/config.hpp"
#include "fiberdyn/error.hpp"

namespace fiberdyn {

inline constexpr const char *kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // validation error
inline constexpr int kExitRefused = 2;  // budget or precondition refusal

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<Artifact> artifacts;
  std::string summary;  // one human-readable line
};

// Header lines for a resolved config: version, config hash, seed and the
// `#@` echo. `comment` is prepended to the first three lines.
std::string provenance_header(const ExperimentConfig &config,
                              const std::string &comment);

// Exit code for a library error: 1 for validation, 2 for refusals.
int exit_code_for(const Error &error);

// {"error": {"kind", "field", "message"}, "exit_code"}, with provenance when
// the config got far enough to be resolved.
std::string error_json(const Error &error, const ExperimentConfig *resolved);

struct ChartSeries {
  std::string label;
  std::vector<double> x, y;
};

// A self-contained SVG line chart; `header` goes into a leading comment.
std::string svg_line_chart(const std::string &title, const std::string &x_label,
                           const std::string &y_label,
                           const std::vector<ChartSeries> &series,
                           const std::string &header);

// Resolves and runs the configuration. Library errors become an error.json
// artifact and the matching exit code; nothing is thrown for them.
RunResult run(const ExperimentConfig &config, int threads = 1);

// Writes artifacts into `dir`, creating it if needed.
void write_artifacts(const std::vector<Artifact> &artifacts,
                     const std::string &dir);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace fiberdyn
