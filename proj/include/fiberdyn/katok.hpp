#pragma once

// Katok-style entropy estimates: growth rate of the number of Bowen balls
// needed to cover most of a measure sample.

#include <cstdint>
#include <string>
#include <vector>

#include "fiberdyn/counting.hpp"
#include "fiberdyn/skew_system.hpp"

namespace fiberdyn {

enum class SamplerKind { Haar, UniformCircle };

std::string sampler_kind_name(SamplerKind kind);

// Lebesgue measure on the torus, or on the circle for the one-dimensional
// oracle. Reproducible from the seed.
struct MeasureSampler {
  SamplerKind kind = SamplerKind::Haar;
  std::uint64_t seed = 1;

  std::vector<FiberPoint> draw(std::size_t count) const;
  // Whether the measure is known to be invariant for the fiber maps of sys.
  bool proven_invariant(const SkewSystem &sys) const;
};

// Sampler matching the fiber of sys.
MeasureSampler default_sampler(const SkewSystem &sys, std::uint64_t seed);

struct KatokOptions {
  double epsilon = 0.1;
  double delta = 0.1;
  std::vector<int> n_values;
  std::size_t sample_size = 10000;
  int threads = 1;  // per-n covers run concurrently; results do not change
};

struct KatokEstimate {
  double entropy = 0.0;
  double stderr_slope = 0.0;
  std::vector<int> n_values;
  std::vector<std::size_t> counts;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t sample_size = 0;
  bool sampler_invariant = true;
  // Greedy covers overcount by at most a log factor, which biases the slope
  // upward by a vanishing amount.
  std::string note;
};

KatokEstimate katok_entropy_estimate(const SkewSystem &sys,
                                     const MeasureSampler &sampler,
                                     const BasePoint &omega,
                                     const KatokOptions &options,
                                     StepBudget &budget);

// The same estimate at eps = eta from expansivity_constants.
KatokEstimate katok_at_expansivity(const SkewSystem &sys,
                                   const MeasureSampler &sampler,
                                   const BasePoint &omega,
                                   KatokOptions options, StepBudget &budget);

}  // namespace fiberdyn
