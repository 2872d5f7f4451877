#include "fiberdyn/katok.hpp"

#include <cmath>
#include <random>

#include "fiberdyn/error.hpp"
#include "fiberdyn/pressure.hpp"
#include "parallel.hpp"

namespace fiberdyn {

std::string sampler_kind_name(SamplerKind kind) {
  return kind == SamplerKind::Haar ? "haar" : "uniform_circle";
}

std::vector<FiberPoint> MeasureSampler::draw(std::size_t count) const {
  std::mt19937_64 rng(seed);
  std::vector<FiberPoint> out(count);
  for (FiberPoint &p : out) {
    p.c[0] = rng();
    p.c[1] = kind == SamplerKind::Haar ? rng() : 0;
  }
  return out;
}

bool MeasureSampler::proven_invariant(const SkewSystem &sys) const {
  // Haar is preserved by toral automorphisms plus translations, and Lebesgue
  // on the circle by the doubling map. Products over a Sturmian base need
  // not preserve it fiberwise.
  switch (sys.kind()) {
    case FiberKind::AffineToral: return kind == SamplerKind::Haar;
    case FiberKind::Doubling: return kind == SamplerKind::UniformCircle;
    case FiberKind::MatrixCocycle: return false;
  }
  return false;
}

MeasureSampler default_sampler(const SkewSystem &sys, std::uint64_t seed) {
  return {sys.dimension() == 1 ? SamplerKind::UniformCircle : SamplerKind::Haar,
          seed};
}

KatokEstimate katok_entropy_estimate(const SkewSystem &sys,
                                     const MeasureSampler &sampler,
                                     const BasePoint &omega,
                                     const KatokOptions &options,
                                     StepBudget &budget) {
  if (!(options.delta > 0.0 && options.delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
  }
  if (static_cast<double>(options.sample_size) < 10.0 / options.delta) {
    throw Error(ErrorKind::InvalidArgument, "sample_size must be >= 10/delta");
  }
  if (options.n_values.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "need at least two n values");
  }
  if ((sampler.kind == SamplerKind::Haar) != (sys.dimension() == 2)) {
    throw Error(ErrorKind::InvalidArgument, "sampler does not match the fiber");
  }

  const std::vector<FiberPoint> sample = sampler.draw(options.sample_size);
  KatokEstimate out;
  out.n_values = options.n_values;
  out.epsilon = options.epsilon;
  out.delta = options.delta;
  out.sample_size = options.sample_size;
  out.sampler_invariant = sampler.proven_invariant(sys);
  out.note = "greedy cover: counts are upper bounds";
  if (!out.sampler_invariant) out.note += "; sampler not proven invariant";

  std::uint64_t steps = 0;
  for (int n : options.n_values) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n values must be >= 1");
    steps += static_cast<std::uint64_t>(n) * sample.size();
  }
  budget.reserve(steps, "katok spanning covers");

  out.counts.resize(options.n_values.size());
  detail::parallel_for(options.n_values.size(), options.threads,
                       [&](std::size_t i) {
                         StepBudget reserved(steps);  // already charged above
                         out.counts[i] = min_spanning_count(
                             sys, omega, options.n_values[i], options.epsilon,
                             sample, options.delta, reserved);
                       });
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    xs.push_back(options.n_values[i]);
    ys.push_back(std::log(static_cast<double>(out.counts[i])));
  }
  const SlopeFit f = fit_slope(xs, ys);
  out.entropy = f.slope;
  out.stderr_slope = f.stderr_slope;
  return out;
}

KatokEstimate katok_at_expansivity(const SkewSystem &sys,
                                   const MeasureSampler &sampler,
                                   const BasePoint &omega,
                                   KatokOptions options, StepBudget &budget) {
  options.epsilon = expansivity_constants(sys, 0.01).eta;
  return katok_entropy_estimate(sys, sampler, omega, options, budget);
}

}  // namespace fiberdyn
