#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ppfpose/sim.hpp"

namespace ppfpose {

/// Outcome of one property suite. `worst` is the largest residual seen,
/// already divided by the suite's tolerance (so <= 1 means pass).
struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  double seconds = 0.0;

  bool passed() const { return trials > 0 && failures == 0; }
};

/// lemma1, trace, transform, wahba, lyapunov.
const std::vector<std::string>& suite_names();

std::size_t default_trials(const std::string& suite);

/// Every trial draws from its own generator seeded from (seed, trial index),
/// so the serial and the OpenMP kernels see identical samples and return
/// identical counts. Throws InvalidInput for an unknown suite.
SuiteResult run_suite(const std::string& suite, std::size_t trials, std::uint64_t seed = 1,
                      Execution exec = Execution::kParallel);

// Per-trial residuals relative to tolerance, exposed for tests and benches.
double lemma1_residual(std::uint64_t seed, std::size_t trial);
double trace_residual(std::uint64_t seed, std::size_t trial);
double transform_residual(std::uint64_t seed, std::size_t trial);
double wahba_residual(std::uint64_t seed, std::size_t trial);

/// Largest one-step increase of the Lyapunov function along a noise-free
/// run, divided by the 1e-6 allowance. Trial 0 is the built-in "paper" scenario;
/// later trials start from random estimates inside the initial envelopes.
double lyapunov_residual(std::uint64_t seed, std::size_t trial);

/// Uniformly distributed rotation.
RotationMatrix random_rotation(std::mt19937_64& rng);

}  // namespace ppfpose
