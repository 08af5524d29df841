#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "rpld/error.hpp"

namespace rpld {

/// Stopping rules shared by the scalar solvers. The defaults match the
/// tolerances used throughout the library; callers that need tighter roots
/// (e.g. to feed closed-form comparisons) pass their own config.
struct SolverConfig {
  double tolerance = 1e-6;
  int max_iterations = 10'000;
  double bracket_seed = 1.0;  // initial upper bracket for bisection
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Bisection for a continuous, strictly monotone f on (0, inf). The bracket
/// is found by doubling `bracket_seed` until the sign flips (at most 128
/// doublings). Works for either orientation; the sign of f near zero decides.
/// Stops once |f(mid)| <= tolerance and the bracket is tighter than
/// tolerance * max(1, |mid|), or when the bracket hits floating-point
/// resolution.
RootResult bisect(const std::function<double(double)>& f,
                  const SolverConfig& config = {});

/// Undamped fixed-point iteration for a pair-valued update map. Converged
/// when neither component moved by more than `tolerance` in the last step.
std::pair<double, double> fixed_point(
    const std::function<std::pair<double, double>(double, double)>& map,
    std::pair<double, double> init, const SolverConfig& config = {});

/// Standard Gaussian CDF, evaluated through erfc. Absolute error well below
/// 1e-12 over the whole real line; saturates cleanly at 0 and 1.
double std_normal_cdf(double x);

// --- seeding helpers -------------------------------------------------------
//
// Every randomized operation takes a caller-supplied seed and derives the
// seeds of its sub-streams with derive_seed, so ensembles, shuffles and
// repeats stay reproducible regardless of evaluation order.

uint64_t mix64(uint64_t z);
uint64_t derive_seed(uint64_t base, uint64_t stream);

}  // namespace rpld
