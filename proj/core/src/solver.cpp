#include "rpld/solver.hpp"

#include <cmath>
#include <limits>

namespace rpld {

namespace {

double eval_checked(const std::function<double(double)>& f, double x) {
  double v = f(x);
  if (!std::isfinite(v)) {
    fail(ErrorCode::non_finite, "function returned a non-finite value at x=" +
                                    std::to_string(x));
  }
  return v;
}

void check_config(const SolverConfig& config) {
  if (!(config.tolerance > 0.0) || config.max_iterations < 1 ||
      !(config.bracket_seed > 0.0)) {
    fail(ErrorCode::bad_dimensions,
         "solver config needs tolerance > 0, max_iterations >= 1, "
         "bracket_seed > 0");
  }
}

}  // namespace

RootResult bisect(const std::function<double(double)>& f,
                  const SolverConfig& config) {
  check_config(config);
  // Probe just above zero to learn the orientation; all solved functions in
  // this library are finite there.
  const double lo0 = std::numeric_limits<double>::min();
  double f_lo = eval_checked(f, lo0);
  const double sign = f_lo >= 0.0 ? 1.0 : -1.0;
  auto g = [&](double x) { return sign * eval_checked(f, x); };

  if (f_lo == 0.0) return {lo0, 0.0, 0};

  double lo = lo0;
  double hi = config.bracket_seed;
  double g_hi = g(hi);
  int doublings = 0;
  while (g_hi > 0.0) {
    if (++doublings > 128) {
      fail(ErrorCode::no_sign_change,
           "no sign change after doubling the bracket 128 times");
    }
    lo = hi;
    hi *= 2.0;
    g_hi = g(hi);
  }
  if (g_hi == 0.0) return {hi, 0.0, doublings};

  double mid = 0.5 * (lo + hi);
  double g_mid = g(mid);
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    if (g_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double width = hi - lo;
    mid = 0.5 * (lo + hi);
    g_mid = g(mid);
    const bool converged = std::abs(g_mid) <= config.tolerance &&
                           width <= config.tolerance * std::max(1.0, std::abs(mid));
    const bool exhausted =
        width <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid);
    if (converged || exhausted) break;
  }
  return {mid, sign * g_mid, it + 1};
}

std::pair<double, double> fixed_point(
    const std::function<std::pair<double, double>(double, double)>& map,
    std::pair<double, double> init, const SolverConfig& config) {
  check_config(config);
  double a = init.first;
  double b = init.second;
  for (int it = 0; it < config.max_iterations; ++it) {
    auto [na, nb] = map(a, b);
    if (!std::isfinite(na) || !std::isfinite(nb)) {
      fail(ErrorCode::non_finite, "fixed-point map produced a non-finite pair");
    }
    const double delta = std::max(std::abs(na - a), std::abs(nb - b));
    a = na;
    b = nb;
    if (delta <= config.tolerance) return {a, b};
  }
  fail(ErrorCode::max_iterations,
       "fixed-point iteration did not converge within " +
           std::to_string(config.max_iterations) + " iterations");
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return mix64(base ^ mix64(stream));
}

}  // namespace rpld
