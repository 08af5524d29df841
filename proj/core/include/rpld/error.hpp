#pragma once

#include <stdexcept>
#include <string>

namespace rpld {

// Every failure the library reports, so callers can branch on the kind
// without parsing messages.
enum class ErrorCode {
  // solver
  no_sign_change,
  non_finite,
  max_iterations,
  // data
  not_psd,
  dimension_too_small,
  class_too_small,
  k_too_large,
  malformed_csv,
  non_numeric_feature,
  more_than_two_labels,
  // classifiers
  bad_dimensions,
  singular_covariance,
  singular_projected_covariance,
  d_too_large,
  // asymptotics
  d_geq_p,
  not_positive_definite,
  oracle_required,
  assumption_violated,
  // g-estimation
  d_too_large_for_rank,
  degenerate_variance,
  // evaluation
  d_too_large_for_fold,
  dimension_mismatch,
  // io
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rpld
