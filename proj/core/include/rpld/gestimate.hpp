#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "rpld/data.hpp"
#include "rpld/solver.hpp"

namespace rpld {

/// The consistent error estimate built from sample statistics alone,
/// together with the discriminant-level quantities it composes.
struct GEstimate {
  double m0_hat = 0.0;
  double m1_hat = 0.0;
  double sigma2_hat = 0.0;
  double zeta = 0.0;   // root of the sample-spectrum identity below
  double error = 0.0;  // pi0 Phi(m0/s) + pi1 Phi(-m1/s)
};

/// Root of f(x) = 1 - (1/d) tr{ sigma_hat (sigma_hat + x^{-1} I)^{-1} } over
/// x > 0, computed from the sample spectrum (null directions contribute
/// nothing). Exists only for d <= rank - 2.
double plugin_zeta(const Eigen::MatrixXd& sigma_hat, int d,
                   const SolverConfig& config = {});

/// Error estimator for the projection-averaged classifier trained on the
/// given sample statistics. One eigendecomposition at construction; each
/// projection dimension then costs one scalar root-find plus O(p) sums, so
/// d-sweeps are cheap.
class GEstimator {
 public:
  GEstimator(const ClassStats& sample_stats, int n0, int n1);

  /// Valid projection dimensions are 1 <= d <= rank - 2.
  GEstimate at(int d) const;

  int rank() const { return rank_; }
  int max_d() const { return rank_ - 2; }

 private:
  Eigen::VectorXd eigenvalues_;   // clamped at zero
  Eigen::VectorXd dmu_spectral_;  // V' (mu1_hat - mu0_hat)
  double pi0_, pi1_, log_prior_;
  int n0_, n1_, rank_;
};

/// One-shot form of GEstimator::at.
GEstimate g_estimate(const ClassStats& sample_stats, int n0, int n1, int d);

/// estimate_stats then g_estimate.
GEstimate g_estimate_from_data(const LabeledDataset& data, int d,
                               std::optional<std::pair<double, double>>
                                   priors = std::nullopt);

}  // namespace rpld
