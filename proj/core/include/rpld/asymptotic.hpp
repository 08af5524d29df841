#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "rpld/data.hpp"
#include "rpld/solver.hpp"

namespace rpld {

/// Class-conditional mean and variance of the projection-averaged
/// discriminant: the score is Gaussian with mean m0 (class 0) or m1
/// (class 1) and common variance sigma2.
struct DiscriminantStats {
  double m0 = 0.0;
  double m1 = 0.0;
  double sigma2 = 0.0;
};

/// How an error value was produced. Carried alongside every probability so
/// downstream reports can tell an analytic number from a measured one.
enum class Provenance { exact, deterministic_equivalent, g_estimate, empirical, cross_validation };

struct ErrorEstimate {
  double value = 0.0;
  Provenance provenance = Provenance::exact;
};

/// Scalars of the covariance fixed-point system. `zeta` is the reciprocal
/// ridge through which the projection average acts on the covariance; the
/// remaining fields are filled only on the sample-covariance route.
struct FixedPointQuantities {
  double zeta = 0.0;
  std::optional<double> x_star;
  std::optional<double> e;
  std::optional<double> e_tilde;
  std::optional<double> kappa;
};

/// Which statistics the classifier was given as population truths.
struct KnowledgeRegime {
  bool means_known = false;
  bool covariance_known = false;
};

/// Root of g(x) = 1 - (1/d) tr{ sigma (sigma + x^{-1} I)^{-1} } over x > 0,
/// for a positive-definite covariance and d < p. Solved spectrally by
/// bisection; residual |g| held below `config.tolerance`.
double zeta_known_cov(const Eigen::MatrixXd& sigma, int d,
                      const SolverConfig& config = {});

/// Fixed-point quantities for the pooled sample covariance of n draws from a
/// population with covariance `sigma`: x* (root of h), zeta, the (e, e~)
/// pair and the variance inflation kappa.
FixedPointQuantities sample_cov_fixed_points(const Eigen::MatrixXd& sigma,
                                             int d, int n,
                                             const SolverConfig& config = {});

/// Limiting class-conditional discriminant statistics of the
/// projection-averaged classifier for the four knowledge regimes, computed
/// from the population statistics (oracle mode) and the sample sizes.
DiscriminantStats de_discriminant_stats(KnowledgeRegime regime,
                                        const ClassStats& truth, int n0,
                                        int n1, int d);

/// pi0 Phi(m0/sigma) + pi1 Phi(-m1/sigma).
ErrorEstimate compose_error(const DiscriminantStats& stats, double pi0,
                            double pi1,
                            Provenance provenance = Provenance::exact);

/// Same as de_discriminant_stats composed through compose_error, with the
/// covariance eigendecomposition shared across a d-sweep.
class DeEvaluator {
 public:
  DeEvaluator(const ClassStats& truth, int n0, int n1);

  DiscriminantStats stats(KnowledgeRegime regime, int d) const;
  ErrorEstimate error(KnowledgeRegime regime, int d) const;

  int dim() const { return static_cast<int>(eigenvalues_.size()); }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd dmu_spectral_;  // V' (mu1 - mu0)
  double pi0_, pi1_, log_prior_;
  int n0_, n1_;
};

/// The four isotropic-covariance, equal-prior closed forms, keyed by the
/// knowledge regime they specialize.
ErrorEstimate isotropic_closed_form(KnowledgeRegime regime,
                                    double delta_mu_norm, int p, int n0,
                                    int n1, int d);

/// Monte Carlo check of the projected-resolvent bilinear form: the average
/// over independent projections of a' R'(R sigma R' + gamma I)^{-1} R b,
/// against its limit a' (sigma + delta^{-1} I)^{-1} b. `delta` solves the
/// companion scalar equation and is reported as a by-product.
struct BilinearResolventCheck {
  double mc_mean = 0.0;
  double mc_std_error = 0.0;
  double de_value = 0.0;
  double delta = 0.0;
};

BilinearResolventCheck mc_bilinear_resolvent(const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& b,
                                             const Eigen::MatrixXd& sigma,
                                             double gamma, int d, int samples,
                                             uint64_t seed);

}  // namespace rpld
