#include "rpld/gestimate.hpp"

#include <cmath>

namespace rpld {

namespace {

SolverConfig tight() {
  SolverConfig c;
  c.tolerance = 1e-12;
  c.max_iterations = 200'000;
  return c;
}

double plugin_zeta_spectral(const Eigen::VectorXd& lam, int d, int rank,
                            const SolverConfig& config) {
  if (d < 1 || d > rank - 2) {
    fail(ErrorCode::d_too_large_for_rank,
         "need 1 <= d <= rank - 2 = " + std::to_string(rank - 2) +
             ", got d=" + std::to_string(d));
  }
  auto f = [&](double x) {
    double acc = 0.0;
    for (int i = 0; i < lam.size(); ++i) {
      if (lam(i) > 0.0) acc += lam(i) / (lam(i) + 1.0 / x);
    }
    return 1.0 - acc / d;
  };
  return bisect(f, config).root;
}

}  // namespace

double plugin_zeta(const Eigen::MatrixXd& sigma_hat, int d,
                   const SolverConfig& config) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_hat,
                                                    Eigen::EigenvaluesOnly);
  const int p = static_cast<int>(sigma_hat.rows());
  const double cutoff = p * std::numeric_limits<double>::epsilon() *
                        es.eigenvalues().cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < p; ++i) {
    if (es.eigenvalues()(i) > cutoff) ++rank;
  }
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return plugin_zeta_spectral(lam, d, rank, config);
}

GEstimator::GEstimator(const ClassStats& sample_stats, int n0, int n1)
    : pi0_(sample_stats.pi0),
      pi1_(sample_stats.pi1),
      log_prior_(std::log(sample_stats.pi1 / sample_stats.pi0)),
      n0_(n0),
      n1_(n1) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample_stats.sigma);
  rank_ = covariance_rank(sample_stats.sigma, n0 + n1);
  eigenvalues_ = es.eigenvalues().cwiseMax(0.0);
  dmu_spectral_ =
      es.eigenvectors().transpose() * (sample_stats.mu1 - sample_stats.mu0);
}

GEstimate GEstimator::at(int d) const {
  const auto cfg = tight();
  const int n = n0_ + n1_;
  const auto& lam = eigenvalues_;
  const auto& w = dmu_spectral_;

  GEstimate out;
  out.zeta = plugin_zeta_spectral(lam, d, rank_, cfg);

  double trace = 0.0;     // tr{ sigma_hat (sigma_hat + zeta^{-1} I)^{-1} }
  double quad = 0.0;      // dmu' res dmu
  double quad_mid = 0.0;  // dmu' res sigma_hat res dmu
  for (int i = 0; i < lam.size(); ++i) {
    const double res = 1.0 / (lam(i) + 1.0 / out.zeta);
    trace += lam(i) * res;
    quad += w(i) * w(i) * res;
    quad_mid += w(i) * w(i) * lam(i) * res * res;
  }
  const double t = trace / n;
  const double correction = 1.0 / (1.0 - t);

  out.m0_hat = -0.5 * quad + (trace / n0_) * correction + log_prior_;
  out.m1_hat = 0.5 * quad - (trace / n1_) * correction + log_prior_;
  out.sigma2_hat = correction * correction * quad_mid;
  if (!(out.sigma2_hat > 0.0)) {
    fail(ErrorCode::degenerate_variance,
         "estimated discriminant variance is not positive (coincident class "
         "means?)");
  }
  const double s = std::sqrt(out.sigma2_hat);
  out.error = pi0_ * std_normal_cdf(out.m0_hat / s) +
              pi1_ * std_normal_cdf(-out.m1_hat / s);
  return out;
}

GEstimate g_estimate(const ClassStats& sample_stats, int n0, int n1, int d) {
  return GEstimator(sample_stats, n0, n1).at(d);
}

GEstimate g_estimate_from_data(
    const LabeledDataset& data, int d,
    std::optional<std::pair<double, double>> priors) {
  const ClassStats stats = estimate_stats(data, priors);
  return GEstimator(stats, data.n0, data.n1).at(d);
}

}  // namespace rpld
