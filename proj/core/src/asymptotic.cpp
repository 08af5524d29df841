#include "rpld/asymptotic.hpp"

#include <cmath>
#include <random>

namespace rpld {

namespace {

// Tight internal tolerance: the public SolverConfig default (1e-6) is the
// contract; solving tighter costs a handful of extra bisection steps and
// keeps closed-form comparisons out of the solver-noise floor.
SolverConfig tight() {
  SolverConfig c;
  c.tolerance = 1e-12;
  c.max_iterations = 200'000;
  return c;
}

double zeta_from_eigenvalues(const Eigen::VectorXd& lam, int d,
                             const SolverConfig& config) {
  auto g = [&](double x) {
    double acc = 0.0;
    for (int i = 0; i < lam.size(); ++i) {
      acc += lam(i) / (lam(i) + 1.0 / x);
    }
    return 1.0 - acc / d;
  };
  return bisect(g, config).root;
}

struct SampleCovSpectralFixedPoints {
  double x_star, zeta, e, e_tilde, kappa;
};

SampleCovSpectralFixedPoints sample_cov_fixed_points_spectral(
    const Eigen::VectorXd& lam, int d, int n, const SolverConfig& config) {
  const int p = static_cast<int>(lam.size());
  auto h = [&](double x) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) acc += 1.0 / (1.0 + x * lam(i));
    return 1.0 - double(p) / d + acc / d;
  };
  const double x_star = bisect(h, config).root;

  double trace_term = 0.0;  // (1/n) tr{ sigma (x* sigma + I)^{-1} }
  for (int i = 0; i < p; ++i) trace_term += lam(i) / (x_star * lam(i) + 1.0);
  trace_term /= n;
  const double zeta = x_star / (1.0 - x_star * trace_term);

  auto map = [&](double e, double e_tilde) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) acc += lam(i) / (e_tilde * lam(i) + 1.0);
    const double e_next = zeta * acc / n;
    return std::make_pair(e_next, zeta / (1.0 + e_next));
  };
  auto [e, e_tilde] = fixed_point(map, {0.0, zeta}, config);

  double trace_sq = 0.0;  // (1/p) tr{ sigma (e~ sigma + I)^{-1} sigma (...) }
  for (int i = 0; i < p; ++i) {
    const double r = lam(i) / (e_tilde * lam(i) + 1.0);
    trace_sq += r * r;
  }
  trace_sq /= p;
  const double kappa =
      1.0 / (1.0 - (double(p) / n) * zeta * zeta * trace_sq /
                       ((1.0 + e) * (1.0 + e)));
  return {x_star, zeta, e, e_tilde, kappa};
}

Eigen::VectorXd positive_eigenvalues_checked(const Eigen::MatrixXd& sigma,
                                             int d, bool require_pd) {
  const int p = static_cast<int>(sigma.rows());
  if (d < 1 || d >= p) {
    fail(ErrorCode::d_geq_p, "need 1 <= d < p, got d=" + std::to_string(d) +
                                 " p=" + std::to_string(p));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                    Eigen::EigenvaluesOnly);
  if (require_pd && es.eigenvalues().minCoeff() <= 0.0) {
    fail(ErrorCode::not_positive_definite,
         "covariance must be positive definite");
  }
  return es.eigenvalues();
}

}  // namespace

double zeta_known_cov(const Eigen::MatrixXd& sigma, int d,
                      const SolverConfig& config) {
  const Eigen::VectorXd lam =
      positive_eigenvalues_checked(sigma, d, /*require_pd=*/true);
  return zeta_from_eigenvalues(lam, d, config);
}

FixedPointQuantities sample_cov_fixed_points(const Eigen::MatrixXd& sigma,
                                             int d, int n,
                                             const SolverConfig& config) {
  if (d >= n) {
    fail(ErrorCode::d_geq_p,
         "sample-covariance fixed points need d < n, got d=" +
             std::to_string(d) + " n=" + std::to_string(n));
  }
  const Eigen::VectorXd lam =
      positive_eigenvalues_checked(sigma, d, /*require_pd=*/true);
  const auto fp = sample_cov_fixed_points_spectral(lam, d, n, config);
  FixedPointQuantities out;
  out.zeta = fp.zeta;
  out.x_star = fp.x_star;
  out.e = fp.e;
  out.e_tilde = fp.e_tilde;
  out.kappa = fp.kappa;
  return out;
}

ErrorEstimate compose_error(const DiscriminantStats& stats, double pi0,
                            double pi1, Provenance provenance) {
  if (!(stats.sigma2 > 0.0)) {
    fail(ErrorCode::degenerate_variance,
         "discriminant variance must be positive");
  }
  const double s = std::sqrt(stats.sigma2);
  const double value =
      pi0 * std_normal_cdf(stats.m0 / s) + pi1 * std_normal_cdf(-stats.m1 / s);
  return {value, provenance};
}

DeEvaluator::DeEvaluator(const ClassStats& truth, int n0, int n1)
    : pi0_(truth.pi0),
      pi1_(truth.pi1),
      log_prior_(std::log(truth.pi1 / truth.pi0)),
      n0_(n0),
      n1_(n1) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(truth.sigma);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    fail(ErrorCode::not_positive_definite,
         "population covariance must be positive definite");
  }
  eigenvalues_ = es.eigenvalues();
  dmu_spectral_ = es.eigenvectors().transpose() * (truth.mu1 - truth.mu0);
}

DiscriminantStats DeEvaluator::stats(KnowledgeRegime regime, int d) const {
  const int p = dim();
  const int n = n0_ + n1_;
  if (d < 1 || d >= p || (!regime.covariance_known && d >= n)) {
    fail(ErrorCode::d_geq_p,
         "need 1 <= d < p (and d < n when the covariance is estimated), "
         "got d=" + std::to_string(d));
  }
  const auto& lam = eigenvalues_;
  const auto& w = dmu_spectral_;
  const auto cfg = tight();

  double quad = 0.0;      // dmu' res dmu
  double quad_mid = 0.0;  // dmu' res sigma res dmu
  double tr_res = 0.0;    // tr{ sigma res }
  double tr_sq = 0.0;     // tr{ sigma res sigma res }
  double scale_m = 1.0;   // multiplies the mean quadratic/trace terms
  double scale_v = 1.0;   // multiplies the variance terms

  if (regime.covariance_known) {
    const double zeta = zeta_from_eigenvalues(lam, d, cfg);
    for (int i = 0; i < p; ++i) {
      const double res = 1.0 / (lam(i) + 1.0 / zeta);
      quad += w(i) * w(i) * res;
      quad_mid += w(i) * w(i) * lam(i) * res * res;
      tr_res += lam(i) * res;
      tr_sq += lam(i) * lam(i) * res * res;
    }
  } else {
    const auto fp = sample_cov_fixed_points_spectral(lam, d, n, cfg);
    for (int i = 0; i < p; ++i) {
      const double res = 1.0 / (fp.e_tilde * lam(i) + 1.0);
      quad += w(i) * w(i) * res;
      quad_mid += w(i) * w(i) * lam(i) * res * res;
      tr_res += lam(i) * res;
      tr_sq += lam(i) * lam(i) * res * res;
    }
    scale_m = fp.zeta;
    scale_v = fp.kappa * fp.zeta * fp.zeta;
  }

  DiscriminantStats out;
  const double half_quad = 0.5 * scale_m * quad;
  out.m0 = -half_quad + log_prior_;
  out.m1 = half_quad + log_prior_;
  out.sigma2 = scale_v * quad_mid;
  if (!regime.means_known) {
    const double mean_corr =
        0.5 * scale_m * (1.0 / n0_ - 1.0 / n1_) * tr_res;
    out.m0 += mean_corr;
    out.m1 += mean_corr;
    out.sigma2 += scale_v * (1.0 / n0_ + 1.0 / n1_) * tr_sq;
  }
  return out;
}

ErrorEstimate DeEvaluator::error(KnowledgeRegime regime, int d) const {
  return compose_error(stats(regime, d), pi0_, pi1_,
                       Provenance::deterministic_equivalent);
}

DiscriminantStats de_discriminant_stats(KnowledgeRegime regime,
                                        const ClassStats& truth, int n0,
                                        int n1, int d) {
  return DeEvaluator(truth, n0, n1).stats(regime, d);
}

ErrorEstimate isotropic_closed_form(KnowledgeRegime regime,
                                    double delta_mu_norm, int p, int n0,
                                    int n1, int d) {
  const int n = n0 + n1;
  const double nsq = delta_mu_norm * delta_mu_norm;
  double shrink = 1.0;  // multiplies the Phi arguments
  if (!regime.covariance_known) {
    const double dd = double(d) * d / (double(n) * p);
    if (dd > 1.0) {
      fail(ErrorCode::assumption_violated,
           "the unknown-covariance closed forms need d^2 <= n p");
    }
    shrink = std::sqrt(1.0 - dd);
  }

  double value = 0.0;
  if (regime.means_known) {
    value = std_normal_cdf(-0.5 * delta_mu_norm * shrink);
  } else {
    const double denom = std::sqrt(nsq + double(p) / n0 + double(p) / n1);
    const double arg0 = -0.5 * (nsq + double(p) / n1 - double(p) / n0) / denom;
    const double arg1 = -0.5 * (nsq + double(p) / n0 - double(p) / n1) / denom;
    value = 0.5 * std_normal_cdf(arg0 * shrink) +
            0.5 * std_normal_cdf(arg1 * shrink);
  }
  return {value, Provenance::deterministic_equivalent};
}

BilinearResolventCheck mc_bilinear_resolvent(const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& b,
                                             const Eigen::MatrixXd& sigma,
                                             double gamma, int d, int samples,
                                             uint64_t seed) {
  const int p = static_cast<int>(sigma.rows());
  if (gamma <= 0.0 || samples < 1 || d < 1 || d >= p) {
    fail(ErrorCode::bad_dimensions,
         "need gamma > 0, samples >= 1 and 1 <= d < p");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = es.eigenvalues();

  // delta solves delta = 1 / (gamma + (1/d) tr{ D (I + delta D)^{-1} });
  // as a root problem: 1 - x (gamma + trace(x)) = 0, decreasing in x.
  auto root_fn = [&](double x) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) acc += lam(i) / (1.0 + x * lam(i));
    return 1.0 - x * (gamma + acc / d);
  };
  const double delta = bisect(root_fn, tight()).root;

  Eigen::MatrixXd shifted = sigma;
  shifted.diagonal().array() += 1.0 / delta;
  const double de_value = a.dot(shifted.llt().solve(b));

  std::mt19937_64 rng(derive_seed(seed, 0xB111));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(double(d));
  double sum = 0.0, sum_sq = 0.0;
  Eigen::MatrixXd r(d, p);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < d; ++i) r(i, j) = normal(rng) * scale;
    }
    Eigen::MatrixXd m = r * sigma * r.transpose();
    m.diagonal().array() += gamma;
    const double v = (r * a).dot(m.llt().solve(r * b));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  double std_error = 0.0;
  if (samples > 1) {
    const double var = (sum_sq - samples * mean * mean) / (samples - 1);
    std_error = std::sqrt(std::max(var, 0.0) / samples);
  }
  return {mean, std_error, de_value, delta};
}

}  // namespace rpld
