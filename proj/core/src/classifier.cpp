#include "rpld/classifier.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "rpld/solver.hpp"

namespace rpld {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr int kResampleAttempts = 3;

Eigen::MatrixXd gaussian_projection(int d, int p, uint64_t stream_seed) {
  std::mt19937_64 rng(stream_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(double(d));
  Eigen::MatrixXd r(d, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < d; ++i) r(i, j) = normal(rng) * scale;
  }
  return r;
}

// w = R' S^{-1} R dmu for the projected covariance S, or empty if S is
// numerically singular.
std::optional<Eigen::VectorXd> weight_from_projected(
    const Eigen::MatrixXd& r, const Eigen::MatrixXd& s,
    const Eigen::VectorXd& dmu) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success || llt.rcond() < 1.0 / kMaxCondition) {
    return std::nullopt;
  }
  return Eigen::VectorXd(r.transpose() * llt.solve(r * dmu));
}

}  // namespace

Eigen::MatrixXd sample_projection_member(int d, int p, uint64_t seed,
                                         int index, int attempt) {
  uint64_t member_seed = derive_seed(seed, static_cast<uint64_t>(index));
  if (attempt > 0) {
    member_seed = derive_seed(member_seed, 0xA77E0000ull + attempt);
  }
  return gaussian_projection(d, p, member_seed);
}

ProjectionEnsemble sample_projections(int d, int p, int M, uint64_t seed) {
  if (d < 1 || d >= p || M < 1) {
    fail(ErrorCode::bad_dimensions,
         "need 1 <= d < p and M >= 1, got d=" + std::to_string(d) +
             " p=" + std::to_string(p) + " M=" + std::to_string(M));
  }
  ProjectionEnsemble ens;
  ens.d = d;
  ens.seed = seed;
  ens.members.reserve(M);
  for (int i = 0; i < M; ++i) {
    ens.members.push_back(sample_projection_member(d, p, seed, i));
  }
  return ens;
}

DiscriminantScore lda_discriminant(const Eigen::VectorXd& x,
                                   const ClassStats& stats) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stats.sigma);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min <= 0.0 || lam_max / lam_min > kMaxCondition) {
    fail(ErrorCode::singular_covariance,
         "covariance is singular or too ill-conditioned for plain inversion");
  }
  const Eigen::VectorXd dmu = stats.mu1 - stats.mu0;
  const Eigen::VectorXd centered = x - 0.5 * (stats.mu0 + stats.mu1);
  const Eigen::VectorXd solved =
      es.eigenvectors() *
      es.eigenvalues().cwiseInverse().asDiagonal() *
      (es.eigenvectors().transpose() * centered);
  return {dmu.dot(solved) + std::log(stats.pi1 / stats.pi0)};
}

DiscriminantScore pinv_lda_discriminant(const Eigen::VectorXd& x,
                                        const ClassStats& stats) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stats.sigma);
  const double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());
  const double cutoff = stats.dim() *
                        std::numeric_limits<double>::epsilon() *
                        std::max(lam_max, 1.0);
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i) {
    inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
  }
  const Eigen::VectorXd dmu = stats.mu1 - stats.mu0;
  const Eigen::VectorXd centered = x - 0.5 * (stats.mu0 + stats.mu1);
  const Eigen::VectorXd solved = es.eigenvectors() * inv.asDiagonal() *
                                 (es.eigenvectors().transpose() * centered);
  return {dmu.dot(solved) + std::log(stats.pi1 / stats.pi0)};
}

DiscriminantScore rp_lda_discriminant(const Eigen::VectorXd& x,
                                      const ClassStats& stats,
                                      const Eigen::MatrixXd& projection) {
  const Eigen::MatrixXd s =
      projection * stats.sigma * projection.transpose();
  auto w = weight_from_projected(projection, s, stats.mu1 - stats.mu0);
  if (!w) {
    fail(ErrorCode::singular_projected_covariance,
         "projected covariance is numerically singular");
  }
  const Eigen::VectorXd centered = x - 0.5 * (stats.mu0 + stats.mu1);
  return {w->dot(centered) + std::log(stats.pi1 / stats.pi0)};
}

template <typename ProjectCov>
void TrainedEnsemble::train(const Eigen::VectorXd& dmu,
                            const ProjectCov& project_cov,
                            bool allow_resample) {
  const int p = dim();
  member_weights_.clear();
  member_weights_.reserve(projections_.members.size());
  mean_weight_ = Eigen::VectorXd::Zero(p);
  for (size_t i = 0; i < projections_.members.size(); ++i) {
    auto w = weight_from_projected(projections_.members[i],
                                   project_cov(projections_.members[i]), dmu);
    int attempt = 0;
    while (!w && allow_resample && attempt < kResampleAttempts) {
      ++attempt;
      projections_.members[i] = sample_projection_member(
          projections_.d, p, projections_.seed, static_cast<int>(i), attempt);
      w = weight_from_projected(projections_.members[i],
                                project_cov(projections_.members[i]), dmu);
    }
    if (!w) {
      fail(ErrorCode::singular_projected_covariance,
           "member " + std::to_string(i) +
               ": projected covariance stayed singular after " +
               std::to_string(attempt) + " redraws");
    }
    mean_weight_ += *w;
    member_weights_.push_back(std::move(*w));
  }
  mean_weight_ /= double(member_weights_.size());
}

TrainedEnsemble::TrainedEnsemble(const ClassStats& stats, int d, int M,
                                 uint64_t seed, StatsOrigin origin) {
  const int p = stats.dim();
  const int max_d = origin == StatsOrigin::estimated
                        ? covariance_rank(stats.sigma) - 2
                        : p - 1;
  if (d > max_d) {
    fail(ErrorCode::d_too_large,
         "d=" + std::to_string(d) + " exceeds the usable maximum " +
             std::to_string(max_d));
  }
  midpoint_ = 0.5 * (stats.mu0 + stats.mu1);
  log_prior_ = std::log(stats.pi1 / stats.pi0);
  projections_ = sample_projections(d, p, M, seed);
  train(stats.mu1 - stats.mu0,
        [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd {
          return r * stats.sigma * r.transpose();
        },
        /*allow_resample=*/true);
}

TrainedEnsemble::TrainedEnsemble(const ClassStats& stats,
                                 ProjectionEnsemble projections)
    : projections_(std::move(projections)) {
  midpoint_ = 0.5 * (stats.mu0 + stats.mu1);
  log_prior_ = std::log(stats.pi1 / stats.pi0);
  train(stats.mu1 - stats.mu0,
        [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd {
          return r * stats.sigma * r.transpose();
        },
        /*allow_resample=*/false);
}

TrainedEnsemble::TrainedEnsemble(
    const LabeledDataset& train_data, int d, int M, uint64_t seed,
    std::optional<std::pair<double, double>> priors) {
  if (train_data.n0 < 2 || train_data.n1 < 2) {
    fail(ErrorCode::class_too_small,
         "training needs at least 2 samples per class");
  }
  const int p = train_data.dim();
  const int n = train_data.size();
  const int max_d = std::min(p, n - 2) - 2;
  if (d > max_d) {
    fail(ErrorCode::d_too_large,
         "d=" + std::to_string(d) + " exceeds the usable maximum " +
             std::to_string(max_d));
  }

  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < n; ++j) {
    (train_data.labels[j] == 0 ? mu0 : mu1) += train_data.samples.col(j);
  }
  mu0 /= train_data.n0;
  mu1 /= train_data.n1;

  Eigen::MatrixXd centered(p, n);
  for (int j = 0; j < n; ++j) {
    centered.col(j) =
        train_data.samples.col(j) - (train_data.labels[j] == 0 ? mu0 : mu1);
  }
  const double divisor = double(n - 2);

  midpoint_ = 0.5 * (mu0 + mu1);
  const double pi0 =
      priors ? priors->first : double(train_data.n0) / n;
  const double pi1 = priors ? priors->second : double(train_data.n1) / n;
  log_prior_ = std::log(pi1 / pi0);
  projections_ = sample_projections(d, p, M, seed);
  train(mu1 - mu0,
        [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd {
          const Eigen::MatrixXd rc = r * centered;
          return rc * rc.transpose() / divisor;
        },
        /*allow_resample=*/true);
}

DiscriminantScore TrainedEnsemble::discriminant(const Eigen::VectorXd& x) const {
  return {mean_weight_.dot(x - midpoint_) + log_prior_};
}

DiscriminantScore TrainedEnsemble::member_discriminant(
    int i, const Eigen::VectorXd& x) const {
  return {member_weights_.at(i).dot(x - midpoint_) + log_prior_};
}

std::vector<int> TrainedEnsemble::classify_all(
    const Eigen::MatrixXd& points) const {
  if (points.rows() != dim()) {
    fail(ErrorCode::dimension_mismatch,
         "test points have dimension " + std::to_string(points.rows()) +
             ", classifier expects " + std::to_string(dim()));
  }
  const double offset = log_prior_ - mean_weight_.dot(midpoint_);
  const Eigen::VectorXd scores =
      (mean_weight_.transpose() * points).transpose().array() + offset;
  std::vector<int> labels(points.cols());
  for (int j = 0; j < points.cols(); ++j) labels[j] = scores(j) > 0.0 ? 1 : 0;
  return labels;
}

}  // namespace rpld
