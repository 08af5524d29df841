#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rpld/data.hpp"

namespace rpld {

struct DiscriminantScore {
  double value = 0.0;
};

/// 1 if the score is strictly positive, else 0 (ties go to class 0).
inline int classify(DiscriminantScore score) { return score.value > 0.0 ? 1 : 0; }

/// M independent d x p Gaussian projections with i.i.d. N(0, 1/d) entries.
/// Member i is drawn from a stream derived from (seed, i), so individual
/// members are reproducible on their own.
struct ProjectionEnsemble {
  std::vector<Eigen::MatrixXd> members;
  int d = 0;
  uint64_t seed = 0;
};

ProjectionEnsemble sample_projections(int d, int p, int M, uint64_t seed);

/// Single projection matrix for member `index` of the ensemble keyed by
/// `seed`; `attempt` > 0 selects replacement draws for ill-conditioned
/// members.
Eigen::MatrixXd sample_projection_member(int d, int p, uint64_t seed,
                                         int index, int attempt = 0);

/// Linear discriminant with the supplied statistics:
///   (mu1 - mu0)' sigma^{-1} (x - (mu0 + mu1)/2) + ln(pi1/pi0).
/// Requires sigma invertible (condition number <= 1e12).
DiscriminantScore lda_discriminant(const Eigen::VectorXd& x,
                                   const ClassStats& stats);

/// Same decision statistic with the Moore-Penrose pseudoinverse, defined for
/// any symmetric PSD covariance (including 0).
DiscriminantScore pinv_lda_discriminant(const Eigen::VectorXd& x,
                                        const ClassStats& stats);

/// Discriminant after projecting through a single R:
///   (mu1 - mu0)' R' (R sigma R')^{-1} R (x - midpoint) + ln(pi1/pi0).
DiscriminantScore rp_lda_discriminant(const Eigen::VectorXd& x,
                                      const ClassStats& stats,
                                      const Eigen::MatrixXd& projection);

/// Whether the training statistics are population values or sample
/// estimates; sample estimates cap the usable projection dimension at
/// rank - 2 of the covariance estimate.
enum class StatsOrigin { known, estimated };

/// Projection-averaged classifier. Training solves each member's projected
/// system once and caches
///   w_i = R_i' (R_i sigma R_i')^{-1} R_i (mu1 - mu0)
/// so scoring a point is an inner product with the cached mean weight.
class TrainedEnsemble {
 public:
  /// Samples M projections from `seed` and trains on explicit statistics.
  /// Members whose projected covariance has condition number above 1e12
  /// are redrawn up to 3 times.
  TrainedEnsemble(const ClassStats& stats, int d, int M, uint64_t seed,
                  StatsOrigin origin = StatsOrigin::estimated);

  /// Trains on caller-supplied projections (no resampling on failure, no
  /// dimension cap: the caller owns the projection choice).
  TrainedEnsemble(const ClassStats& stats, ProjectionEnsemble projections);

  /// Trains from a dataset directly, keeping the pooled covariance in its
  /// centered-sample factored form: each member solves
  /// (R C)(R C)'/(n-2) instead of forming the p x p matrix, which drops the
  /// per-member cost from O(d p^2) to O(d p n). The projection dimension is
  /// capped at min(p, n-2) - 2, the almost-sure rank of the pooled estimate
  /// minus two.
  TrainedEnsemble(const LabeledDataset& train, int d, int M, uint64_t seed,
                  std::optional<std::pair<double, double>> priors =
                      std::nullopt);

  DiscriminantScore discriminant(const Eigen::VectorXd& x) const;
  DiscriminantScore member_discriminant(int i, const Eigen::VectorXd& x) const;

  /// Labels for every column of a test matrix in one pass.
  std::vector<int> classify_all(const Eigen::MatrixXd& points) const;

  int members() const { return static_cast<int>(member_weights_.size()); }
  int d() const { return projections_.d; }
  int dim() const { return static_cast<int>(midpoint_.size()); }
  const ProjectionEnsemble& projections() const { return projections_; }
  const Eigen::VectorXd& mean_weight() const { return mean_weight_; }

 private:
  // Builds the member weights; project_cov maps a projection R to the d x d
  // projected covariance.
  template <typename ProjectCov>
  void train(const Eigen::VectorXd& dmu, const ProjectCov& project_cov,
             bool allow_resample);

  ProjectionEnsemble projections_;
  std::vector<Eigen::VectorXd> member_weights_;
  Eigen::VectorXd mean_weight_;
  Eigen::VectorXd midpoint_;
  double log_prior_ = 0.0;
};

}  // namespace rpld
