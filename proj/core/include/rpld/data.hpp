#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpld/error.hpp"

namespace rpld {

/// Class-conditional Gaussian parameters: means, shared covariance, priors.
/// Used both for ground-truth statistics of synthetic data and for sample
/// estimates; which one an instance holds is up to the caller.
struct ClassStats {
  Eigen::VectorXd mu0;
  Eigen::VectorXd mu1;
  Eigen::MatrixXd sigma;
  double pi0 = 0.5;
  double pi1 = 0.5;

  int dim() const { return static_cast<int>(mu0.size()); }

  /// Throws unless: dimensions agree, priors are a point in (0,1) summing
  /// to 1, sigma is symmetric to 1e-10 relative and has no eigenvalue below
  /// -1e-10 * lambda_max.
  void validate() const;
};

/// Column-major sample matrix (p x n, one column per point) with binary
/// labels. Immutable by convention once built.
struct LabeledDataset {
  Eigen::MatrixXd samples;  // p x n
  std::vector<int> labels;  // size n, entries in {0, 1}
  int n0 = 0;
  int n1 = 0;

  int dim() const { return static_cast<int>(samples.rows()); }
  int size() const { return static_cast<int>(samples.cols()); }
};

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // size n, fold index in [0, k)
  uint64_t shuffle_seed = 0;
};

enum class PresetKind { spike_cov, identity_cov };

/// The synthetic generating statistics used throughout: mu0 has ceil(sqrt(p))
/// leading ones and two trailing twos, scaled by p^(-1/4); mu1 = 0. The
/// spike variant uses sigma = (10/p) * ones + 0.1 * I, the identity variant
/// sigma = I. Priors default to 1/2 each.
ClassStats synthetic_preset(int p, PresetKind kind);

/// Draws n0 + n1 points from the Gaussian mixture described by `stats`
/// (conditional covariance shared, means per class) and interleaves the two
/// class blocks with a seeded shuffle. Deterministic in `seed`.
LabeledDataset generate_synthetic(const ClassStats& stats, int n0, int n1,
                                  uint64_t seed);

/// Sample means, pooled covariance with divisor n0 + n1 - 2, and priors
/// (n0/n, n1/n) unless an explicit pair is supplied (stratified-sampling
/// mode, where class counts carry no prior information).
ClassStats estimate_stats(const LabeledDataset& data,
                          std::optional<std::pair<double, double>> priors =
                              std::nullopt);

/// Numerical rank: eigenvalues above max(p, n_hint) * eps * lambda_max.
/// n_hint defaults to p when the sample count is unknown.
int covariance_rank(const Eigen::MatrixXd& sigma_hat,
                    std::optional<int> n_hint = std::nullopt);

/// Near-equal-size partition of the shuffled index sequence. Plain (not
/// stratified) by default; stratified splits each class separately.
FoldPlan kfold_plan(int n, const std::vector<int>& labels, int k,
                    uint64_t shuffle_seed, bool stratified = false);

/// Restriction of `data` to the given fold (in or out of it).
LabeledDataset fold_subset(const LabeledDataset& data, const FoldPlan& plan,
                           int fold, bool held_out);

/// CSV ingestion: header row, one row per sample, a designated label column
/// holding exactly two distinct tokens, all other columns finite decimals.
/// Rows become columns of the sample matrix in file order; the token equal
/// to `positive_label` maps to class 1.
LabeledDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const std::string& positive_label);

/// Inverse of load_csv for datasets produced here: features f0..f{p-1} plus
/// a `label` column with tokens 0/1, printed with enough digits to
/// round-trip doubles.
void save_csv(const LabeledDataset& data, const std::string& path);

}  // namespace rpld
