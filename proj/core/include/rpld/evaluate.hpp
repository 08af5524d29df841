#pragma once

#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "rpld/asymptotic.hpp"
#include "rpld/classifier.hpp"
#include "rpld/data.hpp"
#include "rpld/gestimate.hpp"

namespace rpld {

/// Fraction of test columns the trained ensemble labels incorrectly.
ErrorEstimate empirical_error(const TrainedEnsemble& ens,
                              const LabeledDataset& test);

/// Misclassification rate of a plain linear discriminant with the given
/// statistics over a labeled test set. Convenience for baseline curves.
ErrorEstimate lda_empirical_error(const ClassStats& stats,
                                  const LabeledDataset& test);

struct CvConfig {
  int d = 1;
  int M = 100;
  int folds = 10;
  int repeats = 100;
  uint64_t seed = 0;
  std::optional<std::pair<double, double>> priors;
  bool stratified = false;
  int threads = 1;
};

/// Averaged k-fold cross-validation: each repeat reshuffles with a seed
/// derived from (seed, repeat), retrains the ensemble per fold, pools the
/// misclassified counts over the k folds, and the repeat errors are
/// averaged. Deterministic regardless of thread count.
ErrorEstimate cross_validate(const LabeledDataset& data,
                             const CvConfig& config);

enum class EstimatorKind { g_estimate, de_oracle, empirical, cv };

struct SweepRow {
  int d = 0;
  std::optional<double> g_estimate;
  std::optional<double> de_oracle;
  std::optional<double> empirical;
  std::optional<double> cv;

  std::optional<double> get(EstimatorKind kind) const;
};

struct TuningResult {
  std::vector<SweepRow> rows;
  int best_d = 0;
  EstimatorKind criterion = EstimatorKind::g_estimate;
};

struct SweepConfig {
  int M = 100;
  uint64_t seed = 0;
  /// Population statistics; required for the de_oracle column and for
  /// generating a synthetic test set when none is supplied.
  std::optional<ClassStats> true_stats;
  /// Explicit test set for the empirical column; generated from true_stats
  /// (test_size points, class split by priors) when absent.
  std::optional<LabeledDataset> test;
  int test_size = 100'000;
  std::optional<std::pair<double, double>> known_priors;
  KnowledgeRegime de_regime = {};  // default: everything estimated
  int cv_folds = 10;
  int cv_repeats = 100;
  EstimatorKind criterion = EstimatorKind::g_estimate;
  int threads = 1;
};

/// One row per projection dimension with the requested estimate columns.
/// best_d minimizes the criterion column; ties break to the smaller d.
/// Row seeds are derived from (seed, d), so results do not depend on grid
/// order or thread scheduling.
TuningResult sweep(const LabeledDataset& data, const std::vector<int>& d_grid,
                   const std::set<EstimatorKind>& estimators,
                   const SweepConfig& config);

/// Runs fn(0..count-1) on up to `threads` workers. Tasks must be
/// independent; with threads <= 1 this is a plain loop.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace rpld
