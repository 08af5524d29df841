#include "rpld/evaluate.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rpld {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::min(std::max(threads, 1), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

ErrorEstimate empirical_error(const TrainedEnsemble& ens,
                              const LabeledDataset& test) {
  if (test.dim() != ens.dim()) {
    fail(ErrorCode::dimension_mismatch,
         "test dimension " + std::to_string(test.dim()) +
             " does not match classifier dimension " +
             std::to_string(ens.dim()));
  }
  const auto predicted = ens.classify_all(test.samples);
  int wrong = 0;
  for (int j = 0; j < test.size(); ++j) {
    if (predicted[j] != test.labels[j]) ++wrong;
  }
  return {double(wrong) / test.size(), Provenance::empirical};
}

ErrorEstimate lda_empirical_error(const ClassStats& stats,
                                  const LabeledDataset& test) {
  if (test.dim() != stats.dim()) {
    fail(ErrorCode::dimension_mismatch, "test dimension mismatch");
  }
  // Same score for every point; solve once.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stats.sigma);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min <= 0.0 || lam_max / lam_min > 1e12) {
    fail(ErrorCode::singular_covariance, "covariance too ill-conditioned");
  }
  const Eigen::VectorXd w =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
      (es.eigenvectors().transpose() * (stats.mu1 - stats.mu0));
  const double offset = std::log(stats.pi1 / stats.pi0) -
                        w.dot(0.5 * (stats.mu0 + stats.mu1));
  int wrong = 0;
  for (int j = 0; j < test.size(); ++j) {
    const int label = w.dot(test.samples.col(j)) + offset > 0.0 ? 1 : 0;
    if (label != test.labels[j]) ++wrong;
  }
  return {double(wrong) / test.size(), Provenance::empirical};
}

ErrorEstimate cross_validate(const LabeledDataset& data,
                             const CvConfig& config) {
  const int n = data.size();
  std::vector<double> repeat_errors(config.repeats, 0.0);

  parallel_for(config.repeats, config.threads, [&](int r) {
    const uint64_t repeat_seed = derive_seed(config.seed, r);
    const FoldPlan plan = kfold_plan(n, data.labels, config.folds, repeat_seed,
                                     config.stratified);
    int wrong = 0;
    for (int f = 0; f < config.folds; ++f) {
      const LabeledDataset train = fold_subset(data, plan, f, false);
      const LabeledDataset held = fold_subset(data, plan, f, true);
      if (config.d > std::min(train.dim(), train.size() - 2) - 2) {
        fail(ErrorCode::d_too_large_for_fold,
             "d=" + std::to_string(config.d) +
                 " exceeds rank - 2 of a fold's training covariance");
      }
      // Factored-covariance training keeps each fold at O(M d p n_fold).
      const TrainedEnsemble ens(train, config.d, config.M,
                                derive_seed(repeat_seed, 0xF01D0000ull + f),
                                config.priors);
      const auto predicted = ens.classify_all(held.samples);
      for (int j = 0; j < held.size(); ++j) {
        if (predicted[j] != held.labels[j]) ++wrong;
      }
    }
    repeat_errors[r] = double(wrong) / n;
  });

  double sum = 0.0;
  for (double e : repeat_errors) sum += e;
  return {sum / config.repeats, Provenance::cross_validation};
}

std::optional<double> SweepRow::get(EstimatorKind kind) const {
  switch (kind) {
    case EstimatorKind::g_estimate: return g_estimate;
    case EstimatorKind::de_oracle: return de_oracle;
    case EstimatorKind::empirical: return empirical;
    case EstimatorKind::cv: return cv;
  }
  return std::nullopt;
}

TuningResult sweep(const LabeledDataset& data, const std::vector<int>& d_grid,
                   const std::set<EstimatorKind>& estimators,
                   const SweepConfig& config) {
  if (d_grid.empty() || estimators.empty()) {
    fail(ErrorCode::bad_dimensions, "empty d-grid or estimator set");
  }
  if (!estimators.count(config.criterion)) {
    fail(ErrorCode::bad_dimensions,
         "tuning criterion is not among the requested estimators");
  }

  const ClassStats sample_stats = estimate_stats(data, config.known_priors);

  std::optional<GEstimator> gest;
  if (estimators.count(EstimatorKind::g_estimate)) {
    gest.emplace(sample_stats, data.n0, data.n1);
  }

  std::optional<DeEvaluator> de;
  if (estimators.count(EstimatorKind::de_oracle)) {
    if (!config.true_stats) {
      fail(ErrorCode::oracle_required,
           "the de_oracle column needs the population statistics");
    }
    de.emplace(*config.true_stats, data.n0, data.n1);
  }

  std::optional<LabeledDataset> generated_test;
  const LabeledDataset* test = nullptr;
  if (estimators.count(EstimatorKind::empirical)) {
    if (config.test) {
      test = &*config.test;
    } else if (config.true_stats) {
      const double pi0 = config.true_stats->pi0;
      const int t0 = static_cast<int>(std::lround(config.test_size * pi0));
      generated_test =
          generate_synthetic(*config.true_stats, t0, config.test_size - t0,
                             derive_seed(config.seed, 0x7E57));
      test = &*generated_test;
    } else {
      fail(ErrorCode::oracle_required,
           "the empirical column needs a test set or population statistics");
    }
  }

  TuningResult result;
  result.criterion = config.criterion;
  result.rows.resize(d_grid.size());

  parallel_for(static_cast<int>(d_grid.size()), config.threads, [&](int i) {
    const int d = d_grid[i];
    SweepRow row;
    row.d = d;
    if (gest) row.g_estimate = gest->at(d).error;
    if (de) row.de_oracle = de->error(config.de_regime, d).value;
    if (test) {
      const TrainedEnsemble ens(sample_stats, d, config.M,
                                derive_seed(config.seed, 0xE3750000ull + d),
                                StatsOrigin::estimated);
      row.empirical = empirical_error(ens, *test).value;
    }
    if (estimators.count(EstimatorKind::cv)) {
      CvConfig cv;
      cv.d = d;
      cv.M = config.M;
      cv.folds = config.cv_folds;
      cv.repeats = config.cv_repeats;
      cv.seed = derive_seed(config.seed, 0xC0000ull + d);
      cv.priors = config.known_priors;
      row.cv = cross_validate(data, cv).value;
    }
    result.rows[i] = std::move(row);
  });

  int best = 0;
  for (size_t i = 1; i < result.rows.size(); ++i) {
    const double v = *result.rows[i].get(config.criterion);
    const double b = *result.rows[best].get(config.criterion);
    const bool better =
        v < b || (v == b && result.rows[i].d < result.rows[best].d);
    if (better) best = static_cast<int>(i);
  }
  result.best_d = result.rows[best].d;
  return result;
}

}  // namespace rpld
