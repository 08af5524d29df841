#include <benchmark/benchmark.h>

#include "rpld/evaluate.hpp"

using namespace rpld;

namespace {

LabeledDataset make_data(int p, int n) {
  const auto truth = synthetic_preset(p, PresetKind::spike_cov);
  return generate_synthetic(truth, n / 2, n - n / 2, 1);
}

void bm_zeta_known(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto truth = synthetic_preset(p, PresetKind::spike_cov);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(truth.sigma,
                                                    Eigen::EigenvaluesOnly);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zeta_known_cov(truth.sigma, p / 4));
  }
}
BENCHMARK(bm_zeta_known)->Arg(100)->Arg(200)->Arg(400);

void bm_g_estimate_sweep(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto data = make_data(p, 2 * p);
  const auto stats = estimate_stats(data);
  for (auto _ : state) {
    GEstimator gest(stats, data.n0, data.n1);
    double acc = 0.0;
    for (int d = 1; d <= gest.max_d(); ++d) acc += gest.at(d).error;
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(bm_g_estimate_sweep)->Arg(100)->Arg(200);

void bm_train_ensemble(benchmark::State& state) {
  const int p = 200;
  const auto data = make_data(p, 400);
  const auto stats = estimate_stats(data);
  const int d = static_cast<int>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    TrainedEnsemble ens(stats, d, 100, seed++);
    benchmark::DoNotOptimize(ens.mean_weight());
  }
}
BENCHMARK(bm_train_ensemble)->Arg(20)->Arg(80)->Arg(150);

void bm_classify_block(benchmark::State& state) {
  const int p = 200;
  const auto data = make_data(p, 400);
  const auto stats = estimate_stats(data);
  TrainedEnsemble ens(stats, 40, 100, 3);
  const auto truth = synthetic_preset(p, PresetKind::spike_cov);
  const auto test = generate_synthetic(truth, 5000, 5000, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ens.classify_all(test.samples));
  }
}
BENCHMARK(bm_classify_block);

}  // namespace

BENCHMARK_MAIN();
