// Microbenchmarks for the hot paths: dense forward, sparse-AE training
// step, LSTM BPTT step, NIfTI parsing and AUC computation.

#include <benchmark/benchmark.h>

#include <vector>

#include "ae2lstm/dense.hpp"
#include "ae2lstm/lstm.hpp"
#include "ae2lstm/metrics.hpp"
#include "ae2lstm/nifti.hpp"
#include "ae2lstm/optimizer.hpp"
#include "ae2lstm/rng.hpp"
#include "ae2lstm/sparse_ae.hpp"

namespace {

using namespace ae2lstm;

void bm_dense_forward(benchmark::State& state) {
  const Eigen::Index in = state.range(0), out = state.range(0) / 2;
  DenseLayer<float> layer("bench", in, out, Activation::sigmoid);
  Rng rng(1);
  layer.init(rng);
  MatX<float> batch = MatX<float>::Constant(in, 32, 0.5f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layer.eval(batch));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(bm_dense_forward)->Arg(256)->Arg(1024);

void bm_sparse_ae_step(benchmark::State& state) {
  const Eigen::Index in = state.range(0);
  SparseAeHyper<float> hyper;
  SparseAe<float> ae(in, in / 8, hyper, "bench");
  Rng rng(2);
  ae.init(rng);
  MatX<float> batch(in, 32);
  for (int i = 0; i < batch.size(); ++i)
    batch.data()[i] = float(rng.uniform(0.0, 1.0));
  Optimizer<float> opt(OptimizerKind::sgd, 1e-4f, ae.params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(ae.loss_and_backward(batch).total);
    opt.step();
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(bm_sparse_ae_step)->Arg(256)->Arg(1024);

void bm_lstm_train_step(benchmark::State& state) {
  const Eigen::Index nh = state.range(0);
  LstmModel<float> model(64, nh);
  Rng rng(3);
  model.init(rng);
  FeatureSequence<float> seq;
  seq.label = 1;
  for (int t = 0; t < 12; ++t) {
    VecX<float> x(64);
    for (int i = 0; i < 64; ++i) x(i) = float(rng.uniform(0.0, 1.0));
    seq.steps.push_back(x);
  }
  Optimizer<float> opt(OptimizerKind::adam, 1e-4f, model.params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.train_step(seq, 1.0f));
    opt.step();
  }
  state.SetItemsProcessed(state.iterations() * 12);
}
BENCHMARK(bm_lstm_train_step)->Arg(64)->Arg(500);

void bm_nifti_parse(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> raw(32 * 32 * 12);
  for (auto& voxel : raw) voxel = rng.uniform(0.0, 1.0);
  std::vector<std::uint8_t> bytes = nifti::write(32, 32, 12, raw);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nifti::parse(bytes));
  }
  state.SetBytesProcessed(state.iterations() * int64_t(bytes.size()));
}
BENCHMARK(bm_nifti_parse);

void bm_auc(benchmark::State& state) {
  const int n = int(state.range(0));
  Rng rng(5);
  std::vector<double> probs(static_cast<std::size_t>(n));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    probs[std::size_t(i)] = rng.uniform(0.0, 1.0);
    labels[std::size_t(i)] = int(rng.below(2));
  }
  labels[0] = 0;
  labels[std::size_t(n - 1)] = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_metrics(probs, labels));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_auc)->Arg(119)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
