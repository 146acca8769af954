#include <benchmark/benchmark.h>

#include "archsage/assessor.hpp"
#include "archsage/dataset.hpp"
#include "archsage/embedder.hpp"
#include "archsage/metrics.hpp"
#include "archsage/trainer.hpp"

using namespace archsage;

namespace {

num::Matrix random_embeddings(int n, int dim, uint64_t seed) {
  RngStream rng(seed);
  num::Matrix m(n, dim);
  for (double& v : m.data) v = 2.0 * rng.uniform() - 1.0;
  return m;
}

void BM_SampleRandom(benchmark::State& state) {
  space::SpaceParams params;
  RngStream rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(space::sample_random(rng, params));
  }
}
BENCHMARK(BM_SampleRandom);

void BM_Encode(benchmark::State& state) {
  space::SpaceParams params;
  RngStream rng(2);
  space::CellSpec spec = space::sample_random(rng, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(space::encode(spec, params));
  }
}
BENCHMARK(BM_Encode);

void BM_SynthPerformance(benchmark::State& state) {
  space::SpaceParams params;
  data::OracleParams oracle;
  RngStream rng(3);
  space::CellSpec spec = space::sample_random(rng, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(data::synth_performance(spec, oracle, params));
  }
}
BENCHMARK(BM_SynthPerformance);

void BM_BuildGraph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  num::Matrix emb = random_embeddings(n, 32, 4);
  assess::GraphConfig cfg;
  cfg.sigma = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(assess::build_graph(emb, cfg));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildGraph)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNSquared);

void BM_GcnForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  num::Matrix emb = random_embeddings(n, 32, 5);
  assess::GraphConfig cfg;
  cfg.sigma = 0.5;
  assess::RelationGraph graph = assess::build_graph(emb, cfg);
  RngStream rng(6);
  assess::AssessorWeights w = assess::init_assessor(32, 64, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assess::gcn_forward(emb, graph, w));
  }
}
BENCHMARK(BM_GcnForward)->RangeMultiplier(2)->Range(32, 512);

void BM_KendallFast(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  RngStream rng(7);
  std::vector<double> a(n), b(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform();
    b[i] = rng.uniform();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::kendall_tau(a, b));
  }
  state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(BM_KendallFast)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

void BM_KendallBruteForce(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  RngStream rng(8);
  std::vector<double> a(n), b(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform();
    b[i] = rng.uniform();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::kendall_tau_bruteforce(a, b));
  }
  state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(BM_KendallBruteForce)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oNSquared);

void BM_TrainStep(benchmark::State& state) {
  data::ArchDataset ds =
      data::build_dataset(256, 64, 11, space::SpaceParams{}, data::OracleParams{});
  train::ModelParams params;
  embed::PretrainConfig pre;
  pre.epochs = 0;
  pre.seed = 12;
  auto [enc, dec] = embed::pretrain(ds, pre);
  params.enc = std::move(enc);
  params.dec = std::move(dec);
  RngStream rng(13);
  params.gcn = assess::init_assessor(32, 64, rng);

  train::BatchData batch;
  std::vector<int> rows = ds.labeled_idx;
  rows.insert(rows.end(), ds.unlabeled_idx.begin(), ds.unlabeled_idx.end());
  batch.features = num::gather_rows(ds.features, rows);
  batch.n_labeled = ds.n_labeled();
  batch.labels = ds.labeled_values();

  train::PipelineOptions opts;
  opts.graph.sigma = 0.15;
  for (auto _ : state) {
    train::ModelParams grads = params.zeros_like();
    benchmark::DoNotOptimize(train::combined_loss(batch, params, opts, &grads));
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace

BENCHMARK_MAIN();
