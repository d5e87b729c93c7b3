#include <benchmark/benchmark.h>

#include "iotnames/classify.hpp"
#include "iotnames/corpus.hpp"
#include "iotnames/embedding.hpp"
#include "iotnames/eval.hpp"
#include "iotnames/random.hpp"

namespace {

using namespace iotnames;

LabeledDataset fixture_dataset(std::size_t n) {
  return make_dataset(generate_fixtures(FixtureKind::IotLike, n, 1), generate_fixtures(FixtureKind::ToplistLike, n, 2),
                      0);
}

std::vector<DomainName> names_of(const LabeledDataset& d) {
  std::vector<DomainName> out;
  for (const auto& e : d.entries) out.push_back(e.name);
  return out;
}

void BM_TrainCbow(benchmark::State& state) {
  const auto names = names_of(fixture_dataset(static_cast<std::size_t>(state.range(0))));
  EmbeddingConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_cbow(std::span<const DomainName>(names), config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(names.size()));
}
BENCHMARK(BM_TrainCbow)->Arg(250)->Arg(1415)->Unit(benchmark::kMillisecond);

void BM_Vectorize(benchmark::State& state) {
  const auto dataset = fixture_dataset(1415);
  const auto names = names_of(dataset);
  const auto model = train_cbow(std::span<const DomainName>(names), EmbeddingConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(vectorize_dataset(dataset, model));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dataset.size()));
}
BENCHMARK(BM_Vectorize)->Unit(benchmark::kMillisecond);

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols) {
  Rng rng(5);
  FeatureMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const bool positive = r % 2 == 0;
    m.labels[r] = positive ? Label::Positive : Label::Negative;
    for (auto& v : m.row(r)) v = rng.normal() + (positive ? 0.3 : -0.3);
  }
  return m;
}

void BM_Fit(benchmark::State& state) {
  const auto m = random_matrix(1000, 1280);
  ModelSpec spec;
  spec.algorithm = static_cast<Algorithm>(state.range(0));
  spec.rf.trees = 20;
  state.SetLabel(std::string(to_string(spec.algorithm)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, m));
}
BENCHMARK(BM_Fit)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  Rng rng(8);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<Label> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform_real();
    truth[i] = i % 2 ? Label::Positive : Label::Negative;
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, truth));
}
BENCHMARK(BM_RocAuc)->Arg(566)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
