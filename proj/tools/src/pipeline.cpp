#include "iotnames_cli/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "iotnames/classify.hpp"
#include "iotnames/csv.hpp"
#include "iotnames/error.hpp"
#include "iotnames/random.hpp"

namespace iotnames::cli {
namespace {

std::vector<DomainName> names_of(const LabeledDataset& dataset) {
  std::vector<DomainName> out;
  out.reserve(dataset.size());
  for (const auto& e : dataset.entries) out.push_back(e.name);
  return out;
}

EmbeddingConfig seeded_embedding(const PipelineConfig& config, std::uint64_t seed) {
  auto e = config.embedding;
  e.seed = seed;
  return e;
}

std::string summary_line(std::string_view what, const EvalReport& report) {
  return std::string(what) + ": accuracy " + format_metric(report.metrics.accuracy);
}

void run_random_picks(const PipelineConfig& config, const SourceLists& sources, std::uint64_t seed,
                      const OutputDir& out, const Log& log) {
  if (config.eval != EvalMode::Holdout) {
    throw InputError("select.mode = random supports eval.mode = holdout only");
  }
  std::optional<EmbeddingModel> shared;
  if (config.reuse_embedding) {
    log.info("training shared embedding on " +
             std::to_string(sources.positive.size() + sources.negative_pool.size()) + " names");
    shared = train_pool_embedding(sources, config, stage_seeds(seed).embedding);
    out.write("embedding.txt", [&](std::ostream& o) { shared->save(o); });
  }

  const auto algo = to_string(config.model.algorithm);
  std::vector<EvalReport> reports;
  for (std::size_t pick = 0; pick < config.repeats; ++pick) {
    const auto ex = prepare_experiment(config, sources, seed, pick, shared ? &*shared : nullptr);
    const auto model = fit(seeded(config.model, pick_seeds(seed, pick).model), ex.train);
    reports.push_back(evaluate(model, ex.test));
    log.info(summary_line("pick " + std::to_string(pick + 1) + "/" + std::to_string(config.repeats), reports.back()));
  }

  out.write("picks.csv", [&](std::ostream& o) {
    o << "pick,model," << kMetricColumns << '\n';
    std::vector<std::optional<double>> acc, prec, rec, f1, auc;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      o << i + 1 << ',' << algo << ',' << metric_cells(r) << '\n';
      acc.push_back(r.metrics.accuracy);
      prec.push_back(r.metrics.precision);
      rec.push_back(r.metrics.recall);
      f1.push_back(r.metrics.f1);
      auc.push_back(r.roc.points.empty() ? std::nullopt : std::optional<double>(r.roc.auc));
    }
    const MetricSummary s[] = {summarize_metric(acc), summarize_metric(prec), summarize_metric(rec),
                               summarize_metric(f1), summarize_metric(auc)};
    o << "mean," << algo;
    for (const auto& m : s) o << ',' << format_metric(m.mean);
    o << "\nstd," << algo;
    for (const auto& m : s) o << ',' << format_metric(m.std);
    o << '\n';
  });
}

}  // namespace

SourceLists load_sources(const PipelineConfig& config) {
  auto positive = load_list(config.positive, config.positive.filename().string(), NameClass::IotM2M).list;
  SourceLists sources{std::move(positive), {}, NameList("other", NameClass::Other), 0};
  for (const auto& path : config.negatives) {
    auto loaded = load_list(path, path.filename().string(), NameClass::Other).list;
    auto cleaned = remove_commons(sources.positive, loaded);
    sources.commons_removed += cleaned.removed;
    for (const auto& name : cleaned.list) sources.negative_pool.add(name);
    sources.negatives.push_back(std::move(cleaned.list));
  }
  return sources;
}

LabeledDataset select_dataset(const SourceLists& sources, const PipelineConfig& config,
                              std::uint64_t selection_seed) {
  if (sources.positive.size() < config.n) {
    throw InputError("select.n = " + std::to_string(config.n) + " exceeds the " +
                     std::to_string(sources.positive.size()) + " names of " + config.positive.string());
  }
  if (config.selection != SelectionMode::Mix && sources.negative_pool.size() < config.n) {
    throw InputError("select.n = " + std::to_string(config.n) + " exceeds the " +
                     std::to_string(sources.negative_pool.size()) + " names of the other class");
  }
  const auto positive = select_top(sources.positive, config.n);
  const NameList negative = [&] {
    switch (config.selection) {
      case SelectionMode::Top: return select_top(sources.negative_pool, config.n);
      case SelectionMode::Random: return select_random(sources.negative_pool, config.n, selection_seed);
      case SelectionMode::Mix: return make_mix(sources.negatives, config.n, selection_seed);
    }
    return select_top(sources.negative_pool, config.n);
  }();
  return make_dataset(positive, negative, selection_seed);
}

EmbeddingModel train_pool_embedding(const SourceLists& sources, const PipelineConfig& config,
                                    std::uint64_t seed) {
  std::vector<DomainName> names(sources.positive.begin(), sources.positive.end());
  names.insert(names.end(), sources.negative_pool.begin(), sources.negative_pool.end());
  return train_cbow(std::span<const DomainName>(names), seeded_embedding(config, seed));
}

StageSeeds pick_seeds(std::uint64_t seed, std::size_t pick) {
  const auto base = stage_seeds(seed);
  return {derive_seed(base.dataset, pick), derive_seed(base.selection, pick), derive_seed(base.embedding, pick),
          derive_seed(base.split, pick),   derive_seed(base.folds, pick),     derive_seed(base.model, pick)};
}

Experiment prepare_experiment(const PipelineConfig& config, const SourceLists& sources, std::uint64_t seed,
                              std::size_t pick, const EmbeddingModel* shared) {
  const auto seeds = pick_seeds(seed, pick);
  auto dataset = select_dataset(sources, config, seeds.selection);
  dataset.seed = seeds.dataset;

  const auto labels = dataset.labels();
  auto split = split_indices(labels, SplitPlan{config.train_fraction, seeds.split, true});

  auto embedding = [&]() -> EmbeddingModel {
    if (shared) return *shared;
    const auto names = names_of(config.embed_train_only ? subset(dataset, split.train) : dataset);
    return train_cbow(std::span<const DomainName>(names), seeded_embedding(config, seeds.embedding));
  }();

  auto features = vectorize_dataset(dataset, embedding);
  auto train = select_rows(features, split.train);
  auto test = select_rows(features, split.test);
  return Experiment{std::move(dataset), std::move(embedding), std::move(features),
                    std::move(split),   std::move(train),     std::move(test)};
}

std::vector<std::size_t> padding_positions(const LabeledDataset& dataset, const EmbeddingConfig& config) {
  std::size_t longest = 0;
  for (const auto& e : dataset.entries) longest = std::max(longest, e.name.label_count());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + longest < config.pad_to; ++i) out.push_back(i);
  return out;
}

void run_pipeline(const PipelineConfig& config, std::uint64_t seed, const OutputDir& out, const Log& log) {
  const auto sources = load_sources(config);
  log.info("loaded " + std::to_string(sources.positive.size()) + " iot-m2m and " +
           std::to_string(sources.negative_pool.size()) + " other names (" +
           std::to_string(sources.commons_removed) + " common names removed)");

  if (config.selection == SelectionMode::Random) {
    run_random_picks(config, sources, seed, out, log);
    return;
  }

  const auto ex = prepare_experiment(config, sources, seed);
  log.info("dataset of " + std::to_string(ex.dataset.size()) + " names, vocabulary of " +
           std::to_string(ex.embedding.vocabulary().size()) + " labels");
  out.write("dataset.csv", [&](std::ostream& o) { write_dataset_csv(o, ex.dataset); });
  out.write("embedding.txt", [&](std::ostream& o) { ex.embedding.save(o); });

  const auto seeds = pick_seeds(seed, 0);
  const auto spec = seeded(config.model, seeds.model);
  const auto algo = to_string(spec.algorithm);

  if (config.eval == EvalMode::Cv) {
    const auto cv = cross_validate(spec, ex.features, FoldPlan{config.k, seeds.folds});
    write_cv_report(out, algo, cv);
    log.info("cv accuracy mean " + format_metric(cv.accuracy.mean) + ", std " + format_metric(cv.accuracy.std));
    return;
  }

  const auto model = fit(spec, ex.train);
  out.write("model.txt", [&](std::ostream& o) { model.save(o); });
  const auto report = evaluate(model, ex.test);
  log.info(summary_line(std::string(algo) + " holdout", report));

  if (config.eval == EvalMode::Holdout) {
    write_holdout_report(out, algo, report);
    return;
  }
  const auto padding = padding_positions(ex.dataset, config.embedding);
  const auto ablation = ablate(spec, ex.train, ex.test, config.embedding);
  write_ablation_report(out, algo, report, ablation, padding);
  log.info("ablated " + std::to_string(ablation.per_position.size()) + " positions");
}

}  // namespace iotnames::cli
