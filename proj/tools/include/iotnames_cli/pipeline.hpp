#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "iotnames/corpus.hpp"
#include "iotnames/embedding.hpp"
#include "iotnames/eval.hpp"
#include "iotnames/features.hpp"
#include "iotnames_cli/output.hpp"
#include "iotnames_cli/pipeline_config.hpp"

namespace iotnames::cli {

/// Input lists after commons removal. `negative_pool` is the negatives
/// concatenated in argument order.
struct SourceLists {
  NameList positive;
  std::vector<NameList> negatives;
  NameList negative_pool;
  std::size_t commons_removed = 0;
};

SourceLists load_sources(const PipelineConfig& config);

/// Positives are always the top n; the selection mode applies to the other
/// class. `selection_seed` only matters for random and mix.
LabeledDataset select_dataset(const SourceLists& sources, const PipelineConfig& config,
                              std::uint64_t selection_seed);

/// Embedding trained on every name of every source list.
EmbeddingModel train_pool_embedding(const SourceLists& sources, const PipelineConfig& config,
                                    std::uint64_t seed);

struct Experiment {
  LabeledDataset dataset;
  EmbeddingModel embedding;
  FeatureMatrix features;
  IndexSplit split;
  FeatureMatrix train;
  FeatureMatrix test;
};

/// Seeds for pick `pick` of a run with master seed `seed`.
StageSeeds pick_seeds(std::uint64_t seed, std::size_t pick);

/// Selection, labeling, embedding, vectorization and the holdout split for
/// one pick. A non-null `shared` embedding is used instead of training one.
Experiment prepare_experiment(const PipelineConfig& config, const SourceLists& sources, std::uint64_t seed,
                              std::size_t pick = 0, const EmbeddingModel* shared = nullptr);

/// Label positions that hold the pad token for every name in `dataset`.
std::vector<std::size_t> padding_positions(const LabeledDataset& dataset, const EmbeddingConfig& config);

/// Runs the configured experiment and writes its result files into `out`.
void run_pipeline(const PipelineConfig& config, std::uint64_t seed, const OutputDir& out, const Log& log);

}  // namespace iotnames::cli
