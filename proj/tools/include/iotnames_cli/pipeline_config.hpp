#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iotnames/classify.hpp"
#include "iotnames/embedding.hpp"

namespace iotnames::cli {

enum class SelectionMode { Top, Random, Mix };
enum class EvalMode { Holdout, Cv, Ablation };

std::string_view to_string(SelectionMode mode) noexcept;
std::string_view to_string(EvalMode mode) noexcept;
SelectionMode parse_selection_mode(std::string_view text);
EvalMode parse_eval_mode(std::string_view text);

/// Everything one `pipeline` run needs. Paths are absolute once loaded.
struct PipelineConfig {
  std::filesystem::path positive;
  std::vector<std::filesystem::path> negatives;

  SelectionMode selection = SelectionMode::Top;
  std::size_t n = 1415;
  /// Number of random picks; only used with SelectionMode::Random.
  std::size_t repeats = 20;
  /// Train one embedding on every listed name and share it across picks.
  bool reuse_embedding = false;

  EmbeddingConfig embedding;
  /// Train the embedding on the training split only instead of the whole
  /// combined list.
  bool embed_train_only = false;

  ModelSpec model;

  EvalMode eval = EvalMode::Holdout;
  double train_fraction = 0.8;
  std::size_t k = 5;

  std::optional<std::uint64_t> seed;
};

/// Flat `key = value` text; '#' starts a comment. Relative paths resolve
/// against `base_dir`. Unknown keys are errors.
PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir);

/// Same keys, without requiring the list keys. Used by the single-stage
/// subcommands to pick up embedding, model and evaluation settings.
PipelineConfig parse_config_settings(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config_settings(const std::filesystem::path& path);

/// Reads and parses a config file, then checks that the listed files exist.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Keys accepted by parse_pipeline_config(), with a one-line description each.
const std::map<std::string, std::string>& pipeline_config_keys();

/// Seeds for each randomized stage, all derived from the master seed.
struct StageSeeds {
  std::uint64_t dataset;
  std::uint64_t selection;
  std::uint64_t embedding;
  std::uint64_t split;
  std::uint64_t folds;
  std::uint64_t model;
};
StageSeeds stage_seeds(std::uint64_t seed);

/// Copies the model seed into the algorithm parameters that take one.
ModelSpec seeded(ModelSpec spec, std::uint64_t model_seed);

}  // namespace iotnames::cli
