#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iotnames_cli/output.hpp"
#include "iotnames_cli/pipeline_config.hpp"

namespace iotnames::cli {

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> config;
  std::filesystem::path output_dir = ".";
  bool quiet = false;
};

struct Context {
  const CommonOptions& common;
  std::ostream& out;
  Log log;

  /// --seed, else the config's seed, else 0.
  std::uint64_t seed() const;
  /// Settings from --config, or defaults when it is absent.
  PipelineConfig settings() const;
  OutputDir output_dir() const { return OutputDir(common.output_dir); }
};

/// Hyperparameter flags; only the ones given override the config.
struct ModelFlags {
  std::optional<std::string> algorithm;
  std::optional<double> l2;
  std::optional<std::size_t> max_iters;
  std::optional<double> tolerance;
  std::optional<std::size_t> neighbors;
  std::optional<std::size_t> svm_epochs;
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> min_samples_split;
  std::optional<std::size_t> trees;
  std::optional<std::size_t> features_per_split;
  bool no_bootstrap = false;
  std::optional<std::size_t> threads;

  ModelSpec apply(ModelSpec spec) const;
};

struct EmbedFlags {
  std::optional<std::size_t> dim;
  std::optional<std::size_t> window;
  std::optional<std::size_t> pad_to;
  std::optional<std::size_t> negatives;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> min_count;

  EmbeddingConfig apply(EmbeddingConfig config) const;
};

struct SanitizeOptions {
  std::filesystem::path input;
  std::optional<std::string> accepted;
  std::string report = "discarded.csv";
};

struct ProbeOptionsCli {
  std::filesystem::path input;
  std::string server;
  std::size_t timeout_ms = 3000;
  std::size_t retries = 2;
  std::size_t max_inflight = 64;
  std::string output = "probe.csv";
};

struct ExtractOptions {
  std::filesystem::path pcap;
  std::filesystem::path devices;
};

struct PrepareOptions {
  std::filesystem::path positive;
  std::vector<std::filesystem::path> negatives;
  std::string mode = "top";
  std::size_t n = 1415;
  std::string output = "dataset.csv";
};

struct FixturesOptions {
  std::string kind;
  std::size_t n = 1415;
  std::optional<std::string> output;
};

struct StatsOptions {
  std::filesystem::path input;
  std::size_t top = 10;
  std::string output = "stats.csv";
};

struct EmbedOptions {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::filesystem::path> dataset;
  EmbedFlags flags;
  std::string output = "embedding.txt";
};

struct VectorizeOptions {
  std::filesystem::path embedding;
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> dataset;
  std::string output = "vectors.bin";
};

/// Dataset + embedding inputs shared by train, evaluate, cv and ablate.
struct ExperimentInputs {
  std::filesystem::path dataset;
  std::filesystem::path embedding;
  std::optional<double> train_fraction;
};

struct TrainOptions {
  ExperimentInputs inputs;
  ModelFlags model;
  bool whole = false;
  std::string output = "model.txt";
};

struct EvaluateOptions {
  ExperimentInputs inputs;
  std::filesystem::path model;
  bool whole = false;
};

struct CvOptions {
  ExperimentInputs inputs;
  ModelFlags model;
  std::optional<std::size_t> k;
};

struct AblateOptions {
  ExperimentInputs inputs;
  ModelFlags model;
  std::vector<std::size_t> positions;
};

void run_sanitize(const Context& ctx, const SanitizeOptions& opt);
void run_probe(const Context& ctx, const ProbeOptionsCli& opt);
void run_extract(const Context& ctx, const ExtractOptions& opt);
void run_prepare(const Context& ctx, const PrepareOptions& opt);
void run_fixtures(const Context& ctx, const FixturesOptions& opt);
void run_stats(const Context& ctx, const StatsOptions& opt);
void run_embed(const Context& ctx, const EmbedOptions& opt);
void run_vectorize(const Context& ctx, const VectorizeOptions& opt);
void run_train(const Context& ctx, const TrainOptions& opt);
void run_evaluate(const Context& ctx, const EvaluateOptions& opt);
void run_cv(const Context& ctx, const CvOptions& opt);
void run_ablate(const Context& ctx, const AblateOptions& opt);
void run_pipeline_command(const Context& ctx);

}  // namespace iotnames::cli
