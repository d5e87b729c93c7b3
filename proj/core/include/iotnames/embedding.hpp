#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "iotnames/corpus.hpp"
#include "iotnames/features.hpp"
#include "iotnames/names.hpp"
#include "iotnames/random.hpp"

namespace iotnames {

/// Word2vec CBOW settings. Labels are the words and each padded name is a
/// sentence.
struct EmbeddingConfig {
  std::size_t vector_dim = 32;
  /// Context labels taken on each side of the center label.
  std::size_t window = 3;
  std::size_t pad_to = 40;
  std::string pad_token = "*";
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double initial_learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// `pad_to - label_count` pad tokens followed by the labels. Throws
/// InputError when the name has more than `pad_to` labels.
std::vector<std::string> pad_name(const DomainName& name, const EmbeddingConfig& config);

class Vocabulary {
 public:
  std::size_t size() const noexcept { return words_.size(); }
  const std::string& word(std::size_t index) const { return words_.at(index); }
  std::size_t count(std::size_t index) const { return counts_.at(index); }
  std::optional<std::size_t> find(std::string_view word) const;

  /// Appends a word; returns its index. Duplicates are rejected.
  std::size_t add(std::string word, std::size_t count);

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Noise distribution for negative sampling: P(w) proportional to
/// count(w)^0.75, with the pad token excluded.
class UnigramTable {
 public:
  UnigramTable() = default;
  UnigramTable(const Vocabulary& vocab, std::optional<std::size_t> excluded);

  bool empty() const noexcept { return cumulative_.empty() || cumulative_.back() <= 0.0; }
  double probability(std::size_t index) const;
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
};

struct VocabBuild {
  Vocabulary vocabulary;
  UnigramTable unigrams;
};

/// Pad token first, then words with count >= min_count by descending count
/// and ascending text.
VocabBuild build_vocab(std::span<const std::vector<std::string>> corpus, const EmbeddingConfig& config);

class EmbeddingModel {
 public:
  /// Input vectors uniform in [-0.5/dim, 0.5/dim], output vectors zero.
  static EmbeddingModel initialize(Vocabulary vocabulary, const EmbeddingConfig& config);

  const EmbeddingConfig& config() const noexcept { return config_; }
  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
  std::size_t dim() const noexcept { return config_.vector_dim; }

  std::span<const double> input_vector(std::size_t index) const;
  std::span<const double> output_vector(std::size_t index) const;
  std::span<double> input_vector(std::size_t index);
  std::span<double> output_vector(std::size_t index);

  /// Word vector of `label`, or nullopt when out of vocabulary.
  std::optional<std::span<const double>> lookup(std::string_view label) const;

  /// Mean CBOW loss of each training epoch.
  const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }
  void record_epoch_loss(double loss) { epoch_losses_.push_back(loss); }

  /// Text format: "dim window pad_to vocab_size seed", then one line per word
  /// with the token and its input vector at 17 significant digits.
  void save(std::ostream& out) const;
  static EmbeddingModel load(std::istream& in);

  bool operator==(const EmbeddingModel& other) const;

 private:
  EmbeddingConfig config_;
  Vocabulary vocabulary_;
  std::vector<double> input_;
  std::vector<double> output_;
  std::vector<double> epoch_losses_;
};

/// One CBOW training example: context word ids, the center word, and the
/// sampled noise words.
struct CbowExample {
  std::vector<std::size_t> context;
  std::size_t target = 0;
  std::vector<std::size_t> negatives;
};

/// Loss and gradient of one example. The context representation is the mean
/// of the context input vectors; the loss is
///   -log s(u_target . h) - sum_k log s(-u_k . h).
/// Gradients are accumulated per distinct word id.
struct CbowGradient {
  double loss = 0.0;
  std::vector<std::size_t> input_ids;
  std::vector<double> input_grads;
  std::vector<std::size_t> output_ids;
  std::vector<double> output_grads;
};

double cbow_loss(const EmbeddingModel& model, const CbowExample& example);
void cbow_gradient(const EmbeddingModel& model, const CbowExample& example, CbowGradient& out);

/// Moves every touched vector by -learning_rate * gradient.
void apply_gradient(EmbeddingModel& model, const CbowGradient& gradient, double learning_rate);

/// Trains on already-padded sentences. Single-threaded and bitwise
/// deterministic for a given config.seed.
EmbeddingModel train_cbow(std::span<const std::vector<std::string>> corpus, const EmbeddingConfig& config);

/// Pads each name and trains on the result.
EmbeddingModel train_cbow(std::span<const DomainName> names, const EmbeddingConfig& config);

/// pad_to x vector_dim matrix; row i holds the vector of padded label i,
/// zeros for out-of-vocabulary labels.
struct NameVector {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

NameVector vectorize(const DomainName& name, const EmbeddingModel& model);

/// Writes the flattened vector of `name` into `out` (pad_to * dim values).
void vectorize_into(const DomainName& name, const EmbeddingModel& model, std::span<double> out);

FeatureMatrix vectorize_dataset(const LabeledDataset& dataset, const EmbeddingModel& model);

/// Padded sentences of every name in `dataset`.
std::vector<std::vector<std::string>> padded_corpus(const LabeledDataset& dataset, const EmbeddingConfig& config);

}  // namespace iotnames
