#include "iotnames/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "iotnames/error.hpp"

namespace iotnames {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string format_coordinate(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Index of `id` in `ids`, appending a zeroed gradient slot when absent.
std::size_t slot_for(std::vector<std::size_t>& ids, std::vector<double>& grads, std::size_t id, std::size_t dim) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  ids.push_back(id);
  grads.resize(grads.size() + dim, 0.0);
  return ids.size() - 1;
}

void context_mean(const EmbeddingModel& model, const CbowExample& ex, std::vector<double>& h) {
  const std::size_t dim = model.dim();
  h.assign(dim, 0.0);
  for (auto c : ex.context) {
    auto v = model.input_vector(c);
    for (std::size_t d = 0; d < dim; ++d) h[d] += v[d];
  }
  const double inv = 1.0 / static_cast<double>(ex.context.size());
  for (auto& x : h) x *= inv;
}

}  // namespace

void EmbeddingConfig::validate() const {
  if (vector_dim < 1) throw InputError("embedding dimension must be at least 1");
  if (window < 1) throw InputError("window must be at least 1");
  if (pad_to < 1) throw InputError("pad_to must be at least 1");
  if (pad_token.empty()) throw InputError("pad token must not be empty");
  if (!(initial_learning_rate > 0.0) || !(min_learning_rate > 0.0) || min_learning_rate > initial_learning_rate) {
    throw InputError("learning rates must be positive with min <= initial");
  }
  if (min_count < 1) throw InputError("min_count must be at least 1");
}

std::vector<std::string> pad_name(const DomainName& name, const EmbeddingConfig& config) {
  const auto& labels = name.labels();
  if (labels.size() > config.pad_to) {
    throw InputError("'" + name.text() + "' has " + std::to_string(labels.size()) + " labels, more than pad_to=" +
                     std::to_string(config.pad_to));
  }
  std::vector<std::string> out(config.pad_to - labels.size(), config.pad_token);
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::add(std::string word, std::size_t count) {
  if (index_.contains(word)) throw InputError("duplicate vocabulary word '" + word + "'");
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  counts_.push_back(count);
  return words_.size() - 1;
}

UnigramTable::UnigramTable(const Vocabulary& vocab, std::optional<std::size_t> excluded) {
  cumulative_.resize(vocab.size());
  double running = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (i != excluded) running += std::pow(static_cast<double>(vocab.count(i)), 0.75);
    cumulative_[i] = running;
  }
}

double UnigramTable::probability(std::size_t index) const {
  if (empty()) return 0.0;
  const double prev = index == 0 ? 0.0 : cumulative_[index - 1];
  return (cumulative_.at(index) - prev) / cumulative_.back();
}

std::size_t UnigramTable::sample(Rng& rng) const {
  if (empty()) throw InputError("no words available for negative sampling");
  const double u = rng.uniform_real() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

VocabBuild build_vocab(std::span<const std::vector<std::string>> corpus, const EmbeddingConfig& config) {
  config.validate();
  if (corpus.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& word : sentence) ++counts[word];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [word, count] : counts) {
    if (word != config.pad_token && count >= config.min_count) ranked.emplace_back(word, count);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  VocabBuild build;
  const auto pad_count = counts.contains(config.pad_token) ? counts[config.pad_token] : 0;
  const auto pad_index = build.vocabulary.add(config.pad_token, pad_count);
  for (auto& [word, count] : ranked) build.vocabulary.add(word, count);
  build.unigrams = UnigramTable(build.vocabulary, pad_index);
  return build;
}

EmbeddingModel EmbeddingModel::initialize(Vocabulary vocabulary, const EmbeddingConfig& config) {
  config.validate();
  if (vocabulary.size() == 0) throw InputError("vocabulary is empty");
  EmbeddingModel m;
  m.config_ = config;
  m.vocabulary_ = std::move(vocabulary);
  const std::size_t dim = config.vector_dim;
  m.input_.resize(m.vocabulary_.size() * dim);
  m.output_.assign(m.vocabulary_.size() * dim, 0.0);
  Rng rng(config.seed);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& x : m.input_) x = rng.uniform_real(-half, half);
  return m;
}

std::span<const double> EmbeddingModel::input_vector(std::size_t index) const {
  return std::span<const double>(input_).subspan(index * dim(), dim());
}
std::span<const double> EmbeddingModel::output_vector(std::size_t index) const {
  return std::span<const double>(output_).subspan(index * dim(), dim());
}
std::span<double> EmbeddingModel::input_vector(std::size_t index) {
  return std::span<double>(input_).subspan(index * dim(), dim());
}
std::span<double> EmbeddingModel::output_vector(std::size_t index) {
  return std::span<double>(output_).subspan(index * dim(), dim());
}

std::optional<std::span<const double>> EmbeddingModel::lookup(std::string_view label) const {
  auto idx = vocabulary_.find(label);
  if (!idx) return std::nullopt;
  return input_vector(*idx);
}

bool EmbeddingModel::operator==(const EmbeddingModel& other) const {
  if (vocabulary_.size() != other.vocabulary_.size()) return false;
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (vocabulary_.word(i) != other.vocabulary_.word(i)) return false;
  }
  return input_ == other.input_ && output_ == other.output_;
}

void EmbeddingModel::save(std::ostream& out) const {
  out << config_.vector_dim << ' ' << config_.window << ' ' << config_.pad_to << ' ' << vocabulary_.size() << ' '
      << config_.seed << '\n';
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    out << vocabulary_.word(i);
    for (double v : input_vector(i)) out << ' ' << format_coordinate(v);
    out << '\n';
  }
}

EmbeddingModel EmbeddingModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("embedding file is empty");
  std::istringstream header(line);
  EmbeddingConfig config;
  std::size_t vocab_size = 0;
  if (!(header >> config.vector_dim >> config.window >> config.pad_to >> vocab_size >> config.seed)) {
    throw InputError("malformed embedding header");
  }
  config.validate();

  EmbeddingModel m;
  m.config_ = config;
  const std::size_t dim = config.vector_dim;
  m.input_.reserve(vocab_size * dim);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    if (!std::getline(in, line)) throw InputError("embedding file truncated at word " + std::to_string(i));
    // The token is everything before the last `dim` fields.
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (std::size_t d = 0; d < dim; ++d) {
      auto space = rest.rfind(' ');
      if (space == std::string_view::npos) throw InputError("embedding line " + std::to_string(i + 2) + " too short");
      fields.push_back(rest.substr(space + 1));
      rest = rest.substr(0, space);
    }
    if (rest.empty()) throw InputError("embedding line " + std::to_string(i + 2) + " has no token");
    if (i == 0) m.config_.pad_token = std::string(rest);
    m.vocabulary_.add(std::string(rest), 0);
    for (auto it = fields.rbegin(); it != fields.rend(); ++it) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(it->data(), it->data() + it->size(), v);
      if (ec != std::errc{} || ptr != it->data() + it->size() || !std::isfinite(v)) {
        throw InputError("bad coordinate on embedding line " + std::to_string(i + 2));
      }
      m.input_.push_back(v);
    }
  }
  m.output_.assign(m.input_.size(), 0.0);
  return m;
}

double cbow_loss(const EmbeddingModel& model, const CbowExample& example) {
  std::vector<double> h;
  context_mean(model, example, h);
  double loss = -log_sigmoid(dot(model.output_vector(example.target), h));
  for (auto n : example.negatives) loss -= log_sigmoid(-dot(model.output_vector(n), h));
  return loss;
}

void cbow_gradient(const EmbeddingModel& model, const CbowExample& example, CbowGradient& out) {
  if (example.context.empty()) throw InputError("CBOW example without context");
  const std::size_t dim = model.dim();
  out.loss = 0.0;
  out.input_ids.clear();
  out.input_grads.clear();
  out.output_ids.clear();
  out.output_grads.clear();

  std::vector<double> h;
  context_mean(model, example, h);
  std::vector<double> grad_h(dim, 0.0);

  auto accumulate = [&](std::size_t word, double label) {
    auto u = model.output_vector(word);
    const double score = dot(u, h);
    out.loss -= label > 0.5 ? log_sigmoid(score) : log_sigmoid(-score);
    const double g = sigmoid(score) - label;
    const std::size_t slot = slot_for(out.output_ids, out.output_grads, word, dim);
    double* gu = out.output_grads.data() + slot * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      gu[d] += g * h[d];
      grad_h[d] += g * u[d];
    }
  };
  accumulate(example.target, 1.0);
  for (auto n : example.negatives) accumulate(n, 0.0);

  const double inv = 1.0 / static_cast<double>(example.context.size());
  for (auto c : example.context) {
    const std::size_t slot = slot_for(out.input_ids, out.input_grads, c, dim);
    double* gv = out.input_grads.data() + slot * dim;
    for (std::size_t d = 0; d < dim; ++d) gv[d] += grad_h[d] * inv;
  }
}

void apply_gradient(EmbeddingModel& model, const CbowGradient& gradient, double learning_rate) {
  const std::size_t dim = model.dim();
  for (std::size_t i = 0; i < gradient.output_ids.size(); ++i) {
    auto u = model.output_vector(gradient.output_ids[i]);
    for (std::size_t d = 0; d < dim; ++d) u[d] -= learning_rate * gradient.output_grads[i * dim + d];
  }
  for (std::size_t i = 0; i < gradient.input_ids.size(); ++i) {
    auto v = model.input_vector(gradient.input_ids[i]);
    for (std::size_t d = 0; d < dim; ++d) v[d] -= learning_rate * gradient.input_grads[i * dim + d];
  }
}

EmbeddingModel train_cbow(std::span<const std::vector<std::string>> corpus, const EmbeddingConfig& config) {
  auto build = build_vocab(corpus, config);
  if (build.unigrams.empty() && config.negatives > 0) {
    throw InputError("corpus has no words besides the pad token");
  }
  auto model = EmbeddingModel::initialize(std::move(build.vocabulary), config);
  const auto& vocab = model.vocabulary();

  // Sentences as word ids; -1 marks words dropped by min_count.
  constexpr std::size_t kDropped = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> sentences;
  sentences.reserve(corpus.size());
  std::size_t positions = 0;
  for (const auto& sentence : corpus) {
    std::vector<std::size_t> ids;
    ids.reserve(sentence.size());
    for (const auto& w : sentence) ids.push_back(vocab.find(w).value_or(kDropped));
    positions += ids.size();
    sentences.push_back(std::move(ids));
  }

  Rng rng(derive_seed(config.seed, 1));
  const double total_steps = static_cast<double>(std::max<std::size_t>(positions * config.epochs, 1));
  const double lr_span = config.initial_learning_rate - config.min_learning_rate;
  std::size_t step = 0;
  CbowExample example;
  CbowGradient gradient;
  std::vector<std::size_t> order(sentences.size());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t examples = 0;
    for (auto s : order) {
      const auto& ids = sentences[s];
      for (std::size_t t = 0; t < ids.size(); ++t) {
        const double lr = std::max(config.min_learning_rate,
                                   config.initial_learning_rate - lr_span * static_cast<double>(step) / total_steps);
        ++step;
        if (ids[t] == kDropped) continue;
        example.target = ids[t];
        example.context.clear();
        const std::size_t lo = t >= config.window ? t - config.window : 0;
        const std::size_t hi = std::min(ids.size() - 1, t + config.window);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c != t && ids[c] != kDropped) example.context.push_back(ids[c]);
        }
        if (example.context.empty()) continue;
        example.negatives.clear();
        for (std::size_t k = 0; k < config.negatives; ++k) {
          auto n = build.unigrams.sample(rng);
          if (n != example.target) example.negatives.push_back(n);
        }
        cbow_gradient(model, example, gradient);
        apply_gradient(model, gradient, lr);
        epoch_loss += gradient.loss;
        ++examples;
      }
    }
    model.record_epoch_loss(examples ? epoch_loss / static_cast<double>(examples) : 0.0);
  }
  return model;
}

EmbeddingModel train_cbow(std::span<const DomainName> names, const EmbeddingConfig& config) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(names.size());
  for (const auto& name : names) corpus.push_back(pad_name(name, config));
  return train_cbow(corpus, config);
}

void vectorize_into(const DomainName& name, const EmbeddingModel& model, std::span<double> out) {
  const auto& config = model.config();
  const std::size_t dim = config.vector_dim;
  if (out.size() != config.pad_to * dim) throw InputError("vectorize: output span has the wrong size");
  const auto padded = pad_name(name, config);
  for (std::size_t r = 0; r < padded.size(); ++r) {
    auto dst = out.subspan(r * dim, dim);
    if (auto vec = model.lookup(padded[r])) {
      std::copy(vec->begin(), vec->end(), dst.begin());
    } else {
      std::fill(dst.begin(), dst.end(), 0.0);
    }
  }
}

NameVector vectorize(const DomainName& name, const EmbeddingModel& model) {
  NameVector v;
  v.rows = model.config().pad_to;
  v.cols = model.config().vector_dim;
  v.values.resize(v.rows * v.cols);
  vectorize_into(name, model, v.values);
  return v;
}

FeatureMatrix vectorize_dataset(const LabeledDataset& dataset, const EmbeddingModel& model) {
  FeatureMatrix m(dataset.size(), model.config().pad_to * model.config().vector_dim);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    vectorize_into(dataset.entries[i].name, model, m.row(i));
    m.labels[i] = dataset.entries[i].label;
  }
  return m;
}

std::vector<std::vector<std::string>> padded_corpus(const LabeledDataset& dataset, const EmbeddingConfig& config) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(dataset.size());
  for (const auto& e : dataset.entries) corpus.push_back(pad_name(e.name, config));
  return corpus;
}

}  // namespace iotnames
