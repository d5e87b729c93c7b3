#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "iotnames/random.hpp"

namespace iotnames::test {

Tally tally(std::span<const Label> predictions, std::span<const Label> truth) {
  Tally t;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predictions[i] == Label::Positive ? 1 : 0;
    const int y = truth[i] == Label::Positive ? 1 : 0;
    t.tp += static_cast<std::size_t>(p & y);
    t.tn += static_cast<std::size_t>((1 - p) & (1 - y));
    t.fp += static_cast<std::size_t>(p & (1 - y));
    t.fn += static_cast<std::size_t>((1 - p) & y);
  }
  return t;
}

double mann_whitney_auc(std::span<const double> scores, std::span<const Label> truth) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] != Label::Positive) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j] != Label::Negative) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

CbowNumericGradient cbow_numeric_gradient(const EmbeddingModel& model, const CbowExample& example,
                                          std::size_t input_id, std::size_t output_id, double h) {
  CbowNumericGradient out;
  EmbeddingModel probe = model;
  const std::size_t dim = model.dim();
  for (std::size_t d = 0; d < dim; ++d) {
    auto in = probe.input_vector(input_id);
    const double keep = in[d];
    in[d] = keep + h;
    const double up = cbow_loss(probe, example);
    in[d] = keep - h;
    const double down = cbow_loss(probe, example);
    in[d] = keep;
    out.input.push_back((up - down) / (2 * h));
  }
  for (std::size_t d = 0; d < dim; ++d) {
    auto o = probe.output_vector(output_id);
    const double keep = o[d];
    o[d] = keep + h;
    const double up = cbow_loss(probe, example);
    o[d] = keep - h;
    const double down = cbow_loss(probe, example);
    o[d] = keep;
    out.output.push_back((up - down) / (2 * h));
  }
  return out;
}

double reference_quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double w = pos - std::floor(pos);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

}  // namespace iotnames::test

namespace iotnames::test {

std::vector<std::vector<std::string>> cooccurrence_corpus(std::uint64_t seed, std::size_t sentences,
                                                          std::size_t window) {
  Rng rng(seed);
  const std::size_t length = 12;
  std::vector<std::vector<std::string>> corpus;
  for (std::size_t s = 0; s < sentences; ++s) {
    // A at a, B at a+1, C beyond the window of both. Positions nearer to C
    // draw fillers from their own pool, so C never shares a context with A.
    const std::size_t a = rng.uniform_index(length - window - 2);
    const std::size_t c = a + window + 2 + rng.uniform_index(length - (a + window + 2));
    std::vector<std::string> sentence(length);
    for (std::size_t p = 0; p < length; ++p) {
      const std::size_t to_c = p > c ? p - c : c - p;
      const std::size_t to_b = p > a + 1 ? p - a - 1 : a + 1 - p;
      sentence[p] = (to_c < to_b ? "g" : "f") + std::to_string(rng.uniform_index(10));
    }
    sentence[a] = "A";
    sentence[a + 1] = "B";
    sentence[c] = "C";
    corpus.push_back(std::move(sentence));
  }
  return corpus;
}

EmbeddingConfig cooccurrence_config(std::uint64_t seed) {
  EmbeddingConfig config;
  config.pad_to = 12;
  config.epochs = 10;
  config.seed = seed;
  return config;
}

}  // namespace iotnames::test

namespace iotnames::test {

FeatureMatrix two_gaussians(std::size_t per_class, std::size_t dims, std::size_t signal_dims, double separation,
                            std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m(2 * per_class, dims);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const bool positive = r % 2 == 0;
    m.labels[r] = positive ? Label::Positive : Label::Negative;
    auto row = m.row(r);
    for (std::size_t c = 0; c < dims; ++c) {
      row[c] = rng.normal();
      if (c < signal_dims) row[c] += positive ? separation / 2 : -separation / 2;
    }
  }
  return m;
}

double accuracy_of(const TrainedClassifier& model, const FeatureMatrix& m) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < m.rows; ++r) correct += model.predict(m.row(r)) == m.labels[r];
  return static_cast<double>(correct) / static_cast<double>(m.rows);
}

}  // namespace iotnames::test
