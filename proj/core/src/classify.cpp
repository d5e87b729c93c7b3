#include "iotnames/classify.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numbers>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "iotnames/error.hpp"
#include "iotnames/random.hpp"
#include "serialize.hpp"

namespace iotnames {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sign_of(Label l) { return l == Label::Positive ? 1.0 : -1.0; }

void require_both_classes(const FeatureMatrix& data) {
  data.validate();
  if (data.rows == 0) throw InputError("training data is empty");
  if (data.count(Label::Positive) == 0 || data.count(Label::Negative) == 0) {
    throw InputError("training data must contain both classes");
  }
}

constexpr std::array<std::string_view, 6> kAlgorithmNames = {"nb", "lr", "knn", "svm", "dt", "rf"};

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  return kAlgorithmNames[static_cast<std::size_t>(algorithm)];
}

Algorithm parse_algorithm(std::string_view text) {
  for (std::size_t i = 0; i < kAlgorithmNames.size(); ++i) {
    if (kAlgorithmNames[i] == text) return static_cast<Algorithm>(i);
  }
  throw InputError("unknown model '" + std::string(text) + "' (expected nb|lr|knn|svm|dt|rf)");
}

// --- Gaussian naive Bayes ---------------------------------------------------

double GaussianNb::score(std::span<const double> x) const {
  std::array<double, 2> joint = log_prior;
  for (std::size_t c = 0; c < 2; ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = x[j] - mean[c][j];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * variance[c][j]) + d * d / (2.0 * variance[c][j]);
    }
    joint[c] += s;
  }
  return sigmoid(joint[1] - joint[0]);
}

TrainedClassifier fit_nb(const FeatureMatrix& data) {
  require_both_classes(data);
  GaussianNb nb;
  nb.dim = data.cols;
  std::array<std::size_t, 2> counts{};
  for (std::size_t c = 0; c < 2; ++c) {
    nb.mean[c].assign(data.cols, 0.0);
    nb.variance[c].assign(data.cols, 0.0);
  }
  for (std::size_t r = 0; r < data.rows; ++r) {
    const auto c = static_cast<std::size_t>(data.labels[r]);
    ++counts[c];
    auto row = data.row(r);
    for (std::size_t j = 0; j < data.cols; ++j) nb.mean[c][j] += row[j];
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& m : nb.mean[c]) m /= static_cast<double>(counts[c]);
  }
  for (std::size_t r = 0; r < data.rows; ++r) {
    const auto c = static_cast<std::size_t>(data.labels[r]);
    auto row = data.row(r);
    for (std::size_t j = 0; j < data.cols; ++j) {
      const double d = row[j] - nb.mean[c][j];
      nb.variance[c][j] += d * d;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& v : nb.variance[c]) v /= static_cast<double>(counts[c]);
  }
  // Overall feature variance sets the scale of the floor.
  double max_feature_var = 0.0;
  for (std::size_t j = 0; j < data.cols; ++j) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < data.rows; ++r) mean += data.values[r * data.cols + j];
    mean /= static_cast<double>(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) {
      const double d = data.values[r * data.cols + j] - mean;
      sq += d * d;
    }
    max_feature_var = std::max(max_feature_var, sq / static_cast<double>(data.rows));
  }
  const double floor = 1e-9 * (max_feature_var > 0.0 ? max_feature_var : 1.0);
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& v : nb.variance[c]) v = std::max(v, floor);
    nb.log_prior[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(data.rows));
  }
  return TrainedClassifier(std::move(nb), data.cols);
}

// --- logistic regression ----------------------------------------------------

double LogisticModel::score(std::span<const double> x) const { return sigmoid(dot(weights, x) + bias); }

double logistic_objective(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2) {
  double loss = 0.0;
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double z = dot(weights, data.row(r)) + bias;
    loss += softplus(-sign_of(data.labels[r]) * z);
  }
  loss /= static_cast<double>(data.rows);
  return loss + 0.5 * l2 * dot(weights, weights);
}

LinearGradient logistic_gradient(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2) {
  LinearGradient g;
  g.weights.assign(data.cols, 0.0);
  for (std::size_t r = 0; r < data.rows; ++r) {
    auto row = data.row(r);
    const double y = sign_of(data.labels[r]);
    const double coef = -y * sigmoid(-y * (dot(weights, row) + bias));
    for (std::size_t j = 0; j < data.cols; ++j) g.weights[j] += coef * row[j];
    g.bias += coef;
  }
  const double inv = 1.0 / static_cast<double>(data.rows);
  for (std::size_t j = 0; j < data.cols; ++j) g.weights[j] = g.weights[j] * inv + l2 * weights[j];
  g.bias *= inv;
  return g;
}

TrainedClassifier fit_lr(const FeatureMatrix& data, const LrParams& params) {
  require_both_classes(data);
  if (params.l2 < 0.0) throw InputError("l2 must be non-negative");
  LogisticModel m;
  m.weights.assign(data.cols, 0.0);
  double loss = logistic_objective(data, m.weights, m.bias, params.l2);
  double step = 1.0;
  std::vector<double> trial(data.cols);

  for (; m.iterations < params.max_iters; ++m.iterations) {
    auto g = logistic_gradient(data, m.weights, m.bias, params.l2);
    double max_abs = std::abs(g.bias);
    double norm_sq = g.bias * g.bias;
    for (double v : g.weights) {
      max_abs = std::max(max_abs, std::abs(v));
      norm_sq += v * v;
    }
    if (max_abs < params.tolerance) break;

    // Backtracking line search on the Armijo condition.
    step *= 2.0;
    while (true) {
      for (std::size_t j = 0; j < data.cols; ++j) trial[j] = m.weights[j] - step * g.weights[j];
      const double trial_bias = m.bias - step * g.bias;
      const double trial_loss = logistic_objective(data, trial, trial_bias, params.l2);
      if (!std::isfinite(trial_loss)) throw InputError("logistic loss became non-finite");
      if (trial_loss <= loss - 0.5 * step * norm_sq) {
        m.weights.swap(trial);
        m.bias = trial_bias;
        loss = trial_loss;
        break;
      }
      step *= 0.5;
      if (step < 1e-20) {
        m.iterations = params.max_iters;
        break;
      }
    }
  }
  if (!std::isfinite(loss)) throw InputError("logistic loss is non-finite");
  return TrainedClassifier(std::move(m), data.cols);
}

// --- k nearest neighbors ----------------------------------------------------

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> x) const {
  std::vector<std::pair<double, std::size_t>> dist(data.rows);
  for (std::size_t r = 0; r < data.rows; ++r) {
    auto row = data.row(r);
    double s = 0.0;
    for (std::size_t j = 0; j < data.cols; ++j) {
      const double d = row[j] - x[j];
      s += d * d;
    }
    dist[r] = {s, r};
  }
  const auto kth = dist.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(dist.begin(), kth, dist.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (auto it = dist.begin(); it != kth; ++it) out.push_back(it->second);
  return out;
}

double KnnModel::score(std::span<const double> x) const {
  std::size_t positives = 0;
  for (auto i : neighbors(x)) positives += data.labels[i] == Label::Positive;
  return static_cast<double>(positives) / static_cast<double>(k);
}

TrainedClassifier fit_knn(const FeatureMatrix& data, const KnnParams& params) {
  data.validate();
  if (params.k == 0) throw InputError("k must be at least 1");
  if (params.k > data.rows) {
    throw InputError("k=" + std::to_string(params.k) + " exceeds the " + std::to_string(data.rows) + " training rows");
  }
  return TrainedClassifier(KnnModel{params.k, data}, data.cols);
}

// --- linear SVM -------------------------------------------------------------

double LinearSvm::margin(std::span<const double> x) const { return dot(weights, x) + bias; }
double LinearSvm::score(std::span<const double> x) const { return sigmoid(margin(x)); }

double svm_objective(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2) {
  double hinge = 0.0;
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double m = sign_of(data.labels[r]) * (dot(weights, data.row(r)) + bias);
    hinge += std::max(0.0, 1.0 - m);
  }
  return 0.5 * l2 * (dot(weights, weights) + bias * bias) + hinge / static_cast<double>(data.rows);
}

LinearGradient svm_subgradient(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2) {
  LinearGradient g;
  g.weights.assign(data.cols, 0.0);
  for (std::size_t r = 0; r < data.rows; ++r) {
    auto row = data.row(r);
    const double y = sign_of(data.labels[r]);
    if (y * (dot(weights, row) + bias) < 1.0) {
      for (std::size_t j = 0; j < data.cols; ++j) g.weights[j] -= y * row[j];
      g.bias -= y;
    }
  }
  const double inv = 1.0 / static_cast<double>(data.rows);
  for (std::size_t j = 0; j < data.cols; ++j) g.weights[j] = g.weights[j] * inv + l2 * weights[j];
  g.bias = g.bias * inv + l2 * bias;
  return g;
}

TrainedClassifier fit_svm(const FeatureMatrix& data, const SvmParams& params) {
  require_both_classes(data);
  if (!(params.l2 > 0.0)) throw InputError("SVM l2 must be positive");
  std::vector<double> w(data.cols, 0.0);
  double b = 0.0;
  LinearSvm best{w, 0.0};
  double best_objective = svm_objective(data, w, b, params.l2);

  Rng rng(params.seed);
  std::vector<std::size_t> order(data.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (auto r : order) {
      ++t;
      const double eta = 1.0 / (params.l2 * static_cast<double>(t));
      auto row = data.row(r);
      const double y = sign_of(data.labels[r]);
      const bool violated = y * (dot(w, row) + b) < 1.0;
      const double shrink = 1.0 - eta * params.l2;
      for (auto& v : w) v *= shrink;
      b *= shrink;
      if (violated) {
        for (std::size_t j = 0; j < data.cols; ++j) w[j] += eta * y * row[j];
        b += eta * y;
      }
    }
    // Pegasos iterates are noisy; keep the best one seen at epoch ends.
    const double objective = svm_objective(data, w, b, params.l2);
    if (objective < best_objective) {
      best_objective = objective;
      best = LinearSvm{w, b};
    }
  }
  return TrainedClassifier(std::move(best), data.cols);
}

// --- trees ------------------------------------------------------------------

TrainedClassifier fit_dt(const FeatureMatrix& data, const DtParams& params) {
  require_both_classes(data);
  TreeParams tp{params.max_depth, params.min_samples_split, std::nullopt};
  return TrainedClassifier(TreeModel{DecisionTree::fit(data, tp)}, data.cols);
}

double ForestModel::score(std::span<const double> x) const {
  std::size_t votes = 0;
  for (const auto& tree : trees) votes += tree.score(x) >= kDecisionThreshold;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

TrainedClassifier fit_rf(const FeatureMatrix& data, const RfParams& params) {
  require_both_classes(data);
  if (params.trees == 0) throw InputError("a forest needs at least one tree");
  const auto mtry = params.features_per_split.value_or(
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.cols))))));
  const TreeParams tp{params.max_depth, params.min_samples_split, mtry};

  ForestModel forest;
  forest.trees.resize(params.trees);
  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::size_t> sample(data.rows);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(data.rows));
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    forest.trees[t] = DecisionTree::fit(data, sample, tp, &rng);
  };

  std::size_t threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, params.trees);
  if (threads <= 1) {
    for (std::size_t t = 0; t < params.trees; ++t) grow(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t; (t = next.fetch_add(1)) < params.trees;) grow(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return TrainedClassifier(std::move(forest), data.cols);
}

TrainedClassifier fit(const ModelSpec& spec, const FeatureMatrix& data) {
  switch (spec.algorithm) {
    case Algorithm::NB: return fit_nb(data);
    case Algorithm::LR: return fit_lr(data, spec.lr);
    case Algorithm::KNN: return fit_knn(data, spec.knn);
    case Algorithm::SVM: return fit_svm(data, spec.svm);
    case Algorithm::DT: return fit_dt(data, spec.dt);
    case Algorithm::RF: return fit_rf(data, spec.rf);
  }
  throw InputError("unknown algorithm");
}

// --- container --------------------------------------------------------------

TrainedClassifier::TrainedClassifier(ModelVariant model, std::size_t input_dim)
    : model_(std::make_shared<const ModelVariant>(std::move(model))), input_dim_(input_dim) {}

Algorithm TrainedClassifier::algorithm() const noexcept { return static_cast<Algorithm>(model_->index()); }

double TrainedClassifier::score(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw InputError("expected " + std::to_string(input_dim_) + " features, got " + std::to_string(x.size()));
  }
  return std::visit([&](const auto& m) { return m.score(x); }, *model_);
}

Label TrainedClassifier::predict(std::span<const double> x) const {
  return score(x) >= kDecisionThreshold ? Label::Positive : Label::Negative;
}

std::vector<double> TrainedClassifier::score_all(const FeatureMatrix& m) const {
  std::vector<double> out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) out[r] = score(m.row(r));
  return out;
}

namespace {

struct Saver {
  std::ostream& out;

  void operator()(const GaussianNb& m) const {
    out << "prior ";
    serial::write_reals(out, m.log_prior);
    for (std::size_t c = 0; c < 2; ++c) {
      out << "mean" << c << ' ';
      serial::write_reals(out, m.mean[c]);
      out << "var" << c << ' ';
      serial::write_reals(out, m.variance[c]);
    }
  }
  void operator()(const LogisticModel& m) const {
    out << "bias " << csv::format_double(m.bias) << "\nweights ";
    serial::write_reals(out, m.weights);
  }
  void operator()(const KnnModel& m) const {
    out << "k " << m.k << "\nrows " << m.data.rows << '\n';
    for (std::size_t r = 0; r < m.data.rows; ++r) {
      out << (m.data.labels[r] == Label::Positive ? 1 : 0) << ' ';
      serial::write_reals(out, m.data.row(r));
    }
  }
  void operator()(const LinearSvm& m) const {
    out << "bias " << csv::format_double(m.bias) << "\nweights ";
    serial::write_reals(out, m.weights);
  }
  void operator()(const TreeModel& m) const { m.tree.save(out); }
  void operator()(const ForestModel& m) const {
    out << "trees " << m.trees.size() << '\n';
    for (const auto& t : m.trees) t.save(out);
  }
};

void check_tree(const DecisionTree& tree, std::size_t dim) {
  for (const auto& n : tree.nodes()) {
    if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= dim) {
      throw InputError("model file: tree feature index out of range");
    }
  }
}

}  // namespace

void TrainedClassifier::save(std::ostream& out) const {
  out << "iotnames-classifier 1 " << to_string(algorithm()) << ' ' << input_dim_ << '\n';
  std::visit(Saver{out}, *model_);
}

TrainedClassifier TrainedClassifier::load(std::istream& in) {
  serial::expect(in, "iotnames-classifier");
  if (serial::integer(in) != 1) throw InputError("unsupported classifier file version");
  const auto algorithm = parse_algorithm(serial::token(in));
  const auto dim = serial::integer(in);
  switch (algorithm) {
    case Algorithm::NB: {
      GaussianNb m;
      m.dim = dim;
      serial::expect(in, "prior");
      m.log_prior = {serial::real(in), serial::real(in)};
      for (std::size_t c = 0; c < 2; ++c) {
        serial::expect(in, "mean" + std::to_string(c));
        m.mean[c] = serial::reals(in, dim);
        serial::expect(in, "var" + std::to_string(c));
        m.variance[c] = serial::reals(in, dim);
      }
      return TrainedClassifier(std::move(m), dim);
    }
    case Algorithm::LR:
    case Algorithm::SVM: {
      serial::expect(in, "bias");
      const double bias = serial::real(in);
      serial::expect(in, "weights");
      auto weights = serial::reals(in, dim);
      if (algorithm == Algorithm::LR) return TrainedClassifier(LogisticModel{std::move(weights), bias, 0}, dim);
      return TrainedClassifier(LinearSvm{std::move(weights), bias}, dim);
    }
    case Algorithm::KNN: {
      serial::expect(in, "k");
      const auto k = serial::integer(in);
      serial::expect(in, "rows");
      const auto rows = serial::integer(in);
      if (k == 0 || k > rows) throw InputError("model file: invalid k");
      FeatureMatrix data(rows, dim);
      for (std::size_t r = 0; r < rows; ++r) {
        data.labels[r] = serial::integer(in) ? Label::Positive : Label::Negative;
        for (auto& v : data.row(r)) v = serial::real(in);
      }
      return TrainedClassifier(KnnModel{k, std::move(data)}, dim);
    }
    case Algorithm::DT: {
      auto tree = DecisionTree::load(in);
      check_tree(tree, dim);
      return TrainedClassifier(TreeModel{std::move(tree)}, dim);
    }
    case Algorithm::RF: {
      serial::expect(in, "trees");
      const auto count = serial::integer(in);
      if (count == 0) throw InputError("model file: empty forest");
      ForestModel forest;
      for (std::size_t t = 0; t < count; ++t) {
        forest.trees.push_back(DecisionTree::load(in));
        check_tree(forest.trees.back(), dim);
      }
      return TrainedClassifier(std::move(forest), dim);
    }
  }
  throw InputError("unknown algorithm in model file");
}

}  // namespace iotnames
