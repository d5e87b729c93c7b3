#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "iotnames/features.hpp"
#include "iotnames/label.hpp"
#include "iotnames/tree.hpp"

namespace iotnames {

enum class Algorithm { NB, LR, KNN, SVM, DT, RF };

std::string_view to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(std::string_view text);

inline constexpr double kDecisionThreshold = 0.5;

struct LrParams {
  double l2 = 1e-3;
  std::size_t max_iters = 200;
  double tolerance = 1e-5;
};

struct KnnParams {
  std::size_t k = 5;
};

struct SvmParams {
  double l2 = 1e-3;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
};

struct DtParams {
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
};

struct RfParams {
  std::size_t trees = 100;
  /// Defaults to floor(sqrt(cols)).
  std::optional<std::size_t> features_per_split;
  bool bootstrap = true;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  std::size_t threads = 0;
};

/// An algorithm and its hyperparameters; only the matching member is used.
struct ModelSpec {
  Algorithm algorithm = Algorithm::RF;
  LrParams lr;
  KnnParams knn;
  SvmParams svm;
  DtParams dt;
  RfParams rf;
};

/// Gaussian naive Bayes. Variances are floored at 1e-9 times the largest
/// per-feature variance.
struct GaussianNb {
  std::size_t dim = 0;
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> variance;

  double score(std::span<const double> x) const;
};

/// Logistic regression; score = sigmoid(w.x + b).
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;

  double score(std::span<const double> x) const;
};

/// Stores the training set; score = positive share of the k nearest rows.
struct KnnModel {
  std::size_t k = 5;
  FeatureMatrix data;

  double score(std::span<const double> x) const;
  /// Indices of the k nearest rows, nearest first; distance ties by lower index.
  std::vector<std::size_t> neighbors(std::span<const double> x) const;
};

/// Linear SVM; score = sigmoid(w.x + b), a ranking score only.
struct LinearSvm {
  std::vector<double> weights;
  double bias = 0.0;

  double margin(std::span<const double> x) const;
  double score(std::span<const double> x) const;
};

struct TreeModel {
  DecisionTree tree;

  double score(std::span<const double> x) const { return tree.score(x); }
};

/// Bagged CART trees; score = fraction of trees voting positive.
struct ForestModel {
  std::vector<DecisionTree> trees;

  double score(std::span<const double> x) const;
};

using ModelVariant = std::variant<GaussianNb, LogisticModel, KnnModel, LinearSvm, TreeModel, ForestModel>;

/// A fitted, immutable binary classifier. Copies share the fitted state.
class TrainedClassifier {
 public:
  TrainedClassifier(ModelVariant model, std::size_t input_dim);

  Algorithm algorithm() const noexcept;
  std::size_t input_dim() const noexcept { return input_dim_; }

  /// In [0, 1]. Throws InputError on a dimension mismatch.
  double score(std::span<const double> x) const;
  /// Positive iff score >= 0.5.
  Label predict(std::span<const double> x) const;

  std::vector<double> score_all(const FeatureMatrix& m) const;

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(model_.get());
  }

  /// Text container: "iotnames-classifier 1 <algo> <dim>" then the payload.
  /// Doubles are written in shortest round-trip form.
  void save(std::ostream& out) const;
  static TrainedClassifier load(std::istream& in);

 private:
  std::shared_ptr<const ModelVariant> model_;
  std::size_t input_dim_ = 0;
};

TrainedClassifier fit_nb(const FeatureMatrix& data);
TrainedClassifier fit_lr(const FeatureMatrix& data, const LrParams& params = {});
TrainedClassifier fit_knn(const FeatureMatrix& data, const KnnParams& params = {});
TrainedClassifier fit_svm(const FeatureMatrix& data, const SvmParams& params = {});
TrainedClassifier fit_dt(const FeatureMatrix& data, const DtParams& params = {});
TrainedClassifier fit_rf(const FeatureMatrix& data, const RfParams& params = {});

TrainedClassifier fit(const ModelSpec& spec, const FeatureMatrix& data);

inline Label predict(const TrainedClassifier& model, std::span<const double> x) { return model.predict(x); }
inline double score(const TrainedClassifier& model, std::span<const double> x) { return model.score(x); }

/// Mean logistic loss plus (l2/2)|w|^2, labels mapped to -1/+1.
double logistic_objective(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2);

struct LinearGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

LinearGradient logistic_gradient(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2);

/// (l2/2)(|w|^2 + b^2) plus mean hinge loss. The bias is regularized
/// because it is trained as the weight of a constant feature.
double svm_objective(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2);

/// A subgradient of svm_objective (the hinge at margin exactly 1 counts as flat).
LinearGradient svm_subgradient(const FeatureMatrix& data, std::span<const double> weights, double bias, double l2);

}  // namespace iotnames
