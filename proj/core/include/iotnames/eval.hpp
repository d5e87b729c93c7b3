#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "iotnames/classify.hpp"
#include "iotnames/corpus.hpp"
#include "iotnames/embedding.hpp"
#include "iotnames/features.hpp"
#include "iotnames/label.hpp"

namespace iotnames {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws InputError on empty input or a length mismatch.
ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truth);

/// Accuracy, precision, recall and F1. A metric whose denominator is zero
/// is nullopt rather than 0.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

/// accuracy = (TP+TN)/total, precision = TP/(TP+FP), recall = TP/(TP+FN),
/// F1 = 2PR/(P+R). Throws InputError for an empty matrix.
Metrics metrics(const ConfusionMatrix& c);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Sweeps thresholds over the distinct scores, highest first, with tied
/// scores taken as one step. The trapezoid area equals the Mann-Whitney
/// statistic with ties counted as one half.
RocCurve roc_auc(std::span<const double> scores, std::span<const Label> truth);

struct EvalReport {
  ConfusionMatrix confusion;
  Metrics metrics;
  RocCurve roc;
  std::vector<Label> predictions;
  std::vector<double> scores;
};

/// Scores every row of `test` and derives the confusion matrix, metrics and
/// ROC curve. ROC is left empty when `test` holds a single class.
EvalReport evaluate(const TrainedClassifier& model, const FeatureMatrix& test);

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> std;
};

struct CvResult {
  std::vector<EvalReport> per_fold;
  std::vector<IndexSplit> folds;
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
};

/// Mean and population standard deviation over the defined values.
MetricSummary summarize_metric(std::span<const std::optional<double>> values);

/// Fits `spec` on k-1 stratified folds and evaluates on the held-out one,
/// for each fold.
CvResult cross_validate(const ModelSpec& spec, const FeatureMatrix& data, const FoldPlan& plan);

/// Same, with a caller-supplied fit function (used for dummy models in tests).
template <typename FitFn>
CvResult cross_validate_with(FitFn&& fit_fn, const FeatureMatrix& data, const FoldPlan& plan);

struct AblationEntry {
  std::size_t position = 0;
  EvalReport report;
};

struct AblationResult {
  std::vector<AblationEntry> per_position;
};

/// Copy of `m` with columns [position*dim, (position+1)*dim) set to zero.
FeatureMatrix ablate_block(const FeatureMatrix& m, std::size_t position, std::size_t dim);

/// For each label position, zeroes that block in both train and test, refits
/// and evaluates. The inputs are not modified.
AblationResult ablate(const ModelSpec& spec, const FeatureMatrix& train, const FeatureMatrix& test,
                      const EmbeddingConfig& config);

/// Evaluates only the listed positions.
AblationResult ablate_positions(const ModelSpec& spec, const FeatureMatrix& train, const FeatureMatrix& test,
                                const EmbeddingConfig& config, std::span<const std::size_t> positions);

// --- implementation ---------------------------------------------------------

namespace detail {
CvResult finish_cv(std::vector<EvalReport> reports, std::vector<IndexSplit> folds);
}

template <typename FitFn>
CvResult cross_validate_with(FitFn&& fit_fn, const FeatureMatrix& data, const FoldPlan& plan) {
  auto folds = stratified_fold_indices(data.labels, plan);
  std::vector<EvalReport> reports;
  reports.reserve(folds.size());
  for (const auto& fold : folds) {
    const auto train = select_rows(data, fold.train);
    const auto test = select_rows(data, fold.test);
    reports.push_back(evaluate(fit_fn(train), test));
  }
  return detail::finish_cv(std::move(reports), std::move(folds));
}

}  // namespace iotnames
