#include "iotnames/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iotnames/error.hpp"

namespace iotnames {

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truth) {
  if (predictions.size() != truth.size()) throw InputError("prediction and truth lengths differ");
  if (truth.empty()) throw InputError("cannot build a confusion matrix from no samples");
  ConfusionMatrix c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predictions[i] == Label::Positive;
    const bool t = truth[i] == Label::Positive;
    if (p && t) ++c.tp;
    else if (!p && !t) ++c.tn;
    else if (p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

Metrics metrics(const ConfusionMatrix& c) {
  if (c.total() == 0) throw InputError("metrics of an empty confusion matrix");
  Metrics m;
  const auto tp = static_cast<double>(c.tp);
  m.accuracy = (tp + static_cast<double>(c.tn)) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) m.precision = tp / (tp + static_cast<double>(c.fp));
  if (c.tp + c.fn > 0) m.recall = tp / (tp + static_cast<double>(c.fn));
  if (m.precision && m.recall) {
    const double p = *m.precision, r = *m.recall;
    // Both zero means there were no true positives; the harmonic mean is 0.
    m.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return m;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const Label> truth) {
  if (scores.size() != truth.size()) throw InputError("score and truth lengths differ");
  const auto positives = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), Label::Positive));
  const auto negatives = truth.size() - positives;
  if (positives == 0 || negatives == 0) throw InputError("ROC needs both classes in the truth labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::size_t step_tp = 0, step_fp = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (truth[order[i]] == Label::Positive ? step_tp : step_fp) += 1;
    }
    // Trapezoid in count units: width step_fp, mean height tp + step_tp/2.
    area += static_cast<double>(step_fp) * (static_cast<double>(tp) + 0.5 * static_cast<double>(step_tp));
    tp += step_tp;
    fp += step_fp;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
  }
  roc.auc = area / (static_cast<double>(positives) * static_cast<double>(negatives));
  return roc;
}

EvalReport evaluate(const TrainedClassifier& model, const FeatureMatrix& test) {
  test.validate();
  if (test.cols != model.input_dim()) {
    throw InputError("test matrix has " + std::to_string(test.cols) + " columns, model expects " +
                     std::to_string(model.input_dim()));
  }
  EvalReport report;
  report.scores = model.score_all(test);
  report.predictions.reserve(test.rows);
  for (double s : report.scores) report.predictions.push_back(s >= kDecisionThreshold ? Label::Positive : Label::Negative);
  report.confusion = confusion(report.predictions, test.labels);
  report.metrics = metrics(report.confusion);
  if (test.count(Label::Positive) > 0 && test.count(Label::Negative) > 0) {
    report.roc = roc_auc(report.scores, test.labels);
  }
  return report;
}

MetricSummary summarize_metric(std::span<const std::optional<double>> values) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  MetricSummary s;
  if (defined.empty()) return s;
  const double n = static_cast<double>(defined.size());
  const double mean = std::accumulate(defined.begin(), defined.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : defined) ss += (v - mean) * (v - mean);
  s.mean = mean;
  s.std = std::sqrt(ss / n);
  return s;
}

namespace detail {

CvResult finish_cv(std::vector<EvalReport> reports, std::vector<IndexSplit> folds) {
  CvResult cv;
  cv.per_fold = std::move(reports);
  cv.folds = std::move(folds);
  auto column = [&](auto member) {
    std::vector<std::optional<double>> values;
    for (const auto& r : cv.per_fold) values.push_back(r.metrics.*member);
    return summarize_metric(values);
  };
  cv.accuracy = column(&Metrics::accuracy);
  cv.precision = column(&Metrics::precision);
  cv.recall = column(&Metrics::recall);
  cv.f1 = column(&Metrics::f1);
  return cv;
}

}  // namespace detail

CvResult cross_validate(const ModelSpec& spec, const FeatureMatrix& data, const FoldPlan& plan) {
  return cross_validate_with([&](const FeatureMatrix& train) { return fit(spec, train); }, data, plan);
}

FeatureMatrix ablate_block(const FeatureMatrix& m, std::size_t position, std::size_t dim) {
  if ((position + 1) * dim > m.cols) throw InputError("ablation block outside the feature matrix");
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < out.rows; ++r) {
    auto row = out.row(r);
    std::fill(row.begin() + static_cast<std::ptrdiff_t>(position * dim),
              row.begin() + static_cast<std::ptrdiff_t>((position + 1) * dim), 0.0);
  }
  return out;
}

AblationResult ablate_positions(const ModelSpec& spec, const FeatureMatrix& train, const FeatureMatrix& test,
                                const EmbeddingConfig& config, std::span<const std::size_t> positions) {
  const std::size_t expected = config.pad_to * config.vector_dim;
  if (train.cols != expected || test.cols != expected) {
    throw InputError("ablation expects " + std::to_string(expected) + " columns (pad_to x dim)");
  }
  AblationResult result;
  for (auto p : positions) {
    if (p >= config.pad_to) throw InputError("ablation position out of range");
    const auto model = fit(spec, ablate_block(train, p, config.vector_dim));
    result.per_position.push_back({p, evaluate(model, ablate_block(test, p, config.vector_dim))});
  }
  return result;
}

AblationResult ablate(const ModelSpec& spec, const FeatureMatrix& train, const FeatureMatrix& test,
                      const EmbeddingConfig& config) {
  std::vector<std::size_t> positions(config.pad_to);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  return ablate_positions(spec, train, test, config, positions);
}

}  // namespace iotnames
