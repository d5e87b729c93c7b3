#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "iotnames/error.hpp"
#include "iotnames/eval.hpp"
#include "iotnames/random.hpp"
#include "support/oracles.hpp"

namespace iotnames {
namespace {

std::vector<Label> labels_from(std::initializer_list<int> bits) {
  std::vector<Label> out;
  for (int b : bits) out.push_back(b ? Label::Positive : Label::Negative);
  return out;
}

std::vector<Label> random_labels(Rng& rng, std::size_t n) {
  std::vector<Label> out(n);
  for (auto& l : out) l = rng.uniform_index(2) ? Label::Positive : Label::Negative;
  return out;
}

// A model whose score is column 0 of the row, clamped to [0, 1].
TrainedClassifier column_zero_model(std::size_t dim) {
  LogisticModel lr;
  lr.weights.assign(dim, 0.0);
  lr.weights[0] = 1000.0;
  lr.bias = -500.0;
  return TrainedClassifier(lr, dim);
}

TEST(Confusion, AllCorrect) {
  std::vector<Label> truth(20);
  for (std::size_t i = 0; i < 20; ++i) truth[i] = i < 10 ? Label::Positive : Label::Negative;
  EXPECT_EQ(confusion(truth, truth), (ConfusionMatrix{10, 10, 0, 0}));
}

TEST(Confusion, AllPositive) {
  std::vector<Label> truth(20);
  for (std::size_t i = 0; i < 20; ++i) truth[i] = i < 10 ? Label::Positive : Label::Negative;
  const std::vector<Label> preds(20, Label::Positive);
  const auto c = confusion(preds, truth);
  EXPECT_EQ(c.tp, 10u);
  EXPECT_EQ(c.fp, 10u);
  EXPECT_EQ(c.tn + c.fn, 0u);
}

TEST(Confusion, RandomMatchesTally) {
  Rng rng(1);
  for (int round = 0; round < 200; ++round) {
    const auto n = 1 + rng.uniform_index(100);
    const auto p = random_labels(rng, n);
    const auto t = random_labels(rng, n);
    const auto c = confusion(p, t);
    const auto o = test::tally(p, t);
    EXPECT_EQ(c, (ConfusionMatrix{o.tp, o.tn, o.fp, o.fn}));
    EXPECT_EQ(c.total(), n);
  }
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(labels_from({1}), labels_from({1, 0})), InputError);
  EXPECT_THROW(confusion({}, {}), InputError);
}

TEST(Metrics, WorkedExamples) {
  auto m = metrics({50, 40, 5, 5});
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.9);
  EXPECT_DOUBLE_EQ(*m.precision, 10.0 / 11.0);
  EXPECT_DOUBLE_EQ(*m.recall, 10.0 / 11.0);
  EXPECT_DOUBLE_EQ(*m.f1, 10.0 / 11.0);
  m = metrics({25, 25, 25, 25});
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(*m.precision, 0.5);
  EXPECT_DOUBLE_EQ(*m.recall, 0.5);
  EXPECT_DOUBLE_EQ(*m.f1, 0.5);
}

TEST(Metrics, UndefinedIsMarked) {
  const auto m = metrics({0, 10, 0, 5});
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_TRUE(m.recall.has_value());
  EXPECT_DOUBLE_EQ(*m.recall, 0.0);
  EXPECT_FALSE(m.f1.has_value());
  const auto r = metrics({0, 10, 3, 0});
  EXPECT_FALSE(r.recall.has_value());
  EXPECT_FALSE(r.f1.has_value());
  EXPECT_THROW(metrics({}), InputError);
}

TEST(Metrics, HarmonicMeanIdentity) {
  Rng rng(2);
  for (int round = 0; round < 1000; ++round) {
    ConfusionMatrix c{rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50)};
    if (c.total() == 0) continue;
    const auto m = metrics(c);
    // F1 is 0 rather than a harmonic mean when tp = 0.
    if (m.f1 && c.tp > 0) EXPECT_NEAR(1.0 / *m.f1 * 2.0, 1.0 / *m.precision + 1.0 / *m.recall, 1e-9 * (1.0 / *m.f1 + 1.0));
  }
}

TEST(Roc, PerfectRanking) {
  const std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
  const auto r = roc_auc(s, labels_from({1, 1, 0, 0}));
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
}

TEST(Roc, AllTied) {
  const std::vector<double> s(10, 0.4);
  const auto r = roc_auc(s, labels_from({1, 0, 1, 0, 1, 1, 0, 0, 0, 1}));
  EXPECT_DOUBLE_EQ(r.auc, 0.5);
  ASSERT_EQ(r.points.size(), 2u);
}

TEST(Roc, SingleClassIsError) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(roc_auc(s, labels_from({1, 1})), InputError);
}

TEST(Roc, MatchesMannWhitneyOracle) {
  Rng rng(3);
  for (int round = 0; round < 100; ++round) {
    const auto n = 2 + rng.uniform_index(199);
    auto truth = random_labels(rng, n);
    truth[0] = Label::Positive;
    truth[1] = Label::Negative;
    std::vector<double> scores(n);
    for (auto& s : scores) s = static_cast<double>(rng.uniform_index(20)) / 20.0;
    const auto r = roc_auc(scores, truth);
    EXPECT_NEAR(r.auc, test::mann_whitney_auc(scores, truth), 1e-9);
  }
}

TEST(Roc, CurveShape) {
  Rng rng(4);
  for (int round = 0; round < 50; ++round) {
    const auto n = 2 + rng.uniform_index(80);
    auto truth = random_labels(rng, n);
    truth[0] = Label::Positive;
    truth[1] = Label::Negative;
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.uniform_real();
    const auto r = roc_auc(scores, truth);
    EXPECT_EQ(r.points.front().fpr, 0.0);
    EXPECT_EQ(r.points.front().tpr, 0.0);
    EXPECT_EQ(r.points.back().fpr, 1.0);
    EXPECT_EQ(r.points.back().tpr, 1.0);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
      EXPECT_GE(r.points[i].fpr, r.points[i - 1].fpr);
      EXPECT_GE(r.points[i].tpr, r.points[i - 1].tpr);
    }
    EXPECT_GE(r.auc, 0.0);
    EXPECT_LE(r.auc, 1.0);
  }
}

TEST(Roc, MonotoneTransformInvariant) {
  Rng rng(5);
  const std::size_t n = 150;
  auto truth = random_labels(rng, n);
  truth[0] = Label::Positive;
  truth[1] = Label::Negative;
  std::vector<double> scores(n), transformed(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform_real();
    transformed[i] = std::exp(3.0 * scores[i]) - 7.0;
  }
  EXPECT_DOUBLE_EQ(roc_auc(scores, truth).auc, roc_auc(transformed, truth).auc);
}

TEST(Evaluate, ExactModel) {
  FeatureMatrix m(20, 2);
  for (std::size_t r = 0; r < 20; ++r) {
    m.labels[r] = r % 2 ? Label::Positive : Label::Negative;
    m.row(r)[0] = r % 2 ? 0.9 : 0.1;
  }
  const auto report = evaluate(column_zero_model(2), m);
  EXPECT_DOUBLE_EQ(*report.metrics.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(report.roc.auc, 1.0);
}

TEST(Evaluate, ConstantPositiveModel) {
  FeatureMatrix m(10, 2);
  for (std::size_t r = 0; r < 10; ++r) {
    m.labels[r] = r < 3 ? Label::Positive : Label::Negative;
    m.row(r)[0] = 1.0;
  }
  const auto report = evaluate(column_zero_model(2), m);
  EXPECT_DOUBLE_EQ(*report.metrics.recall, 1.0);
  EXPECT_DOUBLE_EQ(*report.metrics.accuracy, 0.3);
}

TEST(Evaluate, ReportConsistentWithStoredPredictions) {
  const auto train = test::two_gaussians(100, 5, 2, 1.0, 6);
  const auto held = test::two_gaussians(50, 5, 2, 1.0, 7);
  const auto report = evaluate(fit_lr(train), held);
  const auto t = test::tally(report.predictions, held.labels);
  EXPECT_EQ(report.confusion, (ConfusionMatrix{t.tp, t.tn, t.fp, t.fn}));
  EXPECT_NEAR(report.roc.auc, test::mann_whitney_auc(report.scores, held.labels), 1e-12);
  for (std::size_t i = 0; i < held.rows; ++i) {
    EXPECT_EQ(report.predictions[i] == Label::Positive, report.scores[i] >= 0.5);
  }
}

TEST(Evaluate, DimensionMismatch) {
  FeatureMatrix m(4, 3);
  m.labels = labels_from({1, 0, 1, 0});
  EXPECT_THROW(evaluate(column_zero_model(2), m), InputError);
}

TEST(CrossValidate, AlwaysCorrectDummy) {
  auto data = test::two_gaussians(25, 2, 1, 0.0, 8);
  for (std::size_t r = 0; r < data.rows; ++r) data.row(r)[0] = data.labels[r] == Label::Positive ? 1.0 : 0.0;
  const auto cv = cross_validate_with([](const FeatureMatrix&) { return column_zero_model(2); }, data, {5, 1});
  ASSERT_EQ(cv.per_fold.size(), 5u);
  EXPECT_DOUBLE_EQ(*cv.accuracy.mean, 1.0);
  EXPECT_DOUBLE_EQ(*cv.accuracy.std, 0.0);
}

TEST(CrossValidate, FoldSizesAndRecomputation) {
  const auto data = test::two_gaussians(100, 4, 2, 1.5, 9);
  ModelSpec spec;
  spec.algorithm = Algorithm::LR;
  const auto cv = cross_validate(spec, data, {5, 3});
  ASSERT_EQ(cv.per_fold.size(), 5u);
  std::vector<double> accs;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto& rep = cv.per_fold[f];
    std::vector<Label> truth;
    for (auto i : cv.folds[f].test) truth.push_back(data.labels[i]);
    EXPECT_EQ(rep.predictions.size(), 40u);
    const auto t = test::tally(rep.predictions, truth);
    EXPECT_EQ(t.tp + t.fn, 20u);
    EXPECT_EQ(rep.confusion, (ConfusionMatrix{t.tp, t.tn, t.fp, t.fn}));
    accs.push_back(*rep.metrics.accuracy);
  }
  double mean = 0;
  for (double a : accs) mean += a / 5;
  double var = 0;
  for (double a : accs) var += (a - mean) * (a - mean) / 5;
  EXPECT_NEAR(*cv.accuracy.mean, mean, 1e-12);
  EXPECT_NEAR(*cv.accuracy.std, std::sqrt(var), 1e-12);
  EXPECT_GE(*cv.accuracy.mean, *std::min_element(accs.begin(), accs.end()));
  EXPECT_LE(*cv.accuracy.mean, *std::max_element(accs.begin(), accs.end()));
}

TEST(CrossValidate, Reproducible) {
  const auto data = test::two_gaussians(50, 4, 2, 1.0, 10);
  ModelSpec spec;
  spec.algorithm = Algorithm::RF;
  spec.rf.trees = 10;
  spec.rf.seed = 2;
  const auto a = cross_validate(spec, data, {5, 4});
  const auto b = cross_validate(spec, data, {5, 4});
  for (std::size_t f = 0; f < 5; ++f) EXPECT_EQ(a.per_fold[f].scores, b.per_fold[f].scores);
}

TEST(SummarizeMetric, SkipsUndefined) {
  const std::vector<std::optional<double>> v = {0.5, std::nullopt, 1.0};
  const auto s = summarize_metric(v);
  EXPECT_DOUBLE_EQ(*s.mean, 0.75);
  EXPECT_DOUBLE_EQ(*s.std, 0.25);
  EXPECT_FALSE(summarize_metric(std::vector<std::optional<double>>{std::nullopt}).mean.has_value());
}

TEST(Ablation, EntryPerPositionAndInputsUntouched) {
  EmbeddingConfig config;
  config.pad_to = 6;
  config.vector_dim = 2;
  const auto train = test::two_gaussians(30, 12, 12, 2.0, 11);
  const auto held = test::two_gaussians(20, 12, 12, 2.0, 12);
  const auto train_copy = train.values;
  ModelSpec spec;
  spec.algorithm = Algorithm::LR;
  const auto result = ablate(spec, train, held, config);
  ASSERT_EQ(result.per_position.size(), 6u);
  for (std::size_t p = 0; p < 6; ++p) EXPECT_EQ(result.per_position[p].position, p);
  EXPECT_EQ(train.values, train_copy);
}

TEST(Ablation, ZeroBlockIsNoOp) {
  EmbeddingConfig config;
  config.pad_to = 4;
  config.vector_dim = 3;
  auto train = test::two_gaussians(40, 12, 6, 2.0, 13);
  auto held = test::two_gaussians(20, 12, 6, 2.0, 14);
  for (auto* m : {&train, &held}) {
    for (std::size_t r = 0; r < m->rows; ++r) std::fill_n(m->row(r).begin() + 6, 3, 0.0);
  }
  ModelSpec spec;
  spec.algorithm = Algorithm::RF;
  spec.rf.trees = 20;
  spec.rf.seed = 1;
  const auto baseline = evaluate(fit(spec, train), held);
  const std::size_t position = 2;
  const auto result = ablate_positions(spec, train, held, config, std::span(&position, 1));
  EXPECT_EQ(result.per_position[0].report.scores, baseline.scores);
}

TEST(Ablation, SignalBlockMattersMoreThanLastBlock) {
  // Only block 38 separates the classes; block 39 is noise.
  EmbeddingConfig config;
  config.pad_to = 40;
  config.vector_dim = 2;
  auto make = [&](std::uint64_t seed) {
    Rng rng(seed);
    FeatureMatrix m(200, 80);
    for (std::size_t r = 0; r < m.rows; ++r) {
      const bool pos = r % 2 == 0;
      m.labels[r] = pos ? Label::Positive : Label::Negative;
      for (std::size_t c = 76; c < 80; ++c) m.row(r)[c] = rng.normal();
      m.row(r)[76] += pos ? 3.0 : -3.0;
    }
    return m;
  };
  ModelSpec spec;
  spec.algorithm = Algorithm::RF;
  spec.rf.trees = 30;
  spec.rf.seed = 5;
  const std::size_t positions[] = {38, 39};
  const auto result = ablate_positions(spec, make(1), make(2), config, positions);
  EXPECT_LT(*result.per_position[0].report.metrics.accuracy, *result.per_position[1].report.metrics.accuracy);
}

TEST(Ablation, DimensionMismatch) {
  EmbeddingConfig config;
  const auto m = test::two_gaussians(5, 10, 1, 1.0, 1);
  EXPECT_THROW(ablate(ModelSpec{}, m, m, config), InputError);
}

}  // namespace
}  // namespace iotnames
