#pragma once

// Brute-force reference implementations used to check the library. They
// favor obviousness over speed and share no code with core/.

#include <cstddef>
#include <cstdint>
#include <string>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "iotnames/classify.hpp"
#include "iotnames/embedding.hpp"
#include "iotnames/features.hpp"
#include "iotnames/label.hpp"

namespace iotnames::test {

struct Tally {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

Tally tally(std::span<const Label> predictions, std::span<const Label> truth);

/// Pair counting: (concordant + ties/2) / (P * N).
double mann_whitney_auc(std::span<const double> scores, std::span<const Label> truth);

/// Central difference of `f` along each coordinate of `x`.
std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> x, double h);

/// |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor = 1e-8);

double cosine(std::span<const double> a, std::span<const double> b);

/// Numerical gradient of cbow_loss() with respect to the input vector of
/// `input_id` and the output vector of `output_id`, by central differences.
struct CbowNumericGradient {
  std::vector<double> input;
  std::vector<double> output;
};
CbowNumericGradient cbow_numeric_gradient(const EmbeddingModel& model, const CbowExample& example,
                                          std::size_t input_id, std::size_t output_id, double h);

/// Sample quantile by the linear rule on a copy of the data, computed
/// without reusing the library's interpolation.
double reference_quantile(std::vector<double> values, double p);

}  // namespace iotnames::test

namespace iotnames::test {

/// Sentences in which "A" is always followed by "B" and "C" sits outside the
/// window of both. Fillers around C come from a separate pool.
std::vector<std::vector<std::string>> cooccurrence_corpus(std::uint64_t seed, std::size_t sentences = 300,
                                                          std::size_t window = 3);

/// Config used with cooccurrence_corpus().
EmbeddingConfig cooccurrence_config(std::uint64_t seed);

}  // namespace iotnames::test

namespace iotnames::test {

/// per_class positives and negatives in `dims` dimensions, unit variance.
/// The first `signal_dims` coordinates have mean +separation/2 for positives
/// and -separation/2 for negatives; the rest are pure noise.
FeatureMatrix two_gaussians(std::size_t per_class, std::size_t dims, std::size_t signal_dims, double separation,
                            std::uint64_t seed);

/// Share of rows of `m` that `model` labels correctly.
double accuracy_of(const TrainedClassifier& model, const FeatureMatrix& m);

}  // namespace iotnames::test
