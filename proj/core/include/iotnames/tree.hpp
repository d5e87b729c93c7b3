#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "iotnames/features.hpp"
#include "iotnames/random.hpp"

namespace iotnames {

/// Gini impurity of a binary node.
double gini(std::size_t positives, std::size_t negatives) noexcept;

/// Size-weighted Gini impurity of a split, (n_l * G_l + n_r * G_r) / n.
double weighted_gini(std::size_t left_pos, std::size_t left_neg, std::size_t right_pos,
                     std::size_t right_neg) noexcept;

struct TreeParams {
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
  /// Candidate features per node; nullopt or >= cols means all.
  std::optional<std::size_t> features_per_split;
};

/// CART classification tree on Gini impurity.
///
/// Thresholds are midpoints between consecutive distinct values; a sample
/// goes left when its value is <= threshold. Ties in impurity go to the lower
/// feature index, then the lower threshold. Features constant over the whole
/// training sample are never candidates. With feature subsampling, features
/// are drawn without replacement until `features_per_split` of them vary at
/// the node.
class DecisionTree {
 public:
  struct Node {
    /// -1 for leaves.
    std::int64_t feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t positives = 0;
    std::uint32_t negatives = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  /// Fits on rows `sample` of `data` (repeats allowed, as in a bootstrap).
  static DecisionTree fit(const FeatureMatrix& data, std::span<const std::size_t> sample, const TreeParams& params,
                          Rng* rng = nullptr);
  static DecisionTree fit(const FeatureMatrix& data, const TreeParams& params);

  /// Positive fraction at the leaf reached by `x`.
  double score(std::span<const double> x) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

  void save(std::ostream& out) const;
  static DecisionTree load(std::istream& in);

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<Node> nodes_;
};

}  // namespace iotnames
