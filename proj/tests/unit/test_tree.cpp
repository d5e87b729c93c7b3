#include <gtest/gtest.h>

#include <sstream>

#include "iotnames/tree.hpp"
#include "support/oracles.hpp"

namespace iotnames {
namespace {

FeatureMatrix matrix(std::vector<std::vector<double>> rows, std::vector<int> labels) {
  FeatureMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    m.labels[r] = labels[r] ? Label::Positive : Label::Negative;
  }
  return m;
}

TEST(Gini, Values) {
  EXPECT_DOUBLE_EQ(gini(5, 5), 0.5);
  EXPECT_DOUBLE_EQ(gini(4, 0), 0.0);
  EXPECT_DOUBLE_EQ(gini(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(gini(1, 3), 1.0 - (1.0 / 16 + 9.0 / 16));
  EXPECT_DOUBLE_EQ(weighted_gini(2, 0, 0, 2), 0.0);
  EXPECT_DOUBLE_EQ(weighted_gini(1, 1, 1, 1), 0.5);
}

TEST(Gini, SplitMatchesRecount) {
  Rng rng(4);
  for (int round = 0; round < 200; ++round) {
    std::vector<int> labels(2 + rng.uniform_index(30));
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(2));
    const std::size_t cut = 1 + rng.uniform_index(labels.size() - 1);
    auto side = [&](std::size_t lo, std::size_t hi) {
      double p = 0, n = 0;
      for (std::size_t i = lo; i < hi; ++i) (labels[i] ? p : n) += 1;
      const double t = p + n;
      return std::pair{t, 1.0 - (p / t) * (p / t) - (n / t) * (n / t)};
    };
    const auto [tl, gl] = side(0, cut);
    const auto [tr, gr] = side(cut, labels.size());
    std::size_t lp = 0, ln = 0, rp = 0, rn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i < cut) (labels[i] ? lp : ln)++;
      else (labels[i] ? rp : rn)++;
    }
    EXPECT_NEAR(weighted_gini(lp, ln, rp, rn), (tl * gl + tr * gr) / (tl + tr), 1e-12);
  }
}

TEST(Tree, SingleSplitOnFeature3) {
  Rng rng(1);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> r(6);
    for (auto& v : r) v = rng.uniform_real(0.0, 1.0);
    r[3] = i % 2 ? 0.2 : 0.8;
    rows.push_back(r);
    labels.push_back(r[3] > 0.5);
  }
  const auto tree = DecisionTree::fit(matrix(rows, labels), TreeParams{});
  ASSERT_EQ(tree.nodes().size(), 3u);
  EXPECT_EQ(tree.depth(), 1u);
  EXPECT_EQ(tree.nodes()[0].feature, 3);
  EXPECT_DOUBLE_EQ(tree.nodes()[0].threshold, 0.5);
}

TEST(Tree, TieGoesToLowerFeature) {
  // Features 1 and 2 separate equally well.
  const auto m = matrix({{0, 0, 0}, {0, 1, 1}, {0, 0, 0}, {0, 1, 1}}, {0, 1, 0, 1});
  const auto tree = DecisionTree::fit(m, TreeParams{});
  EXPECT_EQ(tree.nodes()[0].feature, 1);
}

TEST(Tree, PerfectTrainingAccuracyUnlimitedDepth) {
  const auto m = test::two_gaussians(100, 8, 2, 1.0, 3);
  const auto tree = DecisionTree::fit(m, TreeParams{});
  for (std::size_t r = 0; r < m.rows; ++r) {
    EXPECT_EQ(tree.score(m.row(r)) >= 0.5, m.labels[r] == Label::Positive);
  }
}

TEST(Tree, MaxDepthRespected) {
  const auto m = test::two_gaussians(100, 8, 2, 1.0, 3);
  TreeParams p;
  p.max_depth = 2;
  EXPECT_LE(DecisionTree::fit(m, p).depth(), 2u);
}

TEST(Tree, PureDataIsSingleLeaf) {
  const auto m = matrix({{1}, {2}, {3}}, {1, 1, 1});
  const auto tree = DecisionTree::fit(m, TreeParams{});
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_DOUBLE_EQ(tree.score(std::vector<double>{5}), 1.0);
}

TEST(Tree, SaveLoadRoundTrip) {
  const auto m = test::two_gaussians(50, 5, 2, 1.0, 8);
  const auto tree = DecisionTree::fit(m, TreeParams{});
  std::stringstream ss;
  tree.save(ss);
  EXPECT_EQ(DecisionTree::load(ss), tree);
}

}  // namespace
}  // namespace iotnames
