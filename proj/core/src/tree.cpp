#include "iotnames/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "iotnames/error.hpp"
#include "serialize.hpp"

namespace iotnames {

double gini(std::size_t positives, std::size_t negatives) noexcept {
  const double n = static_cast<double>(positives + negatives);
  if (n == 0.0) return 0.0;
  const double p = static_cast<double>(positives) / n;
  const double q = static_cast<double>(negatives) / n;
  return 1.0 - p * p - q * q;
}

double weighted_gini(std::size_t left_pos, std::size_t left_neg, std::size_t right_pos,
                     std::size_t right_neg) noexcept {
  const auto sum_sq_over = [](double a, double b) {
    const double n = a + b;
    return n == 0.0 ? 0.0 : (a * a + b * b) / n;
  };
  const double lp = static_cast<double>(left_pos), ln = static_cast<double>(left_neg);
  const double rp = static_cast<double>(right_pos), rn = static_cast<double>(right_neg);
  const double n = lp + ln + rp + rn;
  if (n == 0.0) return 0.0;
  // n_l * G_l = n_l - (p_l^2 + q_l^2) / n_l
  return ((lp + ln) - sum_sq_over(lp, ln) + (rp + rn) - sum_sq_over(rp, rn)) / n;
}

namespace {

struct Candidate {
  double impurity = std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  double threshold = 0.0;
  bool found = false;

  bool better_than(const Candidate& other) const {
    if (!other.found) return found;
    if (impurity != other.impurity) return impurity < other.impurity;
    if (feature != other.feature) return feature < other.feature;
    return threshold < other.threshold;
  }
};

class Builder {
 public:
  Builder(const FeatureMatrix& data, const TreeParams& params, Rng* rng, std::vector<DecisionTree::Node>& nodes)
      : data_(data), params_(params), rng_(rng), nodes_(nodes) {}

  void build(std::vector<std::size_t> sample) {
    // Features that never vary over the sample cannot split any node.
    for (std::size_t f = 0; f < data_.cols; ++f) {
      const double first = value(sample.front(), f);
      for (auto i : sample) {
        if (value(i, f) != first) {
          varying_.push_back(f);
          break;
        }
      }
    }
    mtry_ = params_.features_per_split.value_or(varying_.size());
    if (mtry_ == 0) mtry_ = 1;
    grow(std::move(sample), 0);
  }

 private:
  double value(std::size_t row, std::size_t f) const { return data_.values[row * data_.cols + f]; }

  std::uint32_t grow(std::vector<std::size_t> sample, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    std::uint32_t pos = 0;
    for (auto i : sample) pos += data_.labels[i] == Label::Positive;
    nodes_[id].positives = pos;
    nodes_[id].negatives = static_cast<std::uint32_t>(sample.size()) - pos;

    const bool pure = pos == 0 || pos == sample.size();
    const bool too_deep = params_.max_depth && depth >= *params_.max_depth;
    if (pure || too_deep || sample.size() < std::max<std::size_t>(params_.min_samples_split, 2)) return id;

    const Candidate best = search(sample, pos);
    if (!best.found) return id;

    std::vector<std::size_t> left, right;
    for (auto i : sample) (value(i, best.feature) <= best.threshold ? left : right).push_back(i);
    sample = {};
    nodes_[id].feature = static_cast<std::int64_t>(best.feature);
    nodes_[id].threshold = best.threshold;
    const auto l = grow(std::move(left), depth + 1);
    const auto r = grow(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Candidate search(const std::vector<std::size_t>& sample, std::size_t total_pos) {
    Candidate best;
    const bool subsample = rng_ && mtry_ < varying_.size();
    if (!subsample) {
      for (auto f : varying_) evaluate(sample, total_pos, f, best);
      return best;
    }
    pool_ = varying_;
    std::size_t varied = 0;
    for (std::size_t drawn = 0; drawn < pool_.size() && varied < mtry_; ++drawn) {
      const auto j = drawn + static_cast<std::size_t>(rng_->uniform_index(pool_.size() - drawn));
      std::swap(pool_[drawn], pool_[j]);
      if (evaluate(sample, total_pos, pool_[drawn], best)) ++varied;
    }
    return best;
  }

  // Returns false when the feature is constant on this node.
  bool evaluate(const std::vector<std::size_t>& sample, std::size_t total_pos, std::size_t f, Candidate& best) {
    column_.clear();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto i : sample) {
      const double v = value(i, f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      column_.emplace_back(v, data_.labels[i] == Label::Positive);
    }
    if (lo == hi) return false;
    std::sort(column_.begin(), column_.end());

    const std::size_t n = column_.size();
    const std::size_t total_neg = n - total_pos;
    std::size_t left_pos = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_pos += column_[k].second;
      if (column_[k].first == column_[k + 1].first) continue;
      const std::size_t left_n = k + 1;
      const std::size_t left_neg = left_n - left_pos;
      Candidate c;
      c.found = true;
      c.feature = f;
      c.impurity = weighted_gini(left_pos, left_neg, total_pos - left_pos, total_neg - left_neg);
      const double a = column_[k].first;
      const double b = column_[k + 1].first;
      c.threshold = a + (b - a) / 2.0;
      if (c.threshold >= b) c.threshold = a;
      if (c.better_than(best)) best = c;
    }
    return true;
  }

  const FeatureMatrix& data_;
  const TreeParams& params_;
  Rng* rng_;
  std::vector<DecisionTree::Node>& nodes_;
  std::vector<std::size_t> varying_;
  std::vector<std::size_t> pool_;
  std::vector<std::pair<double, bool>> column_;
  std::size_t mtry_ = 0;
};

}  // namespace

DecisionTree DecisionTree::fit(const FeatureMatrix& data, std::span<const std::size_t> sample,
                               const TreeParams& params, Rng* rng) {
  data.validate();
  if (sample.empty()) throw InputError("cannot fit a tree on an empty sample");
  DecisionTree tree;
  Builder builder(data, params, rng, tree.nodes_);
  builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
  return tree;
}

DecisionTree DecisionTree::fit(const FeatureMatrix& data, const TreeParams& params) {
  std::vector<std::size_t> all(data.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return fit(data, all, params, nullptr);
}

double DecisionTree::score(std::span<const double> x) const {
  std::uint32_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& node = nodes_[i];
    i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  const auto& leaf = nodes_[i];
  return static_cast<double>(leaf.positives) / static_cast<double>(leaf.positives + leaf.negatives);
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

void DecisionTree::save(std::ostream& out) const {
  out << "tree " << nodes_.size() << '\n';
  for (const auto& n : nodes_) {
    out << n.feature << ' ' << csv::format_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
        << n.positives << ' ' << n.negatives << '\n';
  }
}

DecisionTree DecisionTree::load(std::istream& in) {
  serial::expect(in, "tree");
  const auto count = serial::integer(in);
  if (count == 0) throw InputError("model file: empty tree");
  DecisionTree tree;
  tree.nodes_.resize(count);
  for (auto& n : tree.nodes_) {
    n.feature = serial::integer<std::int64_t>(in);
    n.threshold = serial::real(in);
    n.left = serial::integer<std::uint32_t>(in);
    n.right = serial::integer<std::uint32_t>(in);
    n.positives = serial::integer<std::uint32_t>(in);
    n.negatives = serial::integer<std::uint32_t>(in);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto& n = tree.nodes_[i];
    if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= count || n.right >= count)) {
      throw InputError("model file: malformed tree links");
    }
    if (n.is_leaf() && n.positives + n.negatives == 0) throw InputError("model file: empty leaf");
  }
  return tree;
}

}  // namespace iotnames
