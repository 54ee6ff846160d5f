#include "stss/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stss {

namespace {

struct SortedColumn {
  std::vector<double> values;
  std::vector<int> labels;
};

double gini(const std::vector<long>& counts, long total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (long c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<int>& y, int m, int max_depth, Rng rng)
      : X_(X), y_(y), m_(m), max_depth_(max_depth), rng_(rng) {
    mtry_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(X.cols()))));
  }

  Tree build(std::vector<long> sample) {
    Tree tree;
    grow(tree, std::move(sample), 0);
    return tree;
  }

 private:
  int leaf(Tree& tree, const std::vector<long>& idx) {
    std::vector<long> counts(static_cast<std::size_t>(m_), 0);
    for (long i : idx) ++counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(i)])];
    int best = 0;
    for (int c = 1; c < m_; ++c)
      if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    TreeNode node;
    node.leaf_class = best;
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int grow(Tree& tree, std::vector<long> idx, int depth) {
    bool pure = true;
    for (std::size_t i = 1; i < idx.size(); ++i) {
      if (y_[static_cast<std::size_t>(idx[i])] != y_[static_cast<std::size_t>(idx[0])]) {
        pure = false;
        break;
      }
    }
    if (pure || idx.size() < 2 || depth >= max_depth_) return leaf(tree, idx);

    // visit features in a seeded shuffled order; give up after mtry
    // candidates that actually admit a split, falling back to the rest so
    // distinct points are always separated eventually
    std::vector<int> feature_order(static_cast<std::size_t>(X_.cols()));
    std::iota(feature_order.begin(), feature_order.end(), 0);
    rng_.shuffle(feature_order);

    const long total = static_cast<long>(idx.size());
    std::vector<long> parent_counts(static_cast<std::size_t>(m_), 0);
    for (long i : idx) ++parent_counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(i)])];
    const double parent_impurity = gini(parent_counts, total);

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 1e-12;
    int usable_seen = 0;

    std::vector<std::pair<double, int>> column(idx.size());
    std::vector<long> left_counts(static_cast<std::size_t>(m_), 0);

    for (int feature : feature_order) {
      if (usable_seen >= mtry_ && best_feature >= 0) break;

      for (std::size_t i = 0; i < idx.size(); ++i) {
        column[i] = {X_(idx[i], feature), y_[static_cast<std::size_t>(idx[i])]};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;  // constant here
      ++usable_seen;

      std::fill(left_counts.begin(), left_counts.end(), 0);
      long n_left = 0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        ++left_counts[static_cast<std::size_t>(column[i].second)];
        ++n_left;
        if (column[i].first == column[i + 1].first) continue;

        std::vector<long> right_counts(static_cast<std::size_t>(m_), 0);
        for (int c = 0; c < m_; ++c)
          right_counts[static_cast<std::size_t>(c)] =
              parent_counts[static_cast<std::size_t>(c)] - left_counts[static_cast<std::size_t>(c)];
        const long n_right = total - n_left;
        const double weighted =
            (static_cast<double>(n_left) * gini(left_counts, n_left) +
             static_cast<double>(n_right) * gini(right_counts, n_right)) /
            static_cast<double>(total);
        const double gain = parent_impurity - weighted;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = feature;
          best_threshold = 0.5 * (column[i].first + column[i + 1].first);
        }
      }
    }

    if (best_feature < 0) return leaf(tree, idx);

    std::vector<long> left_idx, right_idx;
    for (long i : idx) {
      (X_(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    if (left_idx.empty() || right_idx.empty()) return leaf(tree, idx);

    const int node_id = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    tree.nodes.push_back(node);
    idx.clear();
    idx.shrink_to_fit();
    const int left = grow(tree, std::move(left_idx), depth + 1);
    const int right = grow(tree, std::move(right_idx), depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left;
    tree.nodes[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }

  const Matrix& X_;
  const std::vector<int>& y_;
  int m_;
  int max_depth_;
  int mtry_;
  Rng rng_;
};

}  // namespace

ForestModel train_random_forest(const Matrix& X, const std::vector<int>& y_local, int m,
                                const RandomForestConfig& cfg, std::uint64_t seed) {
  const long n = static_cast<long>(X.rows());
  const int depth_cap = cfg.max_depth.value_or(std::numeric_limits<int>::max());

  ForestModel model;
  model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t) + 0x9e3779b9ULL));
    std::vector<long> sample;
    sample.reserve(static_cast<std::size_t>(n));
    if (cfg.bootstrap) {
      for (long i = 0; i < n; ++i)
        sample.push_back(static_cast<long>(rng.bounded(static_cast<std::uint64_t>(n))));
    } else {
      sample.resize(static_cast<std::size_t>(n));
      std::iota(sample.begin(), sample.end(), 0L);
    }
    TreeBuilder builder(X, y_local, m, depth_cap, rng);
    model.trees.push_back(builder.build(std::move(sample)));
  }
  return model;
}

}  // namespace stss
