#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace metamat::regress {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf: mean target of its rows
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const std::array<double, 3>& x) const;
};

struct ForestConfig {
  int max_depth = 10;
  int n_estimators = 800;
  std::uint64_t seed = 0;
  bool bootstrap = true;  // false: every tree sees the full training set
};

/// Bagged regression trees: axis-aligned splits minimizing the children's
/// summed squared error over all features and midpoints between consecutive
/// distinct values; leaves store the mean target; the forest predicts the
/// mean over trees. Tree t draws its bootstrap sample from a generator
/// seeded by (seed, t), so results are bit-identical for any worker count.
struct ForestModel {
  ForestConfig config;
  std::vector<RegressionTree> trees;

  double predict(const std::array<double, 3>& x) const;
  double tree_prediction(std::size_t t, const std::array<double, 3>& x) const {
    return trees[t].predict(x);
  }
};

ForestModel fit_forest(const std::vector<std::array<double, 3>>& X,
                       const std::vector<double>& y, const ForestConfig& config,
                       unsigned jobs = 1);

}  // namespace metamat::regress
