#include "metamat/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "metamat/parallel.hpp"
#include "metamat/rng.hpp"

namespace metamat::regress {

double RegressionTree::predict(const std::array<double, 3>& x) const {
  int node = 0;
  for (;;) {
    const TreeNode& n = nodes[node];
    if (n.feature < 0) return n.value;
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
}

double ForestModel::predict(const std::array<double, 3>& x) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return sum / static_cast<double>(trees.size());
}

namespace {

struct Builder {
  const std::vector<std::array<double, 3>>& X;
  const std::vector<double>& y;
  int max_depth;
  std::vector<TreeNode> nodes;
  std::vector<std::size_t> rows;  // working row set, partitioned in place

  double mean_of(std::size_t begin, std::size_t end) const {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += y[rows[i]];
    return sum / static_cast<double>(end - begin);
  }

  // Best split of rows[begin, end): minimal SSE_left + SSE_right over all
  // features and midpoints between consecutive distinct values. Ties go to
  // the lowest feature index, then the smallest threshold (iteration order
  // with strict improvement).
  bool best_split(std::size_t begin, std::size_t end, int& feature,
                  double& threshold) const {
    const std::size_t m = end - begin;
    double total = 0.0, total_sq = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      total += y[rows[i]];
      total_sq += y[rows[i]] * y[rows[i]];
    }

    double best = std::numeric_limits<double>::infinity();
    feature = -1;
    std::vector<std::size_t> sorted(rows.begin() + begin, rows.begin() + end);
    for (int f = 0; f < 3; ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return X[a][f] < X[b][f];
      });
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t k = 0; k + 1 < m; ++k) {
        const std::size_t row = sorted[k];
        left_sum += y[row];
        left_sq += y[row] * y[row];
        const double here = X[row][f];
        const double next = X[sorted[k + 1]][f];
        if (!(here < next)) continue;  // split only between distinct values
        const double nl = static_cast<double>(k + 1);
        const double nr = static_cast<double>(m - k - 1);
        const double right_sum = total - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / nl) +
                           (right_sq - right_sum * right_sum / nr);
        if (sse < best) {
          best = sse;
          feature = f;
          threshold = 0.5 * (here + next);
        }
      }
    }
    return feature >= 0;
  }

  int build(std::size_t begin, std::size_t end, int depth) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[index].value = mean_of(begin, end);

    if (end - begin < 2 || depth >= max_depth) return index;
    bool constant = true;
    for (std::size_t i = begin + 1; i < end && constant; ++i)
      constant = y[rows[i]] == y[rows[begin]];
    if (constant) return index;

    int feature = -1;
    double threshold = 0.0;
    if (!best_split(begin, end, feature, threshold)) return index;

    const auto mid_it = std::partition(
        rows.begin() + begin, rows.begin() + end,
        [&](std::size_t r) { return X[r][feature] < threshold; });
    const std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());

    nodes[index].feature = feature;
    nodes[index].threshold = threshold;
    const int left = build(begin, mid, depth + 1);
    nodes[index].left = left;
    const int right = build(mid, end, depth + 1);
    nodes[index].right = right;
    return index;
  }
};

RegressionTree fit_tree(const std::vector<std::array<double, 3>>& X,
                        const std::vector<double>& y,
                        std::vector<std::size_t> rows, int max_depth) {
  Builder builder{X, y, max_depth, {}, std::move(rows)};
  builder.nodes.reserve(64);
  builder.build(0, builder.rows.size(), 0);
  RegressionTree tree;
  tree.nodes = std::move(builder.nodes);
  return tree;
}

}  // namespace

ForestModel fit_forest(const std::vector<std::array<double, 3>>& X,
                       const std::vector<double>& y,
                       const ForestConfig& config, unsigned jobs) {
  if (X.empty() || X.size() != y.size())
    throw std::domain_error("fit_forest: bad training data");
  if (config.max_depth < 1)
    throw std::domain_error("fit_forest: max_depth must be >= 1");
  if (config.n_estimators < 1)
    throw std::domain_error("fit_forest: n_estimators must be >= 1");

  ForestModel model;
  model.config = config;
  model.trees.resize(static_cast<std::size_t>(config.n_estimators));

  const std::size_t n = X.size();
  parallel_for(model.trees.size(), jobs, [&](std::size_t t) {
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      Rng rng(mix_seed(config.seed, t));
      for (std::size_t i = 0; i < n; ++i)
        rows[i] = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    model.trees[t] = fit_tree(X, y, std::move(rows), config.max_depth);
  });
  return model;
}

}  // namespace metamat::regress
