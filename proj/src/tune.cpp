#include "metamat/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "metamat/forest.hpp"
#include "metamat/num_format.hpp"
#include "metamat/parallel.hpp"
#include "metamat/rng.hpp"

namespace metamat::regress {

TuneResult tune_forest(const std::vector<std::array<double, 3>>& X,
                       const std::vector<double>& y,
                       const std::vector<int>& depth_grid,
                       const std::vector<int>& estimator_grid, int folds,
                       std::uint64_t master_seed, unsigned jobs) {
  if (depth_grid.empty() || estimator_grid.empty())
    throw std::domain_error("tune_forest: empty grid");
  if (folds < 2) throw std::domain_error("tune_forest: folds must be >= 2");
  if (X.size() < static_cast<std::size_t>(folds))
    throw std::domain_error("tune_forest: fewer samples than folds");

  std::vector<int> depths = depth_grid;
  std::vector<int> estimators = estimator_grid;
  std::sort(depths.begin(), depths.end());
  std::sort(estimators.begin(), estimators.end());
  const int t_max = estimators.back();

  // Seeded fold assignment, shared by every grid point.
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(master_seed, 0x666f6c64));
  rng.shuffle(order);
  std::vector<int> fold_of(X.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    fold_of[order[i]] = static_cast<int>(i % folds);

  // Pooled squared validation residuals per (depth, fold, estimator count);
  // reduced sequentially afterwards so worker count never changes the sums.
  const std::size_t tasks = depths.size() * folds;
  std::vector<std::vector<double>> partial(
      tasks, std::vector<double>(estimators.size(), 0.0));

  parallel_for(tasks, jobs, [&](std::size_t task) {
    const std::size_t d = task / folds;
    const int fold = static_cast<int>(task % folds);

    std::vector<std::array<double, 3>> x_train;
    std::vector<double> y_train;
    std::vector<std::size_t> val_rows;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (fold_of[i] == fold) {
        val_rows.push_back(i);
      } else {
        x_train.push_back(X[i]);
        y_train.push_back(y[i]);
      }
    }

    ForestConfig config;
    config.max_depth = depths[d];
    config.n_estimators = t_max;
    config.seed = mix_seed(master_seed, d * 1000003 + fold);
    const ForestModel forest = fit_forest(x_train, y_train, config, 1);

    // Tree-count curve from prefix means: the first T trees of this forest
    // are exactly what a T-estimator fit with the same seed would build.
    for (std::size_t row : val_rows) {
      double sum = 0.0;
      std::size_t next = 0;
      for (int t = 0; t < t_max; ++t) {
        sum += forest.tree_prediction(t, X[row]);
        while (next < estimators.size() && estimators[next] == t + 1) {
          const double r = y[row] - sum / (t + 1);
          partial[task][next] += r * r;
          ++next;
        }
      }
    }
  });

  std::vector<std::vector<double>> residual_sq(
      depths.size(), std::vector<double>(estimators.size(), 0.0));
  for (std::size_t task = 0; task < tasks; ++task)
    for (std::size_t e = 0; e < estimators.size(); ++e)
      residual_sq[task / folds][e] += partial[task][e];

  TuneResult result;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < depths.size(); ++d) {
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      const double cv_rmse =
          std::sqrt(residual_sq[d][e] / static_cast<double>(X.size()));
      result.grid.push_back({depths[d], estimators[e], cv_rmse});
      if (cv_rmse < best) {
        best = cv_rmse;
        result.best_depth = depths[d];
        result.best_estimators = estimators[e];
      }
    }
  }
  return result;
}

void write_tune_csv(std::ostream& out, const TuneResult& result) {
  out << "max_depth,n_estimators,cv_rmse\n";
  for (const auto& point : result.grid)
    out << point.max_depth << ',' << point.n_estimators << ','
        << format_double(point.cv_rmse) << '\n';
}

}  // namespace metamat::regress
