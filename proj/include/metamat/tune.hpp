#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace metamat::regress {

struct TunePoint {
  int max_depth = 0;
  int n_estimators = 0;
  double cv_rmse = 0.0;
};

struct TuneResult {
  std::vector<TunePoint> grid;  // all (depth, estimators) combos evaluated
  int best_depth = 0;
  int best_estimators = 0;
};

/// k-fold cross-validated forest RMSE over the (depth, estimator) grid.
/// Fold assignment is a seeded shuffle; per-tree seeds depend only on
/// (master_seed, depth index, fold, tree), so larger estimator counts reuse
/// the smaller forests as prefixes and the whole sweep is deterministic.
/// Best = argmin RMSE, ties broken toward smaller depth, then fewer trees.
TuneResult tune_forest(const std::vector<std::array<double, 3>>& X,
                       const std::vector<double>& y,
                       const std::vector<int>& depth_grid,
                       const std::vector<int>& estimator_grid, int folds,
                       std::uint64_t master_seed, unsigned jobs = 1);

/// CSV rows `max_depth,n_estimators,cv_rmse`, plot-ready for the loss-vs-
/// depth and loss-vs-trees curves.
void write_tune_csv(std::ostream& out, const TuneResult& result);

}  // namespace metamat::regress
