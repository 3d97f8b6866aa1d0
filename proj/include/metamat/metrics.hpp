#pragma once

#include <cstddef>
#include <span>

namespace metamat::regress {

struct Metrics {
  double rmse = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// sqrt(mean squared residual). Throws std::domain_error on empty or
/// mismatched inputs.
double rmse(std::span<const double> y, std::span<const double> yhat);

/// 1 - SS_res / SS_tot. Requires n >= 2 and non-constant ground truth.
double r2(std::span<const double> y, std::span<const double> yhat);

Metrics compute_metrics(std::span<const double> y,
                        std::span<const double> yhat);

}  // namespace metamat::regress
