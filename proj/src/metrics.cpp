#include "metamat/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace metamat::regress {

double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.empty()) throw std::domain_error("rmse: empty input");
  if (y.size() != yhat.size())
    throw std::domain_error("rmse: length mismatch");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(y.size()));
}

double r2(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw std::domain_error("r2: length mismatch");
  if (y.size() < 2) throw std::domain_error("r2: need at least 2 samples");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    const double d = y[i] - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (!(ss_tot > 0.0))
    throw std::domain_error("r2: ground truth has zero variance");
  return 1.0 - ss_res / ss_tot;
}

Metrics compute_metrics(std::span<const double> y,
                        std::span<const double> yhat) {
  return {rmse(y, yhat), r2(y, yhat), y.size()};
}

}  // namespace metamat::regress
