#include "metamat/poly.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace metamat::regress {

std::vector<std::array<int, 3>> monomial_exponents(int degree) {
  if (degree < 0) throw std::domain_error("monomial_exponents: degree < 0");
  std::vector<std::array<int, 3>> exps;
  for (int total = 0; total <= degree; ++total)
    for (int i = total; i >= 0; --i)
      for (int j = total - i; j >= 0; --j)
        exps.push_back({i, j, total - i - j});
  return exps;
}

namespace {

double monomial(const std::array<double, 3>& x, const std::array<int, 3>& e) {
  double v = 1.0;
  for (int f = 0; f < 3; ++f)
    for (int p = 0; p < e[f]; ++p) v *= x[f];
  return v;
}

}  // namespace

double PolyLinearModel::predict(const std::array<double, 3>& features) const {
  const auto exps = monomial_exponents(degree);
  double out = 0.0;
  for (std::size_t m = 0; m < exps.size(); ++m)
    out += coefficients[m] * monomial(features, exps[m]);
  return out;
}

PolyLinearModel fit_poly_linear(const std::vector<std::array<double, 3>>& X,
                                const std::vector<double>& y, int degree) {
  if (degree < 1 || degree > 6)
    throw std::domain_error("fit_poly_linear: degree must be in [1, 6]");
  if (X.empty() || X.size() != y.size())
    throw std::domain_error("fit_poly_linear: bad training data");

  const auto exps = monomial_exponents(degree);
  const Eigen::Index rows = static_cast<Eigen::Index>(X.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(exps.size());

  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      A(r, c) = monomial(X[static_cast<std::size_t>(r)],
                         exps[static_cast<std::size_t>(c)]);

  // Equilibrate columns so monomials of wildly different magnitude do not
  // wreck the conditioning; the solution is rescaled back afterwards.
  Eigen::VectorXd scale(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double norm = A.col(c).norm();
    scale(c) = norm > 0.0 ? norm : 1.0;
    A.col(c) /= scale(c);
  }

  Eigen::VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) b(r) = y[static_cast<std::size_t>(r)];

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  const Eigen::VectorXd solution = cod.solve(b);

  PolyLinearModel model;
  model.degree = degree;
  model.rank_deficient = cod.rank() < cols;
  model.coefficients.resize(static_cast<std::size_t>(cols));
  for (Eigen::Index c = 0; c < cols; ++c)
    model.coefficients[static_cast<std::size_t>(c)] = solution(c) / scale(c);
  return model;
}

}  // namespace metamat::regress
