#pragma once

#include <array>
#include <vector>

namespace metamat::regress {

/// Exponent triples (i, j, k) of every monomial x1^i x2^j x3^k with total
/// degree <= degree: degree ascending, bias first, x1 before x2 before x3.
/// C(degree + 3, 3) entries.
std::vector<std::array<int, 3>> monomial_exponents(int degree);

/// Least-squares polynomial model over the full monomial basis of the three
/// ratio features. Coefficients live in raw feature space.
struct PolyLinearModel {
  int degree = 1;
  std::vector<double> coefficients;  // aligned with monomial_exponents(degree)
  bool rank_deficient = false;       // minimum-norm solution was taken

  double predict(const std::array<double, 3>& features) const;
};

/// Solves min ||A c - y|| over the monomial design matrix with a
/// rank-revealing orthogonal decomposition (columns equilibrated first, so
/// wildly scaled monomials stay numerically benign). Rank-deficient designs
/// get the minimum-norm solution and are flagged. degree must be in [1, 6].
PolyLinearModel fit_poly_linear(const std::vector<std::array<double, 3>>& X,
                                const std::vector<double>& y, int degree);

}  // namespace metamat::regress
