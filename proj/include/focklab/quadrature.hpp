#pragma once

#include <vector>

namespace focklab::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule for the weight e^{-x^2} on R. Weights sum to sqrt(pi).
const Rule& gauss_hermite(int n);

/// n-point rule for the weight x^alpha e^{-x} on (0, inf), alpha > -1.
const Rule& gauss_laguerre(int n, double alpha);

/// n-point rule on [-1, 1].
const Rule& gauss_legendre(int n);

}  // namespace focklab::quadrature
