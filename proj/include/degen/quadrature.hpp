#pragma once

#include <cstddef>
#include <vector>

namespace degen {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a = 0.0, double b = 1.0);

}  // namespace degen
