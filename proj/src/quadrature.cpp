#include "degen/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>


namespace degen {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    long double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = 0.0L;
      for (std::size_t k = 1; k <= n; ++k) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * k - 1.0L) * z * p1 - (k - 1.0L) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0L);
      const long double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    const double w = static_cast<double>(2.0L / ((1.0L - z * z) * dp * dp));
    rule.nodes[i] = mid - half * static_cast<double>(z);
    rule.nodes[n - 1 - i] = mid + half * static_cast<double>(z);
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

}  // namespace degen
