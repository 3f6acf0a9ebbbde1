#pragma once

#include <cstddef>
#include <vector>

/// Bessel functions of the first kind for real order nu >= 0 and their zeros.
namespace degen::bessel {

/// Arguments up to this value use the quad-precision power series.
inline constexpr double kSeriesLimit = 40.0;

double eval_j(double nu, double x);
double eval_j_prime(double nu, double x);

/// Power series, summed in __float128. Exposed for cross-checks.
double eval_j_series(double nu, double x);
/// Hankel large-argument expansion, truncated at its smallest term.
double eval_j_hankel(double nu, double x);

struct ZeroBracket {
  double lo;
  double hi;
};

/// Closed-form enclosure of j_{nu,n}; orientation flips at nu = 1/2.
ZeroBracket zero_bracket(double nu, std::size_t n);

struct BesselZeroTable {
  double nu = 0.0;
  std::vector<double> zeros;
  std::vector<double> derivative_values;
};

BesselZeroTable zeros(double nu, std::size_t count);

}  // namespace degen::bessel
