#pragma once

#include <span>

namespace degen {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace degen
