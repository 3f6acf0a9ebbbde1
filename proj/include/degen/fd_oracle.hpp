#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "degen/modal.hpp"

namespace degen {

struct FdProblem {
  double alpha = 0.5;
  double a1 = 0.0;
  double a2 = 0.0;
  double T = 1.0;
  std::size_t mesh = 2000;   // m intervals, nodes x_i = (i/m)^{1/kappa}
  std::size_t steps = 1000;  // Crank-Nicolson steps
  std::size_t store_every = 1;
  std::function<Vec2(double)> y0;
  std::function<double(double)> v;               // boundary control at x = 1, empty = 0
  std::function<Vec2(double, double)> f;          // source f(t, x), empty = 0
};

struct FdSolution {
  std::vector<double> x;
  std::vector<double> t;
  std::vector<std::vector<Vec2>> y;  // y[k][i] at t[k], x[i]

  /// Trapezoid weights of the (nonuniform) mesh.
  std::vector<double> mesh_weights() const;
};

/// Conservative vertex-centred scheme for the lifted system y = u + x^{2-alpha} v(t) e1,
/// Crank-Nicolson in time. Dirichlet at 0 for alpha < 1, zero flux otherwise.
FdSolution fd_reference_solve(const FdProblem& problem);

}  // namespace degen
