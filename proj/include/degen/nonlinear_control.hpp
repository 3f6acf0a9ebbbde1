#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "degen/basis.hpp"
#include "degen/staged_control.hpp"

namespace degen {

/// Pointwise source f(y1, y2) with |f_i(y) - f_i(z)| <= C |y2^2 - z2^2| and f_i(y1, 0) = 0.
struct NonlinearitySpec {
  std::function<Vec2(double, double)> f;
  double C = 0.0;
  bool linear = false;  // f == 0
};

/// f_i(y) = c_i y2^2.
NonlinearitySpec quadratic_nonlinearity(double c1, double c2);

/// Largest violation of the two structural conditions over random samples in [-amp, amp]^2:
/// max(|f_i(y) - f_i(z)| - C |y2^2 - z2^2|, |f_i(y1, 0)|).
double spot_check_nonlinearity(const NonlinearitySpec& spec, std::size_t samples, unsigned seed, double amp = 1.0);

/// O(f) = f(Y) on the grids of the pieces, projected onto the eigenbasis.
/// Components are reconstructed from the modal sums (no boundary lifting).
std::vector<Trajectory> apply_nonlinearity(const NonlinearitySpec& spec, const Basis& basis,
                                           const std::vector<Trajectory>& pieces);

struct FixedPointTrace {
  std::vector<double> increments;    // ||f^(j+1) - f^(j)||_F
  std::vector<double> ratios;        // increments[j] / increments[j-1]
  std::vector<double> source_norms;  // ||f^(j+1)||_F
  double smallness = 0.0;            // ||y1^0||_{H^-1} + ||y2^0||_{H^1}
  double delta = 0.0;
  double delta_F = 0.0;              // ball radius 2 ||f^(1)||_F
  bool ball_ok = true;
  double final_residual = 0.0;       // ||O(f*) - f*||_F
  std::size_t iterations = 0;        // staged runs performed
  bool converged = false;
};

struct FixedPointOptions {
  StagedOptions staged{};
  double delta = 1e-2;
  double tol = 0.0;       // absolute stop threshold on the increment
  double rel_tol = 1e-8;  // relative to ||f^(1)||_F
  std::size_t maxit = 30;
};

struct FixedPointResult {
  StagedRun run;
  FixedPointTrace trace;
  std::vector<Trajectory> source;  // f* on the stage grids
};

/// Picard iteration f^(0) = 0, f^(j+1) = O(f^(j)), each step a staged run with source f^(j).
/// Throws std::invalid_argument when the data violate the smallness bound, NotContractive when
/// maxit is reached with ratio >= 1 or an increment is not finite.
FixedPointResult fixed_point_control(const SystemModel& model, const Basis& basis, const ModalState& y0,
                                     const NonlinearitySpec& spec, double T, const FixedPointOptions& options);

/// Same, reusing a staged controller (its stage families stay cached across calls).
FixedPointResult fixed_point_control(const StagedController& controller, const Basis& basis, const ModalState& y0,
                                     const NonlinearitySpec& spec, const FixedPointOptions& options);

/// ||a - b||_F for tables on identical grids.
double source_difference_F(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b,
                           const WeightSpec& spec);

}  // namespace degen
