#pragma once

#include <complex>
#include <optional>

#include "degen/modal.hpp"
#include "degen/spectrum.hpp"

namespace degen {

/// One step of z' = -rate z + g(t) with g linear on the step:
/// z(h) = decay z(0) + w_left g(0) + w_right g(h).
struct BranchStep {
  cplx decay;
  cplx w_left;
  cplx w_right;
};

BranchStep branch_step(cplx rate, double h);

/// Forward modal system y_n' = (A - lambda_n) y_n - d_n v B + f_n, B = e1.
/// v and f are taken piecewise linear between grid nodes and integrated exactly.
Trajectory forward_solve(const SystemModel& model, const ModalState& y0, const ControlSignal* v,
                         const SourceFn* f, const TimeGrid& grid);

/// Backward adjoint phi_n' = (lambda_n - A^T) phi_n - g_n with phi(T) = phi0.
Trajectory adjoint_solve(const SystemModel& model, const ModalState& phi0, const SourceFn* g,
                         const TimeGrid& grid);

struct DualityTerms {
  double control_term = 0.0;   // int v sum_n d_n phi_{n,1} dt
  double terminal_term = 0.0;  // <y(T), phi0>
  double initial_term = 0.0;   // <y0, phi(0)>
  double residual = 0.0;
  double scale = 0.0;

  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// Evaluates control_term + terminal_term - initial_term, which vanishes for exact solutions.
DualityTerms duality_residual(const SystemModel& model, const ModalState& y0, const ControlSignal& v,
                              const ModalState& phi0, const TimeGrid& grid);

/// Tabulated modal source on a grid, piecewise linear in time.
SourceFn tabulated_source(const Trajectory& table);

}  // namespace degen
