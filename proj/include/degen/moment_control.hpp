#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "degen/biorthogonal.hpp"
#include "degen/fit.hpp"
#include "degen/modal.hpp"
#include "degen/spectrum.hpp"

namespace degen {

/// Targets of the moment problem, one per merged exponent (same order as lambda_sequence).
///   C    = e^{-lambda^(i) T} <y0, Psi_n^(i)> / d_n
///   Chat = e^{ lambda^(i) T / 2} C
/// where lambda^(i) = lambda_n - mu_i and <y0, Psi_n^(i)> = V_i . y0_n.
struct MomentData {
  std::vector<MergedExponent> merged;
  std::vector<cplx> C;
  std::vector<cplx> Chat;
  cplx shift;  // mu_2
  double T = 0.0;
};

MomentData moment_coefficients(const SystemModel& model, const ModalState& y0, double T);

struct SynthesisOptions {
  int precision_bits = 256;
  int max_bits = 1024;
  bool discrete_refinement = true;
};

struct SynthesisResult {
  ControlSignal control;
  MomentData moments;
  double horizon_used = 0.0;
  int precision_bits = 0;
  double log10_condition = 0.0;
  double biorth_residual = 0.0;
  double imag_ratio = 0.0;         // max |Im v| / max |v| before discarding
  double moment_defect_raw = 0.0;  // max |int v e^{-lambda^(i)(T-t)} - C| of the sampled series
  double moment_defect = 0.0;      // same after the discrete correction
  /// max over moments of |defect| / sum_j |w_j v_j|, the rounding scale of the quadrature sum
  double moment_defect_rel = 0.0;
  double correction_ratio = 0.0;   // ||dv|| / ||v||
  double tail_bound = 0.0;         // e^{-(lambda_{N+1} - max Re mu) T}
};

namespace detail {
struct RefinementStore;
}

/// Synthesizes null controls for one (model, horizon, grid). The biorthogonal family
/// and the discrete moment operator are built once and reused for every y0.
class MomentController {
 public:
  MomentController(const SystemModel& model, double T, std::size_t steps, SynthesisOptions options = {});

  /// Control on [t0, t0 + T] steering y0 to zero at t0 + T.
  SynthesisResult synthesize(const ModalState& y0, double t0 = 0.0) const;

  const BiorthFamily& family() const { return family_; }
  const SystemModel& model() const { return model_; }
  double horizon() const { return T_; }
  std::size_t steps() const { return steps_; }

  /// Exact moments int v e^{-lambda^(i)(T - t)} dt of a piecewise-linear control on this grid,
  /// indexed like MomentData.
  std::vector<cplx> discrete_moments(const ControlSignal& v) const;
  /// sum_j |w_j v_j| for each moment, the magnitude scale of discrete_moments.
  std::vector<double> discrete_moment_scale(const ControlSignal& v) const;

 private:
  SystemModel model_;
  double T_ = 0.0;
  std::size_t steps_ = 0;
  SynthesisOptions options_;
  std::vector<MergedExponent> merged_;
  BiorthFamily family_;
  std::shared_ptr<const detail::RefinementStore> refine_;
};

/// One-shot synthesis on [0, T] with `steps` uniform steps.
SynthesisResult synthesize_control(const SystemModel& model, const ModalState& y0, double T, std::size_t steps,
                                   const SynthesisOptions& options = {});

struct CostRow {
  double T = 0.0;
  double K = 0.0;  // max over the ensemble of ||v||_{L2} / ||y0||_{H^-1}
  int precision_bits = 0;
  double log10_condition = 0.0;
  double max_terminal_ratio = 0.0;
};

struct CostScan {
  std::vector<CostRow> rows;
  double C0 = 0.0;
  double M = 0.0;
  double r2 = 0.0;
};

/// K(T) over the ensemble for each horizon, then the fit log K = log C0 + M / T.
/// Horizons are processed by up to `jobs` worker threads; results do not depend on `jobs`.
CostScan control_cost_scan(const SystemModel& model, const std::vector<double>& horizons,
                           const std::vector<ModalState>& ensemble, std::size_t steps,
                           const SynthesisOptions& options = {}, std::size_t jobs = 1);

/// Exact L2 norm of the piecewise-linear interpolant.
double control_l2(const ControlSignal& v);

}  // namespace degen
