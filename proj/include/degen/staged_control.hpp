#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "degen/basis.hpp"
#include "degen/modal.hpp"
#include "degen/moment_control.hpp"
#include "degen/spaces.hpp"
#include "degen/spectrum.hpp"

namespace degen {

/// T_k = T - T / q^k, k = 0..K, with K the first index such that T - T_K < dt.
struct StagePlan {
  double T = 0.0;
  double q = 0.0;
  double dt = 0.0;
  std::size_t K = 0;
  std::vector<double> times;  // T_0 .. T_K

  double horizon(std::size_t k) const { return times.at(k + 1) - times.at(k); }
};

StagePlan stage_grid(double T, double q, double dt);

/// Source term evaluated on stage k at time t. Stage K denotes the free tail [T_K, T].
using StageSource = std::function<ModalState(std::size_t stage, double t)>;

StageSource stage_source(SourceFn f);
/// Piecewise-linear lookup into one table per stage (tables must cover the stage grids).
StageSource stage_source(std::vector<Trajectory> tables);

struct StagedOptions {
  double p = 3.0;
  double q = 1.2;
  double M = 0.0;  // cost exponent of the weights; must be positive
  double dt = 1e-3;
  std::size_t steps_per_stage = 400;
  double min_step = 1e-9;  // smallest admissible time step inside a stage
  SynthesisOptions synthesis{};
};

struct StageCertificate {
  std::size_t k = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  bool skipped = false;  // a_k = 0, no control needed
  int precision_bits = 0;
  double log10_condition = 0.0;
  double start_hm1 = 0.0;   // ||a_k||_{H^-1} = ||Y(T_k^+)||
  double end_hm1 = 0.0;     // ||Y(T_{k+1}^-)||
  double continuity = 0.0;  // ||Y(T_{k+1}^-) - Y(T_{k+1}^+)||_{L2}
  double moment_defect = 0.0;
  double correction_ratio = 0.0;
  double control_l2 = 0.0;
  double state_l2 = 0.0;        // L2 over the stage of the modal coefficients
  double source_weighted = 0.0; // ||f / rho_F||_{L2(T_k, T_{k+1})}
};

struct StagedRun {
  StagePlan plan;
  WeightSpec weights;
  std::vector<ControlSignal> controls;  // K stages plus the zero tail
  std::vector<Trajectory> pieces;       // Y on each stage plus the tail
  std::vector<Trajectory> sources;      // f tabulated on the same grids
  std::vector<StageCertificate> stages;
  double scale = 0.0;                   // ||y0||_{H^-1} + ||f||_F
  double terminal_hm1 = 0.0;            // ||Y(T)||_{H^-1}
  double replay_terminal_hm1 = 0.0;     // one forward pass with the concatenated control
  double max_continuity = 0.0;
  double link_residual = 0.0;           // max_k |log rho_0(T_{k+2}) - log rho_F(T_k) - M/(T_{k+2}-T_{k+1})|, k = 0..5
  double tail_bound = 0.0;              // e^{-lambda_1 (T - T_K)}
  double norm_F = 0.0;
  double norm_V = 0.0;
  double norm_H0 = 0.0;
  double norm_H = -1.0;                 // only with a basis
  /// ||Y(T_k)||_{H^-1}, k = 0..K, taking the larger one-sided value at interior nodes.
  std::vector<double> node_hm1;
};

/// Stage loop of the nonhomogeneous null control. Per-stage moment controllers are built on
/// first use and reused by later runs (the Picard loop calls run() repeatedly).
class StagedController {
 public:
  StagedController(const SystemModel& model, double T, StagedOptions options);

  StagedRun run(const ModalState& y0, const StageSource* f, const Basis* basis = nullptr) const;

  const StagePlan& plan() const { return plan_; }
  const WeightSpec& weights() const { return weights_; }
  const SystemModel& model() const { return model_; }
  const StagedOptions& options() const { return options_; }

 private:
  const MomentController& controller(std::size_t k) const;

  SystemModel model_;
  StagedOptions options_;
  StagePlan plan_;
  WeightSpec weights_;
  mutable std::vector<std::unique_ptr<MomentController>> cache_;
};

/// f(t) = rho_F(t) sin^2(pi t / T) profile, a source inside the weighted space by construction.
SourceFn weighted_bump_source(const WeightSpec& spec, ModalState profile);

StagedRun nonhomogeneous_null_control(const SystemModel& model, const ModalState& y0, const StageSource* f,
                                      double T, const StagedOptions& options, const Basis* basis = nullptr);

struct StageReportRow {
  std::size_t k = 0;
  double control_l2 = 0.0;
  double state_l2 = 0.0;
  double source_prev = 0.0;  // ||f / rho_F|| on stage k-1
  /// ||v_k|| / (rho_0(T_{k+1}) ||f / rho_F||_{k-1}); NaN when undefined.
  double ratio = 0.0;
  bool breaks_decay = false;  // ||Y(T_{k+1})|| > ||Y(T_k)|| for k >= 1
};

std::vector<StageReportRow> stage_report(const StagedRun& run);

/// Link identity residual on the unclamped tail weights for k = 0..kmax.
double weight_link_residual(const WeightSpec& spec, std::size_t kmax = 5);

}  // namespace degen
