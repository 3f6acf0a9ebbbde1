#include "degen/staged_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "degen/errors.hpp"
#include "degen/simulator.hpp"

namespace degen {

namespace {

bool all_zero(const ModalState& s) {
  for (const auto& c : s)
    if (c[0] != 0.0 || c[1] != 0.0) return false;
  return true;
}

ModalState difference(const ModalState& a, const ModalState& b) {
  ModalState d(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) d[n] = {a[n][0] - b[n][0], a[n][1] - b[n][1]};
  return d;
}

Trajectory tabulate(const StageSource* f, std::size_t k, const TimeGrid& g, const SystemModel& m) {
  Trajectory tab(g, m.modes(), TrajectoryMeta{m.alpha(), m.coupling.a1, m.coupling.a2});
  if (!f || !*f) return tab;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const ModalState s = (*f)(k, g.at(j));
    if (s.size() != m.modes()) throw std::invalid_argument("staged source: mode count mismatch");
    for (std::size_t n = 0; n < m.modes(); ++n) {
      if (!std::isfinite(s[n][0]) || !std::isfinite(s[n][1]))
        throw std::invalid_argument("staged source: non-finite value");
      tab.at(j, n) = s[n];
    }
  }
  return tab;
}

double modal_l2_over_time(const Trajectory& tr) {
  const auto m = midpoint_samples(std::span<const Trajectory>(&tr, 1), -1);
  double acc = 0.0;
  for (std::size_t j = 0; j < m.t.size(); ++j) acc += m.width[j] * m.sq[j];
  return std::sqrt(acc);
}

}  // namespace

StagePlan stage_grid(double T, double q, double dt) {
  if (!(q > 1.0)) throw std::invalid_argument("stage_grid: q must exceed 1");
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("stage_grid: T and dt must be positive");
  StagePlan plan;
  plan.T = T;
  plan.q = q;
  plan.dt = dt;
  plan.times.push_back(0.0);
  for (std::size_t k = 1;; ++k) {
    const double rem = T / std::pow(q, static_cast<double>(k));
    plan.times.push_back(T - rem);
    if (rem < dt) {
      plan.K = k;
      break;
    }
    if (k > 100000) throw std::invalid_argument("stage_grid: too many stages");
  }
  return plan;
}

StageSource stage_source(SourceFn f) {
  return [f = std::move(f)](std::size_t, double t) { return f(t); };
}

StageSource stage_source(std::vector<Trajectory> tables) {
  std::vector<SourceFn> fns;
  fns.reserve(tables.size());
  for (auto& t : tables) fns.push_back(tabulated_source(t));
  return [fns = std::move(fns)](std::size_t k, double t) { return fns.at(k)(t); };
}

double weight_link_residual(const WeightSpec& spec, std::size_t kmax) {
  spec.validate();
  auto Tk = [&](std::size_t k) { return spec.T - spec.T / std::pow(spec.q, static_cast<double>(k)); };
  double worst = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    const double lhs = log_weight_rho_tail(Tk(k + 2), spec, WeightKind::Rho0);
    const double rhs = log_weight_rho_tail(Tk(k), spec, WeightKind::RhoF) + spec.M / (Tk(k + 2) - Tk(k + 1));
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

StagedController::StagedController(const SystemModel& model, double T, StagedOptions options)
    : model_(model), options_(options) {
  if (!(options.M > 0.0)) throw std::invalid_argument("StagedController: weight constant M must be positive");
  weights_ = WeightSpec{T, options.p, options.q, options.M};
  weights_.validate();
  plan_ = stage_grid(T, options.q, options.dt);
  cache_.resize(plan_.K);
}

const MomentController& StagedController::controller(std::size_t k) const {
  if (!cache_[k]) {
    try {
      cache_[k] = std::make_unique<MomentController>(model_, plan_.horizon(k), options_.steps_per_stage,
                                                     options_.synthesis);
    } catch (const PrecisionExhausted& e) {
      throw PrecisionExhausted(std::string(e.what()) + " (stage " + std::to_string(k) + ")", e.precision_bits,
                               e.suggested_bits, static_cast<int>(k));
    }
  }
  return *cache_[k];
}

StagedRun StagedController::run(const ModalState& y0, const StageSource* f, const Basis* basis) const {
  const std::size_t N = model_.modes();
  if (y0.size() != N) throw std::invalid_argument("staged run: mode count mismatch");
  const auto& lam = model_.spectrum.lambda;
  const std::size_t S = options_.steps_per_stage;
  StagedRun out;
  out.plan = plan_;
  out.weights = weights_;
  const TrajectoryMeta meta{model_.alpha(), model_.coupling.a1, model_.coupling.a2};
  const ModalState zero(N, Vec2{0.0, 0.0});

  ModalState a = y0;
  out.node_hm1.push_back(hm1_norm(y0, lam));
  for (std::size_t k = 0; k < plan_.K; ++k) {
    const double t0 = plan_.times[k], t1 = plan_.times[k + 1];
    if (S < 4) throw StageTooShort("fewer than 4 steps per stage", static_cast<int>(k));
    if ((t1 - t0) / static_cast<double>(S) < options_.min_step)
      throw StageTooShort("stage " + std::to_string(k) + " step below the minimum", static_cast<int>(k));
    const TimeGrid g(t0, t1, S);
    Trajectory src = tabulate(f, k, g, model_);
    const SourceFn sf = tabulated_source(src);
    const Trajectory free = forward_solve(model_, zero, nullptr, f ? &sf : nullptr, g);

    StageCertificate cert;
    cert.k = k;
    cert.t0 = t0;
    cert.t1 = t1;
    cert.start_hm1 = hm1_norm(a, lam);
    Trajectory ctl_part(g, N, meta);
    ControlSignal v(g);
    if (all_zero(a)) {
      cert.skipped = true;
    } else {
      const MomentController& ctl = controller(k);
      SynthesisResult res = ctl.synthesize(a, t0);
      cert.precision_bits = res.precision_bits;
      cert.log10_condition = res.log10_condition;
      cert.moment_defect = res.moment_defect;
      cert.correction_ratio = res.correction_ratio;
      v = ControlSignal(g, std::move(res.control.values));
      ctl_part = forward_solve(model_, a, &v, nullptr, g);
    }
    Trajectory Y(g, N, meta);
    for (std::size_t i = 0; i < Y.data.size(); ++i)
      Y.data[i] = {free.data[i][0] + ctl_part.data[i][0], free.data[i][1] + ctl_part.data[i][1]};

    ModalState next = free.final_state();
    const ModalState left = Y.final_state();
    cert.end_hm1 = hm1_norm(left, lam);
    cert.continuity = std::sqrt(l2_norm_sq(difference(left, next)));
    cert.control_l2 = control_l2(v);
    cert.state_l2 = modal_l2_over_time(Y);
    {
      const auto m = midpoint_samples(std::span<const Trajectory>(&src, 1), -1);
      cert.source_weighted = weighted_l2(m.t, m.width, m.sq, weights_, WeightKind::RhoF);
    }
    out.max_continuity = std::max(out.max_continuity, cert.continuity);
    out.node_hm1.push_back(std::max(cert.end_hm1, hm1_norm(next, lam)));
    out.stages.push_back(cert);
    out.controls.push_back(std::move(v));
    out.pieces.push_back(std::move(Y));
    out.sources.push_back(std::move(src));
    a = std::move(next);
  }

  // Free tail on [T_K, T] from a_K.
  const double tK = plan_.times[plan_.K];
  const TimeGrid tail(tK, plan_.T, S);
  Trajectory src = tabulate(f, plan_.K, tail, model_);
  const SourceFn sf = tabulated_source(src);
  Trajectory Yt = forward_solve(model_, a, nullptr, f ? &sf : nullptr, tail);
  out.terminal_hm1 = hm1_norm(Yt.final_state(), lam);
  out.controls.emplace_back(tail);
  out.pieces.push_back(std::move(Yt));
  out.sources.push_back(std::move(src));
  out.tail_bound = std::exp(-lam[0] * (plan_.T - tK));

  // Replay: one pass carrying the state across stage boundaries.
  ModalState s = y0;
  for (std::size_t k = 0; k < out.pieces.size(); ++k) {
    const SourceFn rf = tabulated_source(out.sources[k]);
    const Trajectory tr = forward_solve(model_, s, &out.controls[k], f ? &rf : nullptr, out.controls[k].grid);
    s = tr.final_state();
  }
  out.replay_terminal_hm1 = hm1_norm(s, lam);

  out.norm_F = source_norm_F(out.sources, weights_);
  out.norm_V = control_norm_V(out.controls, weights_);
  out.norm_H0 = state_norm_H0(out.pieces, weights_);
  if (basis) {
    std::vector<double> xs(201);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / 200.0;
    out.norm_H = state_norm_H(out.pieces, *basis, basis->table(xs), weights_);
  }
  out.scale = hm1_norm(y0, lam) + out.norm_F;
  out.link_residual = weight_link_residual(weights_);
  return out;
}

SourceFn weighted_bump_source(const WeightSpec& spec, ModalState profile) {
  spec.validate();
  return [spec, profile = std::move(profile)](double t) {
    const double s = std::sin(std::numbers::pi * t / spec.T);
    const double w = weight_rho(std::min(t, spec.T), spec, WeightKind::RhoF) * s * s;
    ModalState out(profile.size());
    for (std::size_t n = 0; n < profile.size(); ++n) out[n] = {w * profile[n][0], w * profile[n][1]};
    return out;
  };
}

StagedRun nonhomogeneous_null_control(const SystemModel& model, const ModalState& y0, const StageSource* f,
                                      double T, const StagedOptions& options, const Basis* basis) {
  return StagedController(model, T, options).run(y0, f, basis);
}

std::vector<StageReportRow> stage_report(const StagedRun& run) {
  std::vector<StageReportRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < run.stages.size(); ++k) {
    const auto& c = run.stages[k];
    StageReportRow r;
    r.k = k;
    r.control_l2 = c.control_l2;
    r.state_l2 = c.state_l2;
    r.source_prev = k > 0 ? run.stages[k - 1].source_weighted : nan;
    r.ratio = nan;
    if (k > 0 && r.source_prev > 0.0 && c.control_l2 > 0.0) {
      const double lw = log_weight_rho(std::min(c.t1, run.weights.T), run.weights, WeightKind::Rho0);
      r.ratio = std::exp(std::log(c.control_l2) - lw - std::log(r.source_prev));
    } else if (k > 0 && c.control_l2 == 0.0) {
      r.ratio = 0.0;
    }
    r.breaks_decay = k >= 1 && run.node_hm1[k + 1] > run.node_hm1[k];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace degen
