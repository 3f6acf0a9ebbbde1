#include "degen/nonlinear_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "degen/errors.hpp"

namespace degen {

NonlinearitySpec quadratic_nonlinearity(double c1, double c2) {
  NonlinearitySpec s;
  s.f = [c1, c2](double, double y2) { return Vec2{c1 * y2 * y2, c2 * y2 * y2}; };
  s.C = std::max(std::fabs(c1), std::fabs(c2));
  s.linear = c1 == 0.0 && c2 == 0.0;
  return s;
}

double spot_check_nonlinearity(const NonlinearitySpec& spec, std::size_t samples, unsigned seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y1 = u(rng), y2 = u(rng), z1 = u(rng), z2 = u(rng);
    const Vec2 fy = spec.f(y1, y2), fz = spec.f(z1, z2), f0 = spec.f(y1, 0.0);
    const double bound = spec.C * std::fabs(y2 * y2 - z2 * z2);
    for (int c = 0; c < 2; ++c) {
      worst = std::max(worst, std::fabs(fy[c] - fz[c]) - bound);
      worst = std::max(worst, std::fabs(f0[c]));
    }
  }
  return worst;
}

std::vector<Trajectory> apply_nonlinearity(const NonlinearitySpec& spec, const Basis& basis,
                                           const std::vector<Trajectory>& pieces) {
  std::vector<Trajectory> out;
  out.reserve(pieces.size());
  const std::size_t Q = basis.nodes().size();
  std::vector<double> y1(Q), y2(Q), f1(Q), f2(Q);
  for (const auto& tr : pieces) {
    if (tr.modes != basis.modes()) throw std::invalid_argument("apply_nonlinearity: mode count mismatch");
    Trajectory res(tr.grid, tr.modes, tr.meta);
    if (spec.linear) {
      out.push_back(std::move(res));
      continue;
    }
    for (std::size_t j = 0; j < tr.grid.size(); ++j) {
      std::fill(y1.begin(), y1.end(), 0.0);
      std::fill(y2.begin(), y2.end(), 0.0);
      bool any = false;
      for (std::size_t n = 0; n < tr.modes; ++n) {
        const Vec2& c = tr.at(j, n);
        if (c[0] == 0.0 && c[1] == 0.0) continue;
        any = true;
        for (std::size_t q = 0; q < Q; ++q) {
          const double ph = basis.phi_at_node(n, q);
          y1[q] += c[0] * ph;
          y2[q] += c[1] * ph;
        }
      }
      if (!any) continue;
      for (std::size_t q = 0; q < Q; ++q) {
        const Vec2 v = spec.f(y1[q], y2[q]);
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
          throw std::invalid_argument("apply_nonlinearity: non-finite evaluation");
        f1[q] = v[0];
        f2[q] = v[1];
      }
      const auto p1 = basis.project_values(f1);
      const auto p2 = basis.project_values(f2);
      for (std::size_t n = 0; n < tr.modes; ++n) res.at(j, n) = {p1[n], p2[n]};
    }
    out.push_back(std::move(res));
  }
  return out;
}

double source_difference_F(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b,
                           const WeightSpec& spec) {
  if (a.size() != b.size()) throw std::invalid_argument("source_difference_F: piece count mismatch");
  std::vector<Trajectory> d;
  d.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k].grid == b[k].grid) || a[k].modes != b[k].modes)
      throw std::invalid_argument("source_difference_F: grid mismatch");
    Trajectory t(a[k].grid, a[k].modes, a[k].meta);
    for (std::size_t i = 0; i < t.data.size(); ++i)
      t.data[i] = {a[k].data[i][0] - b[k].data[i][0], a[k].data[i][1] - b[k].data[i][1]};
    d.push_back(std::move(t));
  }
  return source_norm_F(d, spec);
}

FixedPointResult fixed_point_control(const StagedController& ctl, const Basis& basis, const ModalState& y0,
                                     const NonlinearitySpec& spec, const FixedPointOptions& opt) {
  const auto& model = ctl.model();
  if (!ctl.weights().nonlinear_compatible())
    throw std::invalid_argument("fixed_point_control: need 1 < q^2 < 2p/(p+1)");
  if (!spec.f) throw std::invalid_argument("fixed_point_control: missing nonlinearity");
  const auto& lam = model.spectrum.lambda;
  FixedPointResult out;
  auto& tr = out.trace;
  tr.delta = opt.delta;
  tr.smallness = component_norms(y0, lam, 0).hm1 + component_norms(y0, lam, 1).h1;
  if (!(tr.smallness <= opt.delta * (1.0 + 1e-12))) {
    throw std::invalid_argument("fixed_point_control: ||y1^0||_{H^-1} + ||y2^0||_{H^1} = " +
                                std::to_string(tr.smallness) + " exceeds delta");
  }
  const WeightSpec& ws = ctl.weights();

  std::vector<Trajectory> f;  // empty = zero source
  for (std::size_t j = 0; j < std::max<std::size_t>(1, opt.maxit); ++j) {
    StageSource src;
    if (!f.empty()) src = stage_source(f);
    StagedRun run = ctl.run(y0, f.empty() ? nullptr : &src, &basis);
    std::vector<Trajectory> g = apply_nonlinearity(spec, basis, run.pieces);
    const double gF = source_norm_F(g, ws);
    double inc = gF;
    if (!f.empty()) inc = source_difference_F(g, f, ws);
    ++tr.iterations;
    tr.increments.push_back(inc);
    tr.source_norms.push_back(gF);
    if (j == 0) tr.delta_F = 2.0 * gF;
    if (gF > tr.delta_F) tr.ball_ok = false;
    if (j > 0) tr.ratios.push_back(tr.increments[j - 1] > 0.0 ? inc / tr.increments[j - 1] : 0.0);
    if (!std::isfinite(inc)) {
      throw NotContractive("fixed_point_control: increment not finite", opt.delta,
                           std::numeric_limits<double>::infinity());
    }
    const double thresh = std::max(opt.tol, opt.rel_tol * 0.5 * tr.delta_F);
    if (inc <= thresh) {
      tr.converged = true;
      tr.final_residual = inc;
      out.run = std::move(run);
      out.source = f.empty() ? g : std::move(f);
      return out;
    }
    out.source = std::exchange(f, std::move(g));
    out.run = std::move(run);
  }
  const double last = tr.ratios.empty() ? 0.0 : tr.ratios.back();
  if (last >= 1.0) {
    throw NotContractive("fixed_point_control: no contraction after " + std::to_string(tr.iterations) +
                             " iterations, try a smaller delta",
                         opt.delta, last);
  }
  tr.final_residual = tr.increments.back();
  return out;
}

FixedPointResult fixed_point_control(const SystemModel& model, const Basis& basis, const ModalState& y0,
                                     const NonlinearitySpec& spec, double T, const FixedPointOptions& options) {
  return fixed_point_control(StagedController(model, T, options.staged), basis, y0, spec, options);
}

}  // namespace degen
