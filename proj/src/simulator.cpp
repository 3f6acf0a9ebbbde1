#include "degen/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace degen {

namespace {

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2.
void phi_functions(cplx z, cplx& p1, cplx& p2) {
  if (std::abs(z) < 0.5) {
    cplx term1 = 1.0, term2 = 0.5;
    p1 = term1;
    p2 = term2;
    for (int k = 1; k < 30; ++k) {
      term1 *= z / static_cast<double>(k + 1);
      term2 *= z / static_cast<double>(k + 2);
      p1 += term1;
      p2 += term2;
      if (std::abs(term1) < 1e-18) break;
    }
    return;
  }
  const cplx ez = std::exp(z);
  p1 = (ez - 1.0) / z;
  p2 = (ez - 1.0 - z) / (z * z);
}

void check_state(const ModalState& s, std::size_t N, const char* what) {
  if (s.size() != N) throw std::invalid_argument(std::string(what) + ": mode count mismatch");
  for (const auto& c : s)
    if (!std::isfinite(c[0]) || !std::isfinite(c[1])) throw std::invalid_argument(std::string(what) + ": non-finite");
}

std::vector<ModalState> sample_source(const SourceFn* f, const TimeGrid& grid, std::size_t N) {
  std::vector<ModalState> out;
  if (!f || !*f) return out;
  out.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ModalState s = (*f)(grid.at(j));
    check_state(s, N, "source");
    out.push_back(std::move(s));
  }
  return out;
}

cplx dot(const CVec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

}  // namespace

BranchStep branch_step(cplx rate, double h) {
  const cplx z = -rate * h;
  cplx p1, p2;
  phi_functions(z, p1, p2);
  return BranchStep{std::exp(z), h * (p1 - p2), h * p2};
}

Trajectory forward_solve(const SystemModel& model, const ModalState& y0, const ControlSignal* v,
                         const SourceFn* f, const TimeGrid& grid) {
  const std::size_t N = model.modes();
  check_state(y0, N, "forward_solve initial state");
  if (v && !(v->grid == grid)) throw std::invalid_argument("forward_solve: control grid mismatch");
  if (v)
    for (double x : v->values)
      if (!std::isfinite(x)) throw std::invalid_argument("forward_solve: non-finite control");
  const auto src = sample_source(f, grid, N);
  const auto& c = model.coupling;
  const auto& s = model.spectrum;
  Trajectory out(grid, N, TrajectoryMeta{s.params.alpha, c.a1, c.a2});
  const double dt = grid.dt();
  for (std::size_t n = 0; n < N; ++n) {
    cplx z[2];
    BranchStep st[2];
    for (int i = 0; i < 2; ++i) {
      z[i] = dot(c.V(i + 1), y0[n]);
      st[i] = branch_step(s.lambda[n] - c.mu(i + 1), dt);
    }
    auto forcing = [&](int i, std::size_t j) {
      cplx g = 0.0;
      if (v) g -= s.flux[n] * v->values[j];
      if (!src.empty()) g += dot(c.V(i + 1), src[j][n]);
      return g;
    };
    out.at(0, n) = y0[n];
    cplx g_prev[2] = {forcing(0, 0), forcing(1, 0)};
    for (std::size_t j = 0; j < grid.steps; ++j) {
      Vec2 y{0.0, 0.0};
      for (int i = 0; i < 2; ++i) {
        const cplx g_next = forcing(i, j + 1);
        z[i] = st[i].decay * z[i] + st[i].w_left * g_prev[i] + st[i].w_right * g_next;
        g_prev[i] = g_next;
        const CVec2& U = c.U(i + 1);
        y[0] += (U[0] * z[i]).real();
        y[1] += (U[1] * z[i]).real();
      }
      out.at(j + 1, n) = y;
    }
  }
  return out;
}

Trajectory adjoint_solve(const SystemModel& model, const ModalState& phi0, const SourceFn* g,
                         const TimeGrid& grid) {
  const std::size_t N = model.modes();
  check_state(phi0, N, "adjoint_solve terminal state");
  const auto src = sample_source(g, grid, N);
  const auto& c = model.coupling;
  const auto& s = model.spectrum;
  Trajectory out(grid, N, TrajectoryMeta{s.params.alpha, c.a1, c.a2});
  const double dt = grid.dt();
  const std::size_t M = grid.steps;
  for (std::size_t n = 0; n < N; ++n) {
    cplx w[2];
    BranchStep st[2];
    for (int i = 0; i < 2; ++i) {
      w[i] = dot(c.U(i + 1), phi0[n]);
      st[i] = branch_step(s.lambda[n] - c.mu(i + 1), dt);
    }
    auto forcing = [&](int i, std::size_t j) { return src.empty() ? cplx(0.0) : dot(c.U(i + 1), src[j][n]); };
    out.at(M, n) = phi0[n];
    for (std::size_t jj = M; jj-- > 0;) {
      Vec2 phi{0.0, 0.0};
      for (int i = 0; i < 2; ++i) {
        w[i] = st[i].decay * w[i] + st[i].w_left * forcing(i, jj + 1) + st[i].w_right * forcing(i, jj);
        const CVec2& V = c.V(i + 1);
        phi[0] += (V[0] * w[i]).real();
        phi[1] += (V[1] * w[i]).real();
      }
      out.at(jj, n) = phi;
    }
  }
  return out;
}

DualityTerms duality_residual(const SystemModel& model, const ModalState& y0, const ControlSignal& v,
                              const ModalState& phi0, const TimeGrid& grid) {
  const auto y = forward_solve(model, y0, &v, nullptr, grid);
  const std::size_t N = model.modes();
  const auto& c = model.coupling;
  const auto& s = model.spectrum;
  const double dt = grid.dt();
  DualityTerms d;
  // The adjoint between nodes is an exact exponential; pair it with the piecewise-linear control.
  for (std::size_t n = 0; n < N; ++n) {
    for (int i = 0; i < 2; ++i) {
      const BranchStep st = branch_step(s.lambda[n] - c.mu(i + 1), dt);
      cplx w = dot(c.U(i + 1), phi0[n]);
      cplx acc = 0.0;
      for (std::size_t jj = grid.steps; jj-- > 0;) {
        acc += w * (st.w_left * v.values[jj] + st.w_right * v.values[jj + 1]);
        w *= st.decay;
      }
      d.control_term += s.flux[n] * (c.V(i + 1)[0] * acc).real();
    }
  }
  const auto phi = adjoint_solve(model, phi0, nullptr, grid);
  const ModalState yT = y.final_state();
  const ModalState p0 = phi.state(0);
  for (std::size_t n = 0; n < N; ++n) {
    d.terminal_term += yT[n][0] * phi0[n][0] + yT[n][1] * phi0[n][1];
    d.initial_term += y0[n][0] * p0[n][0] + y0[n][1] * p0[n][1];
  }
  d.residual = std::fabs(d.control_term + d.terminal_term - d.initial_term);
  d.scale = std::fabs(d.control_term) + std::fabs(d.terminal_term) + std::fabs(d.initial_term);
  return d;
}

SourceFn tabulated_source(const Trajectory& table) {
  return [table](double t) {
    const TimeGrid& g = table.grid;
    const double u = (t - g.t0) / g.dt();
    if (u <= 0.0) return table.state(0);
    if (u >= static_cast<double>(g.steps)) return table.state(g.steps);
    std::size_t j = static_cast<std::size_t>(std::floor(u));
    double w = u - static_cast<double>(j);
    if (w > 1.0 - 1e-9) {
      ++j;
      w = 0.0;
    }
    if (w < 1e-9) return table.state(j);
    ModalState out(table.modes);
    for (std::size_t n = 0; n < table.modes; ++n) {
      const Vec2& a = table.at(j, n);
      const Vec2& b = table.at(j + 1, n);
      out[n] = {(1 - w) * a[0] + w * b[0], (1 - w) * a[1] + w * b[1]};
    }
    return out;
  };
}

}  // namespace degen
