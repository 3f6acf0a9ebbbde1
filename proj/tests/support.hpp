#pragma once

// Shared helpers for the unit tests and the acceptance binary.

#include <cmath>
#include <functional>
#include <vector>

#include "degen/basis.hpp"
#include "degen/fd_oracle.hpp"
#include "degen/simulator.hpp"
#include "degen/spectrum.hpp"

namespace degen::xcheck {

struct CrossCheck {
  double rel_l2 = 0.0;  // ||y_spec - y_fd||_{L2(Q_T)} / ||y_fd||_{L2(Q_T)}
  double fd_norm = 0.0;
};

/// Spectral forward solve (N modes, lifted reconstruction) against the finite-difference
/// oracle on an m-interval graded mesh. y0 = (c0 Phi_1 + c1 Phi_2, c2 Phi_1).
inline CrossCheck spectral_vs_fd(double alpha, double a1, double a2, std::size_t N, std::size_t mesh, double T,
                                 std::size_t steps, const std::function<double(double)>& v) {
  const SystemModel model = make_model(alpha, a1, a2, N);
  const Basis basis(model.spectrum);
  const auto& spec = model.spectrum;
  const double c0 = 1.0, c1 = 0.5, c2 = 0.3;
  ModalState y0(N, Vec2{0.0, 0.0});
  y0[0] = {c0, c2};
  if (N > 1) y0[1] = {c1, 0.0};

  const TimeGrid grid(0.0, T, steps);
  ControlSignal ctl(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) ctl.values[j] = v ? v(grid.at(j)) : 0.0;
  const Trajectory tr = forward_solve(model, y0, &ctl, nullptr, grid);

  FdProblem pb;
  pb.alpha = alpha;
  pb.a1 = a1;
  pb.a2 = a2;
  pb.T = T;
  pb.mesh = mesh;
  pb.steps = steps;
  pb.y0 = [&](double x) {
    return Vec2{c0 * eigenfunction(spec, 0, x) + c1 * eigenfunction(spec, 1, x), c2 * eigenfunction(spec, 0, x)};
  };
  pb.v = v;
  const FdSolution fd = fd_reference_solve(pb);
  const auto w = fd.mesh_weights();
  const PointTable table = basis.table(fd.x);

  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < fd.t.size(); ++k) {
    const double wt = (k == 0 || k + 1 == fd.t.size()) ? 0.5 : 1.0;
    const ModalState s = tr.state(k);
    const double vb = ctl.values[k];
    const auto y1 = basis.reconstruct(table, s, 0, vb, true);
    const auto y2 = basis.reconstruct(table, s, 1, 0.0, true);
    for (std::size_t i = 0; i < fd.x.size(); ++i) {
      const double d0 = y1[i] - fd.y[k][i][0], d1 = y2[i] - fd.y[k][i][1];
      num += wt * w[i] * (d0 * d0 + d1 * d1);
      den += wt * w[i] * (fd.y[k][i][0] * fd.y[k][i][0] + fd.y[k][i][1] * fd.y[k][i][1]);
    }
  }
  return {std::sqrt(num / den), std::sqrt(den * T / static_cast<double>(steps))};
}

}  // namespace degen::xcheck
