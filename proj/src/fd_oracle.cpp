#include "degen/fd_oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace degen {

std::vector<double> FdSolution::mesh_weights() const {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

FdSolution fd_reference_solve(const FdProblem& pb) {
  if (pb.mesh < 64) throw std::invalid_argument("fd_reference_solve: mesh too coarse (m < 64)");
  if (!(pb.alpha >= 0.0 && pb.alpha < 2.0)) throw std::invalid_argument("fd_reference_solve: alpha outside [0, 2)");
  if (pb.steps == 0 || !(pb.T > 0.0)) throw std::invalid_argument("fd_reference_solve: bad time grid");
  if (!pb.y0) throw std::invalid_argument("fd_reference_solve: missing initial data");
  const std::size_t m = pb.mesh;
  const double alpha = pb.alpha;
  const double kappa = (2.0 - alpha) / 2.0;
  const bool weak = alpha < 1.0;

  std::vector<double> x(m + 1);
  for (std::size_t i = 0; i <= m; ++i) x[i] = std::pow(static_cast<double>(i) / static_cast<double>(m), 1.0 / kappa);
  x[m] = 1.0;
  std::vector<double> prof(m + 1);
  for (std::size_t i = 0; i <= m; ++i) prof[i] = std::pow(x[i], 2.0 - alpha);

  // Flux coefficients k_i, flux = k_i (y_{i+1} - y_i). WD: 1 / int x^{-alpha}, exact for constant flux and so for the
  // x^{1-alpha} behaviour at 0. SD: cell average of x^alpha (the harmonic form vanishes on the first cell).
  std::vector<double> face(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double h = x[i + 1] - x[i];
    if (weak) {
      face[i] = (1.0 - alpha) / (std::pow(x[i + 1], 1.0 - alpha) - std::pow(x[i], 1.0 - alpha));
    } else {
      face[i] = (std::pow(x[i + 1], alpha + 1.0) - std::pow(x[i], alpha + 1.0)) / ((alpha + 1.0) * h) / h;
    }
  }
  const std::size_t first = weak ? 1 : 0;
  const std::size_t n_nodes = m - first;  // unknown nodes first..m-1
  auto idx = [&](std::size_t i, int c) { return static_cast<int>(2 * (i - first) + c); };

  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = first; i < m; ++i) {
    const double left = i == 0 ? 0.0 : 0.5 * (x[i] - x[i - 1]);
    const double vol = left + 0.5 * (x[i + 1] - x[i]);
    const double fr = face[i] / vol;
    const double fl = i == 0 ? 0.0 : face[i - 1] / vol;
    for (int c = 0; c < 2; ++c) {
      trip.emplace_back(idx(i, c), idx(i, c), -(fr + fl));
      if (i + 1 < m) trip.emplace_back(idx(i, c), idx(i + 1, c), fr);
      if (i > first) trip.emplace_back(idx(i, c), idx(i - 1, c), fl);
    }
    // Coupling A = [[0, a1], [1, a2]].
    trip.emplace_back(idx(i, 0), idx(i, 1), pb.a1);
    trip.emplace_back(idx(i, 1), idx(i, 0), 1.0);
    trip.emplace_back(idx(i, 1), idx(i, 1), pb.a2);
  }
  const int dim = static_cast<int>(2 * n_nodes);
  Eigen::SparseMatrix<double> L(dim, dim);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> I(dim, dim);
  I.setIdentity();
  const double dt = pb.T / static_cast<double>(pb.steps);
  Eigen::SparseMatrix<double> lhs = I - 0.5 * dt * L;
  Eigen::SparseMatrix<double> rhs_op = I + 0.5 * dt * L;
  lhs.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) throw std::runtime_error("fd_reference_solve: factorisation failed");

  auto vfun = [&](double t) { return pb.v ? pb.v(t) : 0.0; };
  auto vdot = [&](std::size_t k) {
    const auto K = pb.steps;
    auto vt = [&](std::size_t j) { return vfun(static_cast<double>(j) * dt); };
    if (K < 2) return (vt(1) - vt(0)) / dt;
    if (k == 0) return (-3.0 * vt(0) + 4.0 * vt(1) - vt(2)) / (2.0 * dt);
    if (k == K) return (3.0 * vt(K) - 4.0 * vt(K - 1) + vt(K - 2)) / (2.0 * dt);
    return (vt(k + 1) - vt(k - 1)) / (2.0 * dt);
  };
  auto lifted_source = [&](std::size_t k) {
    const double t = static_cast<double>(k) * dt;
    const double v = vfun(t), vd = vdot(k);
    Eigen::VectorXd s(dim);
    for (std::size_t i = first; i < m; ++i) {
      Vec2 f{0.0, 0.0};
      if (pb.f) f = pb.f(t, x[i]);
      // B = e1, A B = (0, 1).
      s[idx(i, 0)] = f[0] + (2.0 - alpha) * v - prof[i] * vd;
      s[idx(i, 1)] = f[1] + prof[i] * v;
    }
    return s;
  };

  Eigen::VectorXd u(dim);
  const double v0 = vfun(0.0);
  for (std::size_t i = first; i < m; ++i) {
    const Vec2 y = pb.y0(x[i]);
    u[idx(i, 0)] = y[0] - prof[i] * v0;
    u[idx(i, 1)] = y[1];
  }

  FdSolution sol;
  sol.x = x;
  auto store = [&](std::size_t k) {
    const double t = static_cast<double>(k) * dt;
    const double v = vfun(t);
    std::vector<Vec2> y(m + 1, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i <= m; ++i) {
      Vec2 ui{0.0, 0.0};
      if (i >= first && i < m) ui = {u[idx(i, 0)], u[idx(i, 1)]};
      y[i] = {ui[0] + prof[i] * v, ui[1]};
    }
    sol.t.push_back(t);
    sol.y.push_back(std::move(y));
  };
  const std::size_t every = std::max<std::size_t>(1, pb.store_every);
  store(0);
  Eigen::VectorXd s_prev = lifted_source(0);
  for (std::size_t k = 0; k < pb.steps; ++k) {
    Eigen::VectorXd s_next = lifted_source(k + 1);
    Eigen::VectorXd rhs = rhs_op * u + 0.5 * dt * (s_prev + s_next);
    u = lu.solve(rhs);
    s_prev = std::move(s_next);
    if ((k + 1) % every == 0 || k + 1 == pb.steps) store(k + 1);
  }
  return sol;
}

}  // namespace degen
