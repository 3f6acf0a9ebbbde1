#include "degen/simulator.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "degen/fd_oracle.hpp"
#include "support.hpp"

using namespace degen;

namespace {

Eigen::Matrix2d coupling_matrix(double a1, double a2) {
  Eigen::Matrix2d A;
  A << 0.0, a1, 1.0, a2;
  return A;
}

ModalState random_modal(std::size_t N, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModalState s(N);
  for (auto& c : s) c = {u(rng), u(rng)};
  return s;
}

}  // namespace

TEST(Simulator, BranchStepExactForLinearForcing) {
  for (cplx rate : {cplx(3.0, 0.0), cplx(0.0, 0.0), cplx(200.0, 0.0), cplx(1.0, 2.0), cplx(-0.5, 0.0)}) {
    const double h = 0.05;
    const auto st = branch_step(rate, h);
    // z' = -r z + (1 + 2t), z(0) = 0: z(h) = int_0^h e^{-r(h-s)} (1 + 2s) ds.
    const cplx g0 = 1.0, gh = 1.0 + 2.0 * h;
    const cplx got = st.w_left * g0 + st.w_right * gh;
    cplx ref;
    if (std::abs(rate) == 0.0) {
      ref = h + h * h;
    } else {
      const cplx e = std::exp(-rate * h);
      ref = (1.0 - e) / rate + 2.0 * (h / rate - (1.0 - e) / (rate * rate));
    }
    EXPECT_LT(std::abs(got - ref), 1e-14) << rate;
    EXPECT_LT(std::abs(st.decay - std::exp(-rate * h)), 1e-15);
  }
}

TEST(Simulator, ScalarDecayAlongEigenvector) {
  const auto model = make_model(0.5, 2.0, 1.0, 6);
  const auto& c = model.coupling;
  const TimeGrid g(0.0, 1.0, 50);
  for (int i = 1; i <= 2; ++i) {
    ModalState y0(6, Vec2{0.0, 0.0});
    y0[2] = {c.U(i)[0].real(), c.U(i)[1].real()};
    const auto tr = forward_solve(model, y0, nullptr, nullptr, g);
    const double rate = model.spectrum.lambda[2] - c.mu(i).real();
    for (std::size_t j : {10u, 50u}) {
      const double e = std::exp(-rate * g.at(j));
      EXPECT_NEAR(tr.at(j, 2)[0], e * y0[2][0], 1e-12);
      EXPECT_NEAR(tr.at(j, 2)[1], e * y0[2][1], 1e-12);
      EXPECT_EQ(tr.at(j, 0)[0], 0.0);
    }
  }
}

TEST(Simulator, MatchesMatrixExponential) {
  struct Case {
    double alpha, a1, a2;
  };
  for (const Case k : {Case{0.5, 2.0, 1.0}, Case{1.5, -1.0, 1.0}, Case{0.0, 3.0, -2.0}}) {
    const std::size_t N = 8;
    const auto model = make_model(k.alpha, k.a1, k.a2, N);
    const auto y0 = random_modal(N, 7);
    const double T = 0.7;
    const TimeGrid g(0.0, T, 35);
    // Constant control: exact response is available through A - lambda.
    ControlSignal v(g);
    for (auto& x : v.values) x = 0.8;
    const auto tr = forward_solve(model, y0, &v, nullptr, g);
    const Eigen::Matrix2d A = coupling_matrix(k.a1, k.a2);
    double worst = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const Eigen::Matrix2d M = A - model.spectrum.lambda[n] * Eigen::Matrix2d::Identity();
      const Eigen::Matrix2d E = (M * T).exp();
      const Eigen::Vector2d b(-model.spectrum.flux[n] * 0.8, 0.0);
      const Eigen::Vector2d want = E * Eigen::Vector2d(y0[n][0], y0[n][1]) + M.inverse() * (E - Eigen::Matrix2d::Identity()) * b;
      const auto got = tr.final_state()[n];
      worst = std::max(worst, std::hypot(got[0] - want[0], got[1] - want[1]) / (1.0 + want.norm()));
    }
    EXPECT_LE(worst, 1e-8) << k.alpha << " " << k.a1 << " " << k.a2;
  }
}

TEST(Simulator, AdjointSeparableSolution) {
  const auto model = make_model(1.5, 2.0, 1.0, 5);
  const auto& c = model.coupling;
  const double T = 1.0;
  const TimeGrid g(0.0, T, 100);
  for (int i = 1; i <= 2; ++i) {
    ModalState phi0(5, Vec2{0.0, 0.0});
    phi0[1] = {c.V(i)[0].real(), c.V(i)[1].real()};
    const auto tr = adjoint_solve(model, phi0, nullptr, g);
    const double rate = model.spectrum.lambda[1] - c.mu(i).real();
    for (std::size_t j : {0u, 37u, 100u}) {
      const double e = std::exp(-rate * (T - g.at(j)));
      EXPECT_NEAR(tr.at(j, 1)[0], e * phi0[1][0], 1e-8 * (1.0 + std::fabs(phi0[1][0])));
      EXPECT_NEAR(tr.at(j, 1)[1], e * phi0[1][1], 1e-8 * (1.0 + std::fabs(phi0[1][1])));
    }
  }
  const auto zero = adjoint_solve(model, ModalState(5, Vec2{0.0, 0.0}), nullptr, g);
  for (const auto& v : zero.data) {
    EXPECT_EQ(v[0], 0.0);
    EXPECT_EQ(v[1], 0.0);
  }
}

TEST(Simulator, AdjointOdeResidual) {
  // phi_n' = (lambda_n - A^T) phi_n, checked with a five-point stencil.
  const auto model = make_model(0.5, -1.0, 1.0, 4);
  const auto phi0 = random_modal(4, 21);
  const TimeGrid g(0.0, 1.0, 4000);
  const auto tr = adjoint_solve(model, phi0, nullptr, g);
  const Eigen::Matrix2d At = coupling_matrix(-1.0, 1.0).transpose();
  const double h = g.dt();
  double worst = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double lam = model.spectrum.lambda[n];
    for (std::size_t j : {1000u, 2500u, 3900u}) {
      Eigen::Vector2d d, p(tr.at(j, n)[0], tr.at(j, n)[1]);
      for (int r = 0; r < 2; ++r)
        d[r] = (-tr.at(j + 2, n)[r] + 8.0 * tr.at(j + 1, n)[r] - 8.0 * tr.at(j - 1, n)[r] + tr.at(j - 2, n)[r]) /
               (12.0 * h);
      const Eigen::Vector2d res = d - (lam * p - At * p);
      worst = std::max(worst, res.norm() / (1.0 + lam * p.norm()));
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Simulator, DualityIdentity) {
  struct Case {
    double alpha, a1, a2;
  };
  for (const Case k : {Case{0.5, 2.0, 1.0}, Case{1.5, -1.0, 1.0}, Case{1.0, 3.0, 0.5}}) {
    const std::size_t N = 10;
    const auto model = make_model(k.alpha, k.a1, k.a2, N);
    const TimeGrid g(0.0, 1.0, 2000);
    ControlSignal v(g);
    for (std::size_t j = 0; j < g.size(); ++j) v.values[j] = std::sin(3.0 * g.at(j)) + 0.5;
    const auto d = duality_residual(model, random_modal(N, 3), v, random_modal(N, 4), g);
    EXPECT_LE(d.relative(), 1e-6) << k.alpha;
    EXPECT_GT(d.scale, 0.0);
  }
}

TEST(Simulator, SourceIsSuperposed) {
  const std::size_t N = 4;
  const auto model = make_model(0.5, 2.0, 1.0, N);
  const TimeGrid g(0.0, 0.5, 200);
  const auto y0 = random_modal(N, 8);
  const SourceFn f = [&](double t) {
    ModalState s(N);
    for (std::size_t n = 0; n < N; ++n) s[n] = {std::cos(t) / (n + 1.0), t};
    return s;
  };
  const auto a = forward_solve(model, y0, nullptr, &f, g);
  const auto b = forward_solve(model, y0, nullptr, nullptr, g);
  const auto c = forward_solve(model, ModalState(N, Vec2{0.0, 0.0}), nullptr, &f, g);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    EXPECT_NEAR(a.data[i][0], b.data[i][0] + c.data[i][0], 1e-13);
    EXPECT_NEAR(a.data[i][1], b.data[i][1] + c.data[i][1], 1e-13);
  }
}

TEST(Simulator, RejectsBadInput) {
  const auto model = make_model(0.5, 2.0, 1.0, 3);
  const TimeGrid g(0.0, 1.0, 10);
  EXPECT_THROW(forward_solve(model, ModalState(2), nullptr, nullptr, g), std::invalid_argument);
  ControlSignal v(TimeGrid(0.0, 1.0, 11));
  EXPECT_THROW(forward_solve(model, ModalState(3, Vec2{0.0, 0.0}), &v, nullptr, g), std::invalid_argument);
  ModalState bad(3, Vec2{0.0, 0.0});
  bad[1][0] = std::nan("");
  EXPECT_THROW(forward_solve(model, bad, nullptr, nullptr, g), std::invalid_argument);
}

TEST(FdOracle, HeatClosedForm) {
  FdProblem pb;
  pb.alpha = 0.0;
  pb.T = 0.1;
  pb.mesh = 400;
  pb.steps = 400;
  pb.y0 = [](double x) { return Vec2{std::sin(std::numbers::pi * x), 0.0}; };
  const auto sol = fd_reference_solve(pb);
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.t.size(); k += 40) {
    for (std::size_t i = 0; i < sol.x.size(); ++i) {
      const double ref = std::exp(-std::numbers::pi * std::numbers::pi * sol.t[k]) * std::sin(std::numbers::pi * sol.x[i]);
      worst = std::max(worst, std::fabs(sol.y[k][i][0] - ref));
    }
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(FdOracle, FirstModeDecayRate) {
  for (double alpha : {0.5, 1.5}) {
    const auto s = scalar_eigens(alpha, 1);
    FdProblem pb;
    pb.alpha = alpha;
    pb.T = 0.5;
    pb.mesh = 1000;
    pb.steps = 500;
    pb.y0 = [&](double x) { return Vec2{eigenfunction(s, 0, x), 0.0}; };
    const auto sol = fd_reference_solve(pb);
    const auto w = sol.mesh_weights();
    auto norm = [&](std::size_t k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < sol.x.size(); ++i) acc += w[i] * sol.y[k][i][0] * sol.y[k][i][0];
      return std::sqrt(acc);
    };
    const double rate = -std::log(norm(sol.t.size() - 1) / norm(0)) / pb.T;
    EXPECT_NEAR(rate, s.lambda[0], 0.01 * s.lambda[0]) << alpha;
  }
}

TEST(FdOracle, SpectralCrossCheckStrong) {
  const auto r = xcheck::spectral_vs_fd(1.5, 2.0, 1.0, 40, 2000, 1.0, 1000, [](double t) { return std::sin(t); });
  EXPECT_LE(r.rel_l2, 1e-3);
  EXPECT_GT(r.fd_norm, 0.0);
}

TEST(FdOracle, SpectralCrossCheckWeak) {
  const auto r = xcheck::spectral_vs_fd(0.5, 2.0, 1.0, 40, 2000, 1.0, 1000, [](double t) { return std::sin(t); });
  EXPECT_LE(r.rel_l2, 1e-3);
}
