#include "degen/spaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "degen/staged_control.hpp"

using namespace degen;

TEST(Spaces, SingleModeNorms) {
  const std::vector<double> lam{std::numbers::pi * std::numbers::pi};
  const ModalState c{{1.0, 0.0}};
  const auto r = coefficient_norms(c, lam);
  EXPECT_NEAR(r.h1, std::sqrt(1.0 + lam[0]), 1e-15);
  EXPECT_NEAR(r.l2, 1.0, 1e-15);
  EXPECT_NEAR(r.hm1, 1.0 / std::sqrt(1.0 + lam[0]), 1e-15);
}

TEST(Spaces, ZeroAndOrdering) {
  const std::vector<double> lam{1.0, 4.0, 9.0, 16.0};
  const auto z = coefficient_norms(ModalState(4, Vec2{0.0, 0.0}), lam);
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.h1, 0.0);
  EXPECT_EQ(z.hm1, 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    ModalState c(4);
    for (auto& v : c) v = {g(rng), g(rng)};
    const auto r = coefficient_norms(c, lam);
    EXPECT_LE(r.hm1, r.l2);
    EXPECT_LE(r.l2, r.h1);
    const auto a = component_norms(c, lam, 0), b = component_norms(c, lam, 1);
    EXPECT_NEAR(r.l2 * r.l2, a.l2 * a.l2 + b.l2 * b.l2, 1e-12 * r.l2 * r.l2);
  }
  EXPECT_THROW(coefficient_norms(ModalState(3), lam), std::invalid_argument);
}

TEST(Spaces, WeightEndpointsAndPlateau) {
  const WeightSpec s{1.0, 3.0, 1.2, 0.5};
  EXPECT_EQ(weight_rho(1.0, s, WeightKind::RhoF), 0.0);
  EXPECT_EQ(weight_rho(1.0, s, WeightKind::Rho0), 0.0);
  const double te = s.plateau_end();
  EXPECT_NEAR(te, 1.0 - 1.0 / 1.44, 1e-15);
  for (auto k : {WeightKind::RhoF, WeightKind::Rho0}) {
    const double v = weight_rho(0.0, s, k);
    EXPECT_GT(v, 0.0);
    EXPECT_EQ(weight_rho(0.5 * te, s, k), v);
    EXPECT_EQ(weight_rho(te, s, k), v);
    EXPECT_LT(weight_rho(te + 0.05, s, k), v);
    EXPECT_NEAR(log_weight_rho(te, s, k), log_weight_rho_tail(te, s, k), 1e-14);
  }
  // Closed forms on the tail.
  const double t = 0.8;
  EXPECT_NEAR(log_weight_rho(t, s, WeightKind::RhoF), -1.44 * 4.0 * 0.5 / (0.2 * 0.2), 1e-10);
  EXPECT_NEAR(log_weight_rho(t, s, WeightKind::Rho0), -3.0 * 0.5 / (0.2 * 0.2), 1e-10);
  EXPECT_NEAR(weight_rho(0.25, s, WeightKind::Gamma), std::exp(2.0), 1e-12);
  EXPECT_THROW(weight_rho(1.1, s, WeightKind::RhoF), std::invalid_argument);
  EXPECT_THROW((WeightSpec{1.0, 3.0, 1.0, 0.5}).validate(), std::invalid_argument);
}

TEST(Spaces, LinkIdentityOnTailWeights) {
  const WeightSpec s{1.0, 3.0, 1.2, 0.7};
  EXPECT_LE(weight_link_residual(s, 5), 1e-12);
  // Independent evaluation from the closed forms.
  auto Tk = [](int k) { return 1.0 - std::pow(1.2, -k); };
  for (int k = 0; k <= 5; ++k) {
    const double lhs = -3.0 * 0.7 / (0.2 * (1.0 - Tk(k + 2)));
    const double rhs = -1.44 * 4.0 * 0.7 / (0.2 * (1.0 - Tk(k))) + 0.7 / (Tk(k + 2) - Tk(k + 1));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::fabs(lhs));
  }
}

TEST(Spaces, UnitIntegrandGivesSqrtT) {
  const WeightSpec s{1.0, 2.0, 1.2, 0.02};
  const TimeGrid g(0.0, 1.0, 200000);
  Trajectory f(g, 1);
  for (std::size_t j = 0; j < g.size(); ++j) f.at(j, 0) = {weight_rho(g.at(j), s, WeightKind::RhoF), 0.0};
  const double n = source_norm_F(std::span<const Trajectory>(&f, 1), s);
  EXPECT_NEAR(n, 1.0, 1e-2);
  Trajectory z(g, 3);
  EXPECT_EQ(source_norm_F(std::span<const Trajectory>(&z, 1), s), 0.0);
  EXPECT_EQ(state_norm_H0(std::span<const Trajectory>(&z, 1), s), 0.0);
  const ControlSignal v(g);
  EXPECT_EQ(control_norm_V(std::span<const ControlSignal>(&v, 1), s), 0.0);
}

TEST(Spaces, WeightedSup) {
  const WeightSpec s{1.0, 3.0, 1.2, 0.1};
  const std::vector<double> t{0.1, 0.9}, val{2.0, 0.0};
  EXPECT_NEAR(weighted_sup(t, val, s, WeightKind::Rho0), 2.0 / weight_rho(0.1, s, WeightKind::Rho0), 1e-12);
  const std::vector<double> w{0.5, 0.5}, sq{4.0, 0.0};
  EXPECT_NEAR(weighted_l2(t, w, sq, s, WeightKind::Rho0),
              std::sqrt(0.5 * 4.0) / weight_rho(0.1, s, WeightKind::Rho0), 1e-12);
}
