#include "degen/spectrum.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "degen/biorthogonal.hpp"
#include "degen/errors.hpp"

using namespace degen;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Spectrum, DegeneracyParams) {
  auto p = degeneracy_params(0.0);
  EXPECT_DOUBLE_EQ(p.kappa, 1.0);
  EXPECT_DOUBLE_EQ(p.nu, 0.5);
  EXPECT_EQ(p.regime, Regime::Weak);
  p = degeneracy_params(1.0);
  EXPECT_DOUBLE_EQ(p.kappa, 0.5);
  EXPECT_DOUBLE_EQ(p.nu, 0.0);
  EXPECT_EQ(p.regime, Regime::Strong);
  p = degeneracy_params(4.0 / 3.0);
  EXPECT_NEAR(p.kappa, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.nu, 0.5, 1e-15);
  EXPECT_EQ(p.regime, Regime::Strong);
  EXPECT_THROW(degeneracy_params(2.0), std::invalid_argument);
  EXPECT_THROW(degeneracy_params(-0.1), std::invalid_argument);
}

TEST(Spectrum, HeatCase) {
  const auto s = scalar_eigens(0.0, 6);
  EXPECT_NEAR(s.lambda[0], pi * pi, 1e-12);
  for (std::size_t n = 0; n < 6; ++n) {
    const double k = static_cast<double>(n + 1);
    EXPECT_NEAR(s.lambda[n], k * k * pi * pi, 1e-10 * k * k);
    for (double x : {0.1, 0.37, 0.5, 0.93}) {
      EXPECT_NEAR(std::fabs(eigenfunction(s, n, x)), std::fabs(std::sqrt(2.0) * std::sin(k * pi * x)), 1e-12);
    }
  }
}

TEST(Spectrum, StrongCaseAgainstBoost) {
  const auto s = scalar_eigens(1.0, 5);
  const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
  EXPECT_NEAR(s.lambda[0], j01 * j01 / 4.0, 1e-12);
  EXPECT_NEAR(s.lambda[0], 1.4458, 1e-4);
  const auto w = scalar_eigens(0.5, 8);
  for (unsigned n = 1; n <= 8; ++n) {
    const double j = boost::math::cyl_bessel_j_zero(w.params.nu, n);
    EXPECT_NEAR(w.lambda[n - 1], w.params.kappa * w.params.kappa * j * j, 1e-10 * j * j);
  }
}

TEST(Spectrum, FluxMatchesDerivative) {
  for (double alpha : {0.0, 0.5, 1.0, 1.5}) {
    const auto s = scalar_eigens(alpha, 5);
    for (std::size_t n = 0; n < 5; ++n) {
      // (x^alpha Phi')(1) = Phi'(1).
      EXPECT_NEAR(s.flux[n], eigenfunction_derivative(s, n, 1.0), 1e-9 * std::fabs(s.flux[n])) << alpha;
      const double h = 1e-5;
      const double fd = (eigenfunction(s, n, 1.0) - eigenfunction(s, n, 1.0 - h)) / h;
      EXPECT_NEAR(eigenfunction(s, n, 1.0), 0.0, 1e-12);
      EXPECT_NEAR(fd, s.flux[n], 1e-3 * std::fabs(s.flux[n]));
    }
  }
}

TEST(Spectrum, CouplingExamples) {
  auto c = coupling_spectrum(2.0, 1.0);
  EXPECT_NEAR(c.mu1.real(), -1.0, 1e-15);
  EXPECT_NEAR(c.mu2.real(), 2.0, 1e-15);
  EXPECT_FALSE(c.complex_pair());
  c = coupling_spectrum(-1.0, 0.0);
  EXPECT_TRUE(c.complex_pair());
  EXPECT_NEAR(std::abs(c.mu1 - cplx(0.0, 1.0)) * std::abs(c.mu1 - cplx(0.0, -1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.mu1 - std::conj(c.mu2)), 0.0, 1e-15);
  EXPECT_THROW(coupling_spectrum(-1.0, 2.0), DegenerateCoupling);
}

TEST(Spectrum, CouplingInvariants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a1 = u(rng), a2 = u(rng);
    if (std::fabs(a2 * a2 + 4.0 * a1) < 1e-3) continue;
    const auto c = coupling_spectrum(a1, a2);
    EXPECT_NEAR(std::abs(c.mu1 + c.mu2 - a2), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c.mu1 * c.mu2 + a1), 0.0, 1e-12);
    for (int i = 1; i <= 2; ++i) {
      for (int j = 1; j <= 2; ++j) {
        const cplx d = c.U(i)[0] * c.V(j)[0] + c.U(i)[1] * c.V(j)[1];
        EXPECT_NEAR(std::abs(d - (i == j ? 1.0 : 0.0)), 0.0, 1e-10);
      }
      // V_i is a left eigenvector: A^T V_i = mu_i V_i.
      const auto A = c.matrix();
      const cplx r0 = A[0][0] * c.V(i)[0] + A[1][0] * c.V(i)[1] - c.mu(i) * c.V(i)[0];
      const cplx r1 = A[0][1] * c.V(i)[0] + A[1][1] * c.V(i)[1] - c.mu(i) * c.V(i)[1];
      EXPECT_LT(std::abs(r0) + std::abs(r1), 1e-12);
    }
  }
}

TEST(Spectrum, KalmanReduce) {
  const Mat2 canon{{{0.0, 2.0}, {1.0, 1.0}}};
  auto k = kalman_reduce(canon, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(k.P[0][0], 1.0);
  EXPECT_DOUBLE_EQ(k.P[1][0], 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(k.A_tilde[i][j], canon[i][j], 1e-15);
  EXPECT_THROW(kalman_reduce(Mat2{{{1.0, 0.0}, {0.0, 2.0}}}, {1.0, 0.0}), NotControllable);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Mat2 A{{{g(rng), g(rng)}, {g(rng), g(rng)}}};
    const Vec2 B{g(rng), g(rng)};
    const auto r = kalman_reduce(A, B);
    EXPECT_NEAR(r.A_tilde[0][0], 0.0, 1e-10);
    EXPECT_NEAR(r.A_tilde[1][0], 1.0, 1e-10);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double lhs = r.P[i][0] * r.A_tilde[0][j] + r.P[i][1] * r.A_tilde[1][j];
        const double rhs = A[i][0] * r.P[0][j] + A[i][1] * r.P[1][j];
        EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + std::fabs(rhs)));
      }
    }
  }
}

TEST(Spectrum, AdmissibleHeatTriple) {
  const auto a = admissibility(0.0, 2.0, 1.0, 20);
  EXPECT_TRUE(a.ok());
  EXPECT_TRUE(a.kalman_ok);
  EXPECT_TRUE(a.spectral_ok);
  EXPECT_TRUE(a.collisions.empty());
  EXPECT_DOUBLE_EQ(a.imag_delta, 0.0);
}

TEST(Spectrum, PlantedCollisionFlagged) {
  // a2 = 0: mu2 - mu1 = sqrt(4 a1) = kappa^2 (j_2^2 - j_1^2).
  for (double alpha : {0.0, 0.5, 1.5}) {
    const auto s = scalar_eigens(alpha, 3);
    const double k2 = s.params.kappa * s.params.kappa;
    const double D = k2 * (s.zeros[1] * s.zeros[1] - s.zeros[0] * s.zeros[0]);
    const double a1 = D * D / 4.0;
    const auto a = admissibility(alpha, a1, 0.0, 10);
    EXPECT_FALSE(a.spectral_ok) << alpha;
    ASSERT_FALSE(a.collisions.empty());
    EXPECT_EQ(a.collisions[0].n, 2u);
    EXPECT_EQ(a.collisions[0].l, 1u);
    EXPECT_FALSE(a.ok());
  }
}

TEST(Spectrum, ComplexCouplingMeasuresImagBound) {
  const auto a = admissibility(0.5, -1.0, 1.0, 20);
  EXPECT_TRUE(a.ok());
  EXPECT_GT(a.imag_delta, 0.0);
  const auto model = make_model(0.5, -1.0, 1.0, 20);
  const auto seq = lambda_sequence(model);
  for (const auto& e : seq) {
    // Branch 2 is real, branch 1 is shifted by mu2 - mu1 = -i sqrt(3).
    EXPECT_TRUE(std::fabs(e.value.imag()) == 0.0 || std::fabs(std::fabs(e.value.imag()) - std::sqrt(3.0)) < 1e-12);
  }
}
