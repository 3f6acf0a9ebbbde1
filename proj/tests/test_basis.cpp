#include "degen/basis.hpp"

#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <cmath>
#include <numbers>

#include "degen/spectrum.hpp"

using namespace degen;

namespace {

// Independent eigenfunction: boost Bessel, normalization sqrt(2 kappa) / |J'_nu(j)|.
double phi_boost(const SpectralTruncation& s, std::size_t n, double x) {
  const auto& p = s.params;
  const double j = boost::math::cyl_bessel_j_zero(p.nu, static_cast<int>(n + 1));
  const double jp = boost::math::cyl_bessel_j_prime(p.nu, j);
  const double c = std::sqrt(2.0 * p.kappa) / std::fabs(jp);
  return c * std::pow(x, (1.0 - p.alpha) / 2.0) * boost::math::cyl_bessel_j(p.nu, j * std::pow(x, p.kappa));
}

}  // namespace

class BasisAlpha : public ::testing::TestWithParam<double> {};

TEST_P(BasisAlpha, GramIsIdentity) {
  const auto s = scalar_eigens(GetParam(), 20);
  const Basis b(s);
  const std::size_t Q = b.nodes().size();
  double worst = 0.0;
  for (std::size_t n = 0; n < 20; ++n) {
    for (std::size_t m = 0; m < 20; ++m) {
      double g = 0.0;
      for (std::size_t q = 0; q < Q; ++q) g += b.weights()[q] * b.phi_at_node(n, q) * b.phi_at_node(m, q);
      worst = std::max(worst, std::fabs(g - (n == m ? 1.0 : 0.0)));
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST_P(BasisAlpha, EigenfunctionsMatchBoost) {
  const auto s = scalar_eigens(GetParam(), 8);
  for (std::size_t n = 0; n < 8; ++n) {
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
      const double ref = phi_boost(s, n, x);
      EXPECT_NEAR(std::fabs(eigenfunction(s, n, x)), std::fabs(ref), 1e-10 * (1.0 + std::fabs(ref))) << n << " " << x;
    }
  }
}

TEST_P(BasisAlpha, GramEntriesByAdaptiveQuadrature) {
  const auto s = scalar_eigens(GetParam(), 4);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t n = 0; n < 4; ++n) {
    for (std::size_t m = n; m < 4; ++m) {
      const double g = ts.integrate([&](double x) { return phi_boost(s, n, x) * phi_boost(s, m, x); }, 0.0, 1.0);
      EXPECT_NEAR(g, n == m ? 1.0 : 0.0, 1e-9) << n << " " << m;
    }
  }
}

TEST_P(BasisAlpha, LiftingCoefficients) {
  const auto s = scalar_eigens(GetParam(), 6);
  const Basis b(s);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double a = GetParam();
  for (std::size_t n = 0; n < 6; ++n) {
    const double g = ts.integrate([&](double x) { return std::pow(x, 2.0 - a) * phi_boost(s, n, x); }, 0.0, 1.0);
    EXPECT_NEAR(std::fabs(b.lifting()[n]), std::fabs(g), 1e-10);
  }
}

TEST_P(BasisAlpha, ProjectReconstructRoundTrip) {
  const auto s = scalar_eigens(GetParam(), 10);
  const Basis b(s);
  ModalState c(10);
  for (std::size_t n = 0; n < 10; ++n) c[n] = {1.0 / (n + 1.0), std::cos(static_cast<double>(n))};
  const PointTable t = b.table(b.nodes());
  std::vector<double> y0 = b.reconstruct(t, c, 0), y1 = b.reconstruct(t, c, 1);
  const auto c0 = b.project_values(y0), c1 = b.project_values(y1);
  for (std::size_t n = 0; n < 10; ++n) {
    EXPECT_NEAR(c0[n], c[n][0], 1e-10);
    EXPECT_NEAR(c1[n], c[n][1], 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Alphas, BasisAlpha, ::testing::Values(0.0, 0.5, 1.0, 1.5));

TEST(Basis, VectorBiorthogonality) {
  // psi_n^(i) = U_i Phi_n, Psi_k^(j) = V_j Phi_k, pairing without conjugation.
  for (double alpha : {0.5, 1.5}) {
    const auto model = make_model(alpha, 2.0, 1.0, 10);
    const Basis b(model.spectrum);
    const std::size_t Q = b.nodes().size();
    const auto& c = model.coupling;
    double worst = 0.0;
    for (int i = 1; i <= 2; ++i) {
      for (int j = 1; j <= 2; ++j) {
        for (std::size_t n = 0; n < 10; ++n) {
          for (std::size_t k = 0; k < 10; ++k) {
            cplx acc = 0.0;
            for (std::size_t q = 0; q < Q; ++q) {
              const double pp = b.weights()[q] * b.phi_at_node(n, q) * b.phi_at_node(k, q);
              acc += pp * (c.U(i)[0] * c.V(j)[0] + c.U(i)[1] * c.V(j)[1]);
            }
            const double want = (i == j && n == k) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(acc - want));
          }
        }
      }
    }
    EXPECT_LE(worst, 1e-8) << alpha;
  }
}

TEST(Basis, HeatModeReconstruction) {
  const auto s = scalar_eigens(0.0, 3);
  const Basis b(s);
  const auto c = b.project([](double x) { return std::sin(std::numbers::pi * x); });
  EXPECT_NEAR(std::fabs(c[0]), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(c[1], 0.0, 1e-12);
  EXPECT_NEAR(c[2], 0.0, 1e-12);
}
