#include "degen/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "degen/bessel.hpp"
#include "degen/biorthogonal.hpp"
#include "degen/errors.hpp"

namespace degen {

DegeneracyParams degeneracy_params(double alpha) {
  if (!(alpha >= 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in [0, 2)");
  DegeneracyParams p;
  p.alpha = alpha;
  p.kappa = (2.0 - alpha) / 2.0;
  if (alpha < 1.0) {
    p.regime = Regime::Weak;
    p.nu = (1.0 - alpha) / (2.0 - alpha);
  } else {
    p.regime = Regime::Strong;
    p.nu = (alpha - 1.0) / (2.0 - alpha);
  }
  return p;
}

CouplingSpectrum coupling_spectrum(double a1, double a2) {
  if (!std::isfinite(a1) || !std::isfinite(a2)) throw std::invalid_argument("coupling entries must be finite");
  CouplingSpectrum c;
  c.a1 = a1;
  c.a2 = a2;
  c.discriminant = a2 * a2 + 4.0 * a1;
  if (std::fabs(c.discriminant) <= 1e-14 * std::max(1.0, a2 * a2 + 4.0 * std::fabs(a1))) {
    throw DegenerateCoupling("coupling matrix has a double eigenvalue");
  }
  if (c.discriminant > 0.0) {
    const double r = std::sqrt(c.discriminant);
    // Avoid cancellation in the smaller-magnitude root.
    const double big = a2 >= 0.0 ? (a2 + r) / 2.0 : (a2 - r) / 2.0;
    const double small = big != 0.0 ? -a1 / big : 0.0;
    c.mu1 = a2 >= 0.0 ? small : big;
    c.mu2 = a2 >= 0.0 ? big : small;
  } else {
    const double r = std::sqrt(-c.discriminant);
    c.mu1 = cplx(a2 / 2.0, r / 2.0);
    c.mu2 = cplx(a2 / 2.0, -r / 2.0);
  }
  const cplx diff = c.mu1 - c.mu2;
  c.V1 = {1.0, c.mu1};
  c.V2 = {1.0, c.mu2};
  c.U1 = {-c.mu2 / diff, 1.0 / diff};
  c.U2 = {c.mu1 / diff, -1.0 / diff};
  return c;
}

KalmanForm kalman_reduce(const Mat2& A, const Vec2& B) {
  const Vec2 AB{A[0][0] * B[0] + A[0][1] * B[1], A[1][0] * B[0] + A[1][1] * B[1]};
  KalmanForm k;
  k.P = Mat2{{{B[0], AB[0]}, {B[1], AB[1]}}};
  const double det = k.P[0][0] * k.P[1][1] - k.P[0][1] * k.P[1][0];
  double scale = 0.0;
  for (const auto& row : k.P)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  if (!(std::fabs(det) > 1e-12 * scale * scale)) {
    throw NotControllable("rank [B | AB] < 2");
  }
  const Mat2 Pinv{{{k.P[1][1] / det, -k.P[0][1] / det}, {-k.P[1][0] / det, k.P[0][0] / det}}};
  Mat2 AP{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) AP[i][j] = A[i][0] * k.P[0][j] + A[i][1] * k.P[1][j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.A_tilde[i][j] = Pinv[i][0] * AP[0][j] + Pinv[i][1] * AP[1][j];
  k.B_tilde = Vec2{1.0, 0.0};
  k.a1 = k.A_tilde[0][1];
  k.a2 = k.A_tilde[1][1];
  return k;
}

SpectralTruncation scalar_eigens(double alpha, std::size_t N) {
  if (N == 0) throw std::invalid_argument("scalar_eigens: N must be positive");
  SpectralTruncation s;
  s.params = degeneracy_params(alpha);
  const double kappa = s.params.kappa;
  const auto table = bessel::zeros(s.params.nu, N + 1);
  s.zeros.assign(table.zeros.begin(), table.zeros.begin() + static_cast<std::ptrdiff_t>(N));
  s.jprime.assign(table.derivative_values.begin(),
                  table.derivative_values.begin() + static_cast<std::ptrdiff_t>(N));
  s.lambda.resize(N);
  s.norm.resize(N);
  s.flux.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double j = s.zeros[n];
    s.lambda[n] = kappa * kappa * j * j;
    s.norm[n] = std::sqrt(2.0 * kappa) / std::fabs(s.jprime[n]);
    s.flux[n] = std::sqrt(2.0 * kappa) * kappa * j * (s.jprime[n] > 0 ? 1.0 : -1.0);
  }
  const double jn = table.zeros[N];
  s.next_lambda = kappa * kappa * jn * jn;
  return s;
}

double eigenfunction(const SpectralTruncation& s, std::size_t n, double x) {
  if (n >= s.size()) throw std::out_of_range("eigenfunction: mode index");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("eigenfunction: x outside [0, 1]");
  const auto& p = s.params;
  const double j = s.zeros[n];
  if (x == 0.0) {
    if (p.regime == Regime::Weak) return 0.0;
    return s.norm[n] * std::exp(p.nu * std::log(j / 2.0) - std::lgamma(p.nu + 1.0));
  }
  const double sx = std::pow(x, p.kappa);
  return s.norm[n] * std::pow(x, (1.0 - p.alpha) / 2.0) * bessel::eval_j(p.nu, j * sx);
}

double eigenfunction_derivative(const SpectralTruncation& s, std::size_t n, double x) {
  if (n >= s.size()) throw std::out_of_range("eigenfunction: mode index");
  if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("eigenfunction_derivative: x outside (0, 1]");
  const auto& p = s.params;
  const double j = s.zeros[n];
  const double e = (1.0 - p.alpha) / 2.0;
  const double sx = std::pow(x, p.kappa);
  const double lead = e * std::pow(x, e - 1.0) * bessel::eval_j(p.nu, j * sx);
  const double chain = std::pow(x, e) * bessel::eval_j_prime(p.nu, j * sx) * j * p.kappa *
                       std::pow(x, p.kappa - 1.0);
  return s.norm[n] * (lead + chain);
}

SystemModel make_model(double alpha, double a1, double a2, std::size_t N) {
  return SystemModel{scalar_eigens(alpha, N), coupling_spectrum(a1, a2)};
}

cplx resonance_defect(const SpectralTruncation& s, const CouplingSpectrum& c, std::size_t n,
                      std::size_t l) {
  const double k2 = s.params.kappa * s.params.kappa;
  const double jn = s.zeros.at(n - 1), jl = s.zeros.at(l - 1);
  return k2 * (jn - jl) * (jn + jl) - (c.mu2 - c.mu1);
}

AdmissibilityReport admissibility(double alpha, double a1, double a2, std::size_t N,
                                  std::optional<double> tol) {
  AdmissibilityReport r;
  std::ostringstream msg;
  // The canonical pair (A, e1) always has P = identity-like [e1 | e2].
  try {
    kalman_reduce(Mat2{{{0.0, a1}, {1.0, a2}}}, Vec2{1.0, 0.0});
  } catch (const NotControllable&) {
    r.kalman_ok = false;
    r.violations.push_back("kalman rank");
  }
  CouplingSpectrum c;
  try {
    c = coupling_spectrum(a1, a2);
  } catch (const DegenerateCoupling&) {
    r.violations.push_back("coupling matrix has a double eigenvalue");
    return r;
  }
  const SystemModel model{scalar_eigens(alpha, N), c};
  const auto& s = model.spectrum;

  r.spectral_tol = tol.value_or(1e-8 * std::max(1.0, std::abs(c.mu2 - c.mu1)));
  for (std::size_t n = 1; n <= N; ++n) {
    for (std::size_t l = 1; l <= N; ++l) {
      if (n == l) continue;
      const double d = std::abs(resonance_defect(s, c, n, l));
      if (d < r.spectral_tol) r.collisions.push_back({n, l, d});
    }
  }
  if (!r.collisions.empty()) {
    r.spectral_ok = false;
    r.violations.push_back("spectral condition: " + std::to_string(r.collisions.size()) + " colliding pair(s)");
  }

  double rho = 1e300;
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = n + 1; m < N; ++m) {
      const double nn = static_cast<double>(n + 1), mm = static_cast<double>(m + 1);
      rho = std::min(rho, (s.lambda[m] - s.lambda[n]) / (mm * mm - nn * nn));
    }
  r.gap_rho = N > 1 ? rho : 0.0;

  const auto merged = lambda_sequence_unchecked(model);
  const auto values = exponent_values(merged);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i].real() > 0.0)) r.positive_real = false;
    if (i + 1 < values.size() && std::abs(values[i + 1]) < std::abs(values[i])) r.modulus_sorted = false;
    if (values[i].real() > 0.0) {
      r.imag_delta = std::max(r.imag_delta, std::fabs(values[i].imag()) / std::sqrt(values[i].real()));
    }
    for (std::size_t k = i + 1; k < values.size(); ++k) {
      if (std::abs(values[i] - values[k]) < r.spectral_tol) r.distinct = false;
    }
  }
  if (!r.positive_real) r.violations.push_back("exponent with nonpositive real part");
  if (!r.modulus_sorted) r.violations.push_back("exponents not sorted by modulus");
  if (!r.distinct) r.violations.push_back("repeated exponent");

  const auto counting = counting_check(values);
  r.counting_p = counting.p;
  r.counting_s = counting.s;
  r.min_gap = counting.close_inf;
  if (!counting.gap_ok) r.violations.push_back("gap condition");
  return r;
}

}  // namespace degen
