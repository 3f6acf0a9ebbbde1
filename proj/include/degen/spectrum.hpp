#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "degen/modal.hpp"

namespace degen {

using cplx = std::complex<double>;
using CVec2 = std::array<cplx, 2>;

enum class Regime { Weak, Strong };

struct DegeneracyParams {
  double alpha = 0.0;
  Regime regime = Regime::Weak;
  double kappa = 1.0;
  double nu = 0.5;
};

DegeneracyParams degeneracy_params(double alpha);

/// Spectrum of A = [[0, a1], [1, a2]]. V_i = (1, mu_i) are eigenvectors of A^T,
/// U_i are the dual eigenvectors of A with U_i . V_j = delta_ij (no conjugation).
struct CouplingSpectrum {
  double a1 = 0.0;
  double a2 = 0.0;
  double discriminant = 0.0;
  cplx mu1, mu2;
  CVec2 U1, U2, V1, V2;

  bool complex_pair() const { return discriminant < 0.0; }
  const CVec2& U(int i) const { return i == 1 ? U1 : U2; }
  const CVec2& V(int i) const { return i == 1 ? V1 : V2; }
  cplx mu(int i) const { return i == 1 ? mu1 : mu2; }
  Mat2 matrix() const { return Mat2{{{0.0, a1}, {1.0, a2}}}; }
};

CouplingSpectrum coupling_spectrum(double a1, double a2);

struct KalmanForm {
  Mat2 A_tilde;
  Vec2 B_tilde;
  Mat2 P;
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Change of basis P = [B | AB] bringing (A, B) to the canonical pair.
KalmanForm kalman_reduce(const Mat2& A, const Vec2& B);

/// First N eigenpairs of y -> -(x^alpha y')' with the regime's condition at 0.
struct SpectralTruncation {
  DegeneracyParams params;
  std::vector<double> zeros;   // j_{nu,n}
  std::vector<double> jprime;  // J'_nu(j_{nu,n})
  std::vector<double> lambda;  // kappa^2 j^2
  std::vector<double> norm;    // sqrt(2 kappa) / |J'_nu(j)|
  std::vector<double> flux;    // (x^alpha Phi_n')(1)
  double next_lambda = 0.0;    // lambda_{N+1}, for tail bounds

  std::size_t size() const { return lambda.size(); }
};

SpectralTruncation scalar_eigens(double alpha, std::size_t N);

/// Phi_n(x) with 0-based n.
double eigenfunction(const SpectralTruncation& s, std::size_t n, double x);
/// Phi_n'(x), x > 0.
double eigenfunction_derivative(const SpectralTruncation& s, std::size_t n, double x);

struct SystemModel {
  SpectralTruncation spectrum;
  CouplingSpectrum coupling;

  std::size_t modes() const { return spectrum.size(); }
  double alpha() const { return spectrum.params.alpha; }
};

SystemModel make_model(double alpha, double a1, double a2, std::size_t N);

/// Member of the merged exponent sequence: value = lambda_n - mu_branch + mu_2.
struct MergedExponent {
  cplx value;
  std::size_t mode = 0;  // 0-based
  int branch = 1;        // 1 or 2
};

struct Collision {
  std::size_t n = 0;  // 1-based
  std::size_t l = 0;
  double defect = 0.0;
};

struct AdmissibilityReport {
  bool kalman_ok = true;
  bool spectral_ok = true;
  double spectral_tol = 0.0;
  std::vector<Collision> collisions;

  bool distinct = true;
  bool positive_real = true;
  bool modulus_sorted = true;
  double imag_delta = 0.0;  // sup |Im| / sqrt(Re)
  double min_gap = 0.0;     // inf over Lambda_{n+1} - Lambda_n in modulus
  double gap_rho = 0.0;     // measured rho in |lambda_n - lambda_m| >= rho |n^2 - m^2|
  double counting_p = 0.0;
  double counting_s = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

AdmissibilityReport admissibility(double alpha, double a1, double a2, std::size_t N,
                                  std::optional<double> tol = std::nullopt);

/// Defect of the resonance condition for one pair, kappa^2 (j_n^2 - j_l^2) - (mu2 - mu1).
cplx resonance_defect(const SpectralTruncation& s, const CouplingSpectrum& c, std::size_t n,
                      std::size_t l);

}  // namespace degen
