#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degen/fit.hpp"
#include "degen/spectrum.hpp"

namespace degen {

/// Merged exponents {lambda_n - mu_i + mu_2}, sorted by modulus then imaginary part.
/// Throws std::domain_error when a member has nonpositive real part.
std::vector<MergedExponent> lambda_sequence(const SystemModel& model);
/// Same ordering without the real-part check.
std::vector<MergedExponent> lambda_sequence_unchecked(const SystemModel& model);
std::vector<cplx> exponent_values(const std::vector<MergedExponent>& merged);

struct GapReport {
  std::size_t q = 1;
  double rho = 0.0;        // inf |L_n - L_m| / |n^2 - m^2| over |n - m| >= q
  double close_inf = 0.0;  // inf |L_n - L_m| over 0 < |n - m| < q (infinity if q == 1)
};

std::vector<GapReport> gap_report(std::span<const cplx> lambda, std::size_t max_q = 3);

struct CountingReport {
  double p = 0.0;
  double s = 0.0;
  double delta = 0.0;  // sup |Im| / sqrt(Re)
  std::vector<double> radii;
  std::vector<double> counts;
  std::vector<GapReport> gaps;
  std::size_t gap_q = 2;
  double rho = 0.0;
  double close_inf = 0.0;
  bool gap_ok = true;
};

/// Counting-function fit |p sqrt(r) - N(r)| <= s over r up to the largest modulus,
/// plus the two-part gap condition at q = 2 (one close pair per eigenvalue layer).
CountingReport counting_check(std::span<const cplx> lambda, std::optional<double> fixed_p = std::nullopt,
                              std::size_t gap_q = 2);

namespace detail {
struct GramStore;
struct FamilyStore;
struct SeriesStore;
}  // namespace detail

/// Extended-precision Gram matrix G_mk = int_{-T/2}^{T/2} e^{-L_m t} e^{-conj(L_k) t} dt.
class GramMatrix {
 public:
  std::size_t size() const;
  int precision_bits() const;
  cplx entry(std::size_t m, std::size_t k) const;
  std::string entry_string(std::size_t m, std::size_t k, int digits = 40) const;
  /// Smallest Cholesky pivot of the equilibrated matrix; <= 0 means not positive definite.
  double min_pivot() const;
  double hermitian_defect() const;

  std::shared_ptr<const detail::GramStore> store;
};

GramMatrix gram_matrix(std::span<const cplx> lambda, double T, int precision_bits = 256);

/// u(s) = sum_k a_k e^{-conj(L_k) s}, coefficients held in extended precision.
class ExpSeries {
 public:
  std::size_t size() const;
  cplx coefficient(std::size_t k) const;
  /// Values of u(s) e^{-shift s} at s = s0 + j ds, j = 0..count-1.
  std::vector<cplx> sample(double s0, double ds, std::size_t count, cplx shift = 0.0) const;

  std::shared_ptr<const detail::SeriesStore> store;
};

/// q_n(t) = sum_m C_nm e^{-conj(L_m) t} on (-T/2, T/2), with int q_n e^{-L_m t} = delta_nm.
class BiorthFamily {
 public:
  std::vector<cplx> exponents;
  double horizon = 0.0;
  int precision_bits = 0;
  double log10_condition = 0.0;
  double residual = 0.0;

  std::size_t size() const { return exponents.size(); }
  cplx coefficient(std::size_t n, std::size_t m) const;
  std::string coefficient_string(std::size_t n, std::size_t m, bool imag, int digits = 40) const;
  double norm(std::size_t n) const;
  cplx eval(std::size_t n, double t) const;
  /// int_{-T/2}^{T/2} q_n(t) e^{-z t} dt.
  cplx pairing(std::size_t n, cplx z) const;
  /// sum_n w_n q_n.
  ExpSeries combine(std::span<const cplx> weights) const;

  std::shared_ptr<const detail::FamilyStore> store;
};

inline constexpr double kBiorthResidualTol = 1e-8;

/// Builds the minimal-norm family at the given precision.
/// Throws PrecisionExhausted when the biorthogonality residual exceeds kBiorthResidualTol.
BiorthFamily build_biorthogonal(std::span<const cplx> lambda, double T, int precision_bits = 256);

/// Doubles the precision on failure until max_bits.
BiorthFamily build_biorthogonal_escalating(std::span<const cplx> lambda, double T, int precision_bits,
                                           int max_bits = 1024);

struct FamilyReport {
  double residual = 0.0;
  std::vector<std::vector<double>> residual_matrix;
  std::vector<double> norms;
  LinearFit growth;  // log ||q_n|| against sqrt(Re L_n)
  bool super_sqrt = false;
};

FamilyReport verify_family(const BiorthFamily& family);

/// log ||q_n|| against 1/T across families built on the same exponents.
LinearFit horizon_regression(std::span<const BiorthFamily> families, std::size_t n);

}  // namespace degen
