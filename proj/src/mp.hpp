#pragma once

// Minimal RAII layer over MPFR. Precision of new values comes from the
// innermost PrecisionScope on the calling thread.

#include <mpfr.h>

#include <complex>
#include <string>
#include <vector>

namespace degen::mp {

class PrecisionScope {
 public:
  explicit PrecisionScope(int bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

mpfr_prec_t working_precision();

class Real {
 public:
  Real() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  Real(double d) {  // NOLINT: implicit on purpose
    mpfr_init2(v_, working_precision());
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  ~Real() { mpfr_clear(v_); }
  Real& operator=(const Real& o) {
    if (this != &o) {
      if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string to_string(int digits) const;
  int sign() const { return mpfr_sgn(v_); }

  Real& operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

 private:
  mpfr_t v_;
};

inline Real operator+(Real a, const Real& b) { return a += b; }
inline Real operator-(Real a, const Real& b) { return a -= b; }
inline Real operator*(Real a, const Real& b) { return a *= b; }
inline Real operator/(Real a, const Real& b) { return a /= b; }
inline Real operator-(Real a) {
  mpfr_neg(a.get(), a.get(), MPFR_RNDN);
  return a;
}
inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }

Real exp(const Real& a);
Real log10(const Real& a);
Real sqrt(const Real& a);
Real abs(const Real& a);
Real sinh(const Real& a);
Real cosh(const Real& a);
Real sin(const Real& a);
Real cos(const Real& a);
Real max(const Real& a, const Real& b);

struct Complex {
  Real re, im;

  Complex() = default;
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}  // NOLINT
  Complex(double r) : re(r), im(0.0) {}                             // NOLINT

  std::complex<double> to_cplx() const { return {re.to_double(), im.to_double()}; }
  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex conj(const Complex& a);
Real norm(const Complex& a);  // |a|^2
Real abs(const Complex& a);
Complex exp(const Complex& a);
Complex sinh(const Complex& a);
/// a += b * c without temporaries.
void fma_into(Complex& a, const Complex& b, const Complex& c, Real& scratch);

/// Dense square complex matrix, row-major.
struct Matrix {
  std::size_t n = 0;
  std::vector<Complex> a;

  explicit Matrix(std::size_t size = 0) : n(size), a(size * size) {}
  Complex& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Hermitian positive definite factorisation A = L L^H. Returns false if a pivot is <= 0.
/// min_pivot receives the smallest squared pivot.
bool cholesky(const Matrix& A, Matrix& L, Real& min_pivot);
/// Solves L L^H x = b.
std::vector<Complex> cholesky_solve(const Matrix& L, const std::vector<Complex>& b);
/// Inverse of L L^H.
Matrix cholesky_inverse(const Matrix& L);
Real norm1(const Matrix& A);

/// Real symmetric positive definite counterpart, row-major n x n.
bool cholesky_real(std::vector<Real>& A, std::size_t n);
void cholesky_real_solve(const std::vector<Real>& L, std::size_t n, std::vector<Real>& b);

}  // namespace degen::mp
