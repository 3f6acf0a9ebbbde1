#include "mp.hpp"

#include <cstdlib>
#include <stdexcept>

namespace degen::mp {
namespace {
thread_local mpfr_prec_t current_precision = 256;
}

PrecisionScope::PrecisionScope(int bits) : saved_(current_precision) {
  if (bits < 53) throw std::invalid_argument("precision below 53 bits");
  current_precision = bits;
}

PrecisionScope::~PrecisionScope() { current_precision = saved_; }

mpfr_prec_t working_precision() { return current_precision; }

std::string Real::to_string(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  mpfr_exp_t e = 0;
  char* s = mpfr_get_str(nullptr, &e, 10, static_cast<std::size_t>(digits), v_, MPFR_RNDN);
  std::string mant(s);
  mpfr_free_str(s);
  std::string out;
  std::size_t start = 0;
  if (!mant.empty() && mant[0] == '-') {
    out = "-";
    start = 1;
  }
  out += mant.substr(start, 1);
  if (mant.size() > start + 1) {
    out += ".";
    out += mant.substr(start + 1);
  }
  out += "e" + std::to_string(static_cast<long>(e) - 1);
  return out;
}

#define DEGEN_MP_UNARY(name, fn)             \
  Real name(const Real& a) {                 \
    Real r;                                  \
    fn(r.get(), a.get(), MPFR_RNDN);         \
    return r;                                \
  }

DEGEN_MP_UNARY(exp, mpfr_exp)
DEGEN_MP_UNARY(log10, mpfr_log10)
DEGEN_MP_UNARY(sqrt, mpfr_sqrt)
DEGEN_MP_UNARY(abs, mpfr_abs)
DEGEN_MP_UNARY(sinh, mpfr_sinh)
DEGEN_MP_UNARY(cosh, mpfr_cosh)
DEGEN_MP_UNARY(sin, mpfr_sin)
DEGEN_MP_UNARY(cos, mpfr_cos)

#undef DEGEN_MP_UNARY

Real max(const Real& a, const Real& b) { return a > b ? a : b; }

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }

Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }

Complex operator/(const Complex& a, const Complex& b) {
  const Real d = norm(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }

Complex conj(const Complex& a) { return {a.re, -a.im}; }

Real norm(const Complex& a) { return a.re * a.re + a.im * a.im; }

Real abs(const Complex& a) {
  Real r;
  mpfr_hypot(r.get(), a.re.get(), a.im.get(), MPFR_RNDN);
  return r;
}

Complex exp(const Complex& a) {
  const Real m = exp(a.re);
  Real s, c;
  mpfr_sin_cos(s.get(), c.get(), a.im.get(), MPFR_RNDN);
  return {m * c, m * s};
}

Complex sinh(const Complex& a) {
  Real sh, ch, s, c;
  mpfr_sinh_cosh(sh.get(), ch.get(), a.re.get(), MPFR_RNDN);
  mpfr_sin_cos(s.get(), c.get(), a.im.get(), MPFR_RNDN);
  return {sh * c, ch * s};
}

void fma_into(Complex& a, const Complex& b, const Complex& c, Real& scratch) {
  mpfr_mul(scratch.get(), b.re.get(), c.re.get(), MPFR_RNDN);
  mpfr_add(a.re.get(), a.re.get(), scratch.get(), MPFR_RNDN);
  mpfr_mul(scratch.get(), b.im.get(), c.im.get(), MPFR_RNDN);
  mpfr_sub(a.re.get(), a.re.get(), scratch.get(), MPFR_RNDN);
  mpfr_mul(scratch.get(), b.re.get(), c.im.get(), MPFR_RNDN);
  mpfr_add(a.im.get(), a.im.get(), scratch.get(), MPFR_RNDN);
  mpfr_mul(scratch.get(), b.im.get(), c.re.get(), MPFR_RNDN);
  mpfr_add(a.im.get(), a.im.get(), scratch.get(), MPFR_RNDN);
}

bool cholesky(const Matrix& A, Matrix& L, Real& min_pivot) {
  const std::size_t n = A.n;
  L = Matrix(n);
  Real scratch;
  bool first = true;
  for (std::size_t j = 0; j < n; ++j) {
    Real d = A(j, j).re;
    for (std::size_t k = 0; k < j; ++k) d -= norm(L(j, k));
    if (first || d < min_pivot) {
      min_pivot = d;
      first = false;
    }
    if (d.sign() <= 0) return false;
    const Real ljj = sqrt(d);
    L(j, j) = Complex(ljj, Real(0.0));
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        Complex neg = L(i, k);
        neg.re = -neg.re;
        neg.im = -neg.im;
        fma_into(s, neg, conj(L(j, k)), scratch);
      }
      L(i, j) = s / ljj;
    }
  }
  return true;
}

std::vector<Complex> cholesky_solve(const Matrix& L, const std::vector<Complex>& b) {
  const std::size_t n = L.n;
  std::vector<Complex> y(n);
  Real scratch;
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = b[i];
    for (std::size_t k = 0; k < i; ++k) {
      Complex neg = L(i, k);
      neg.re = -neg.re;
      neg.im = -neg.im;
      fma_into(s, neg, y[k], scratch);
    }
    y[i] = s / L(i, i).re;
  }
  std::vector<Complex> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) {
      Complex neg = conj(L(k, ii));
      neg.re = -neg.re;
      neg.im = -neg.im;
      fma_into(s, neg, x[k], scratch);
    }
    x[ii] = s / L(ii, ii).re;
  }
  return x;
}

Matrix cholesky_inverse(const Matrix& L) {
  const std::size_t n = L.n;
  // W = L^{-1}, lower triangular.
  Matrix W(n);
  Real scratch;
  for (std::size_t j = 0; j < n; ++j) {
    W(j, j) = Complex(Real(1.0) / L(j, j).re, Real(0.0));
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s(0.0);
      for (std::size_t k = j; k < i; ++k) fma_into(s, L(i, k), W(k, j), scratch);
      W(i, j) = Complex(-s.re, -s.im) / L(i, i).re;
    }
  }
  // inverse = W^H W
  Matrix inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Complex s(0.0);
      for (std::size_t k = i; k < n; ++k) fma_into(s, conj(W(k, i)), W(k, j), scratch);
      inv(i, j) = s;
      inv(j, i) = conj(s);
    }
  }
  return inv;
}

Real norm1(const Matrix& A) {
  Real best(0.0);
  for (std::size_t j = 0; j < A.n; ++j) {
    Real col(0.0);
    for (std::size_t i = 0; i < A.n; ++i) col += abs(A(i, j));
    best = max(best, col);
  }
  return best;
}

bool cholesky_real(std::vector<Real>& A, std::size_t n) {
  Real scratch;
  for (std::size_t j = 0; j < n; ++j) {
    Real& d = A[j * n + j];
    for (std::size_t k = 0; k < j; ++k) {
      mpfr_sqr(scratch.get(), A[j * n + k].get(), MPFR_RNDN);
      mpfr_sub(d.get(), d.get(), scratch.get(), MPFR_RNDN);
    }
    if (d.sign() <= 0) return false;
    mpfr_sqrt(d.get(), d.get(), MPFR_RNDN);
    for (std::size_t i = j + 1; i < n; ++i) {
      Real& e = A[i * n + j];
      for (std::size_t k = 0; k < j; ++k) {
        mpfr_mul(scratch.get(), A[i * n + k].get(), A[j * n + k].get(), MPFR_RNDN);
        mpfr_sub(e.get(), e.get(), scratch.get(), MPFR_RNDN);
      }
      mpfr_div(e.get(), e.get(), d.get(), MPFR_RNDN);
    }
  }
  return true;
}

void cholesky_real_solve(const std::vector<Real>& L, std::size_t n, std::vector<Real>& b) {
  Real scratch;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      mpfr_mul(scratch.get(), L[i * n + k].get(), b[k].get(), MPFR_RNDN);
      mpfr_sub(b[i].get(), b[i].get(), scratch.get(), MPFR_RNDN);
    }
    mpfr_div(b[i].get(), b[i].get(), L[i * n + i].get(), MPFR_RNDN);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) {
      mpfr_mul(scratch.get(), L[k * n + ii].get(), b[k].get(), MPFR_RNDN);
      mpfr_sub(b[ii].get(), b[ii].get(), scratch.get(), MPFR_RNDN);
    }
    mpfr_div(b[ii].get(), b[ii].get(), L[ii * n + ii].get(), MPFR_RNDN);
  }
}

}  // namespace degen::mp
