#include "degen/bessel.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "degen/errors.hpp"

namespace degen::bessel {
namespace {

void check_args(double nu, double x) {
  if (std::isnan(nu) || std::isnan(x)) throw std::invalid_argument("bessel: NaN argument");
  if (!std::isfinite(nu) || !std::isfinite(x)) throw std::invalid_argument("bessel: non-finite argument");
  if (nu < 0.0) throw std::invalid_argument("bessel: negative order");
  if (x < 0.0) throw std::invalid_argument("bessel: negative argument");
}

double j_dispatch(double nu, double x);

// Upward recurrence from the fractional order; stable while the order stays below x.
double j_recurrence(double nu, double x) {
  const double base = nu - std::floor(nu);
  const int steps = static_cast<int>(std::floor(nu));
  long double jm = eval_j_hankel(base, x);
  long double j = eval_j_hankel(base + 1.0, x);
  if (steps == 0) return static_cast<double>(jm);
  for (int k = 1; k < steps; ++k) {
    const long double order = base + k;
    const long double next = 2.0L * order / x * j - jm;
    jm = j;
    j = next;
  }
  return static_cast<double>(j);
}

double j_dispatch(double nu, double x) {
  if (x <= kSeriesLimit || nu >= x) return eval_j_series(nu, x);
  if (nu <= 2.0) return eval_j_hankel(nu, x);
  return j_recurrence(nu, x);
}

// Safeguarded Newton on a sign-change bracket.
double polish(double nu, double lo, double hi, double flo) {
  double x = 0.5 * (lo + hi);
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double fx = j_dispatch(nu, x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double dfx = eval_j_prime(nu, x);
    double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 2e-16 * x) {
      x = next;
      converged = true;
      break;
    }
    x = next;
  }
  if (!converged) {
    while (hi - lo > 4e-16 * hi) {
      const double mid = 0.5 * (lo + hi);
      const double fm = j_dispatch(nu, mid);
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    x = 0.5 * (lo + hi);
  }
  return x;
}

}  // namespace

double eval_j_series(double nu, double x) {
  check_args(nu, x);
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const __float128 h = static_cast<__float128>(x) / 2;
  const __float128 q = h * h;
  const __float128 qnu = nu;
  __float128 term = expq(qnu * logq(h) - lgammaq(qnu + 1));
  __float128 sum = term;
  __float128 peak = fabsq(term);
  for (int m = 0; m < 2000; ++m) {
    term *= -q / ((m + 1) * (qnu + m + 1));
    sum += term;
    const __float128 a = fabsq(term);
    if (a > peak) peak = a;
    if (m + 1 > h && a <= 1e-40Q * peak) break;
  }
  return static_cast<double>(sum);
}

double eval_j_hankel(double nu, double x) {
  check_args(nu, x);
  if (x <= 0.0) throw std::invalid_argument("bessel: asymptotic expansion needs x > 0");
  const long double mu = 4.0L * nu * nu;
  const long double xl = x;
  long double p = 1.0L, q = 0.0L;
  long double ak = 1.0L;
  long double prev = 1.0L;
  for (int k = 1; k < 400; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    const long double next = ak * (mu - odd * odd) / (8.0L * k * xl);
    if (next == 0.0L) break;
    if (std::fabs(next) > std::fabs(prev)) break;
    ak = next;
    prev = next;
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0 ? 1.0L : -1.0L) * ak;
    } else {
      q += (((k - 1) / 2) % 2 == 0 ? 1.0L : -1.0L) * ak;
    }
    if (std::fabs(ak) < 1e-24L) break;
  }
  const long double pi = std::numbers::pi_v<long double>;
  const long double omega = xl - (0.5L * nu + 0.25L) * pi;
  const long double amp = std::sqrt(2.0L / (pi * xl));
  return static_cast<double>(amp * (p * std::cos(omega) - q * std::sin(omega)));
}

double eval_j(double nu, double x) {
  check_args(nu, x);
  return j_dispatch(nu, x);
}

double eval_j_prime(double nu, double x) {
  check_args(nu, x);
  if (x <= 0.0) throw std::invalid_argument("bessel: derivative needs x > 0");
  return nu / x * j_dispatch(nu, x) - j_dispatch(nu + 1.0, x);
}

ZeroBracket zero_bracket(double nu, std::size_t n) {
  if (n == 0) throw std::invalid_argument("bessel: zero index starts at 1");
  const double pi = std::numbers::pi;
  const double a = (static_cast<double>(n) + nu / 2.0 - 0.25) * pi;
  const double b = (static_cast<double>(n) + nu / 4.0 - 0.125) * pi;
  return nu <= 0.5 ? ZeroBracket{a, b} : ZeroBracket{b, a};
}

BesselZeroTable zeros(double nu, std::size_t count) {
  check_args(nu, 0.0);
  if (count == 0) throw std::invalid_argument("bessel: need at least one zero");
  BesselZeroTable table;
  table.nu = nu;
  table.zeros.reserve(count);
  table.derivative_values.reserve(count);
  double prev = 0.0;
  for (std::size_t n = 1; n <= count; ++n) {
    const ZeroBracket br = zero_bracket(nu, n);
    double root;
    if (nu <= 0.5) {
      const double slack = 1e-12 * br.hi;
      double lo = br.lo - slack, hi = br.hi + slack;
      double flo = j_dispatch(nu, lo);
      const double fhi = j_dispatch(nu, hi);
      if (br.hi - br.lo < 1e-9) {
        if ((flo < 0) == (fhi < 0) && flo != 0.0 && fhi != 0.0) {
          // Degenerate bracket (nu = 1/2): widen to find the sign change.
          lo -= 1e-6;
          hi += 1e-6;
          flo = j_dispatch(nu, lo);
        }
      }
      if ((flo < 0) == (j_dispatch(nu, hi) < 0)) {
        throw InternalError("bessel: bracket " + std::to_string(n) + " for order " +
                            std::to_string(nu) + " has no sign change");
      }
      root = polish(nu, lo, hi, flo);
      root = std::min(std::max(root, br.lo), br.hi);
    } else {
      double a = std::max(br.lo, prev + 3.0);
      double fa = j_dispatch(nu, a);
      const double limit = br.hi + 1.0;
      double b = a;
      double fb = fa;
      bool found = false;
      while (b < limit) {
        b = a + 0.25;
        fb = j_dispatch(nu, b);
        if ((fa < 0) != (fb < 0) || fb == 0.0) {
          found = true;
          break;
        }
        a = b;
        fa = fb;
      }
      if (!found) {
        throw InternalError("bessel: no sign change near zero " + std::to_string(n) +
                            " for order " + std::to_string(nu));
      }
      root = fb == 0.0 ? b : polish(nu, a, b, fa);
    }
    const double residual = std::fabs(j_dispatch(nu, root));
    if (!(residual <= 1e-12)) {
      throw InternalError("bessel: zero " + std::to_string(n) + " not resolved");
    }
    table.zeros.push_back(root);
    table.derivative_values.push_back(eval_j_prime(nu, root));
    prev = root;
  }
  return table;
}

}  // namespace degen::bessel
