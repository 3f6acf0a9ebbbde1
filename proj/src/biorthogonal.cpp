#include "degen/biorthogonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "degen/errors.hpp"
#include "mp.hpp"

namespace degen {

namespace detail {

struct GramStore {
  int bits = 0;
  mp::Matrix G;
  double min_pivot = 0.0;
  double hermitian_defect = 0.0;
};

struct FamilyStore {
  int bits = 0;
  std::vector<mp::Complex> rate;  // conj(Lambda_k)
  mp::Matrix Ginv;
  double T = 0.0;
};

struct SeriesStore {
  int bits = 0;
  std::vector<mp::Complex> rate;
  std::vector<mp::Complex> coeff;
};

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool modulus_less(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (std::fabs(ma - mb) > 1e-14 * std::max(ma, mb)) return ma < mb;
  return a.imag() < b.imag();
}

// G_mk at the current working precision.
mp::Matrix assemble_gram(const std::vector<mp::Complex>& lam, double T) {
  const std::size_t n = lam.size();
  mp::Matrix G(n);
  const mp::Real half(T / 2.0);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = m; k < n; ++k) {
      const mp::Complex z = lam[m] + mp::conj(lam[k]);
      const mp::Complex num = mp::sinh(z * half);
      const mp::Complex g = (num * mp::Real(2.0)) / z;
      G(m, k) = g;
      G(k, m) = mp::conj(g);
    }
  }
  return G;
}

std::vector<mp::Complex> to_mp(std::span<const cplx> lambda) {
  std::vector<mp::Complex> out;
  out.reserve(lambda.size());
  for (const auto& l : lambda) out.emplace_back(l);
  return out;
}

void check_exponents(std::span<const cplx> lambda, double T) {
  if (lambda.empty()) throw std::invalid_argument("biorthogonal: empty exponent set");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("biorthogonal: horizon must be positive");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i].real() > 0.0)) throw std::domain_error("biorthogonal: exponent with nonpositive real part");
    for (std::size_t k = i + 1; k < lambda.size(); ++k) {
      if (lambda[i] == lambda[k]) throw std::invalid_argument("biorthogonal: repeated exponent");
    }
  }
}

// max |sum_k C_nk G_mk - delta_nm| with G assembled at raised precision.
double biorth_residual(const detail::FamilyStore& f, std::vector<std::vector<double>>* matrix) {
  mp::PrecisionScope scope(2 * f.bits);
  std::vector<mp::Complex> lam;
  for (const auto& r : f.rate) lam.push_back(mp::conj(r));
  const mp::Matrix G = assemble_gram(lam, f.T);
  const std::size_t n = lam.size();
  double worst = 0.0;
  if (matrix) matrix->assign(n, std::vector<double>(n, 0.0));
  mp::Real scratch;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      mp::Complex s(0.0);
      for (std::size_t k = 0; k < n; ++k) mp::fma_into(s, mp::conj(f.Ginv(i, k)), G(m, k), scratch);
      if (i == m) s.re -= mp::Real(1.0);
      const double r = mp::abs(s).to_double();
      worst = std::max(worst, r);
      if (matrix) (*matrix)[i][m] = r;
    }
  }
  return worst;
}

}  // namespace

std::vector<MergedExponent> lambda_sequence_unchecked(const SystemModel& model) {
  const auto& s = model.spectrum;
  const auto& c = model.coupling;
  const cplx shift = c.mu2 - c.mu1;
  std::vector<MergedExponent> out;
  out.reserve(2 * s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    out.push_back({s.lambda[n] + shift, n, 1});
    out.push_back({cplx(s.lambda[n], 0.0), n, 2});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MergedExponent& a, const MergedExponent& b) { return modulus_less(a.value, b.value); });
  return out;
}

std::vector<MergedExponent> lambda_sequence(const SystemModel& model) {
  auto out = lambda_sequence_unchecked(model);
  for (const auto& e : out) {
    if (!(e.value.real() > 0.0)) throw std::domain_error("merged exponent with nonpositive real part");
  }
  return out;
}

std::vector<cplx> exponent_values(const std::vector<MergedExponent>& merged) {
  std::vector<cplx> v;
  v.reserve(merged.size());
  for (const auto& e : merged) v.push_back(e.value);
  return v;
}

std::vector<GapReport> gap_report(std::span<const cplx> lambda, std::size_t max_q) {
  std::vector<GapReport> out;
  const std::size_t L = lambda.size();
  for (std::size_t q = 1; q <= max_q; ++q) {
    GapReport g;
    g.q = q;
    g.rho = kInf;
    g.close_inf = kInf;
    for (std::size_t n = 0; n < L; ++n) {
      for (std::size_t m = n + 1; m < L; ++m) {
        const double d = std::abs(lambda[n] - lambda[m]);
        if (m - n >= q) {
          const double a = static_cast<double>(n + 1), b = static_cast<double>(m + 1);
          g.rho = std::min(g.rho, d / (b * b - a * a));
        } else {
          g.close_inf = std::min(g.close_inf, d);
        }
      }
    }
    out.push_back(g);
  }
  return out;
}

CountingReport counting_check(std::span<const cplx> lambda, std::optional<double> fixed_p, std::size_t gap_q) {
  CountingReport rep;
  std::vector<double> mod;
  for (const auto& l : lambda) {
    mod.push_back(std::abs(l));
    if (l.real() > 0.0) rep.delta = std::max(rep.delta, std::fabs(l.imag()) / std::sqrt(l.real()));
  }
  std::sort(mod.begin(), mod.end());
  if (mod.empty()) return rep;

  // Samples of (sqrt r, N(r)): both one-sided values at each jump and a log grid.
  std::vector<std::pair<double, double>> pts;
  for (double r : mod) {
    const auto below = std::lower_bound(mod.begin(), mod.end(), r) - mod.begin();
    const auto upto = std::upper_bound(mod.begin(), mod.end(), r) - mod.begin();
    pts.emplace_back(std::sqrt(r), static_cast<double>(below));
    pts.emplace_back(std::sqrt(r), static_cast<double>(upto));
  }
  const double rlo = mod.front() / 10.0, rhi = mod.back();
  for (int i = 0; i <= 200; ++i) {
    const double r = rlo * std::pow(rhi / rlo, i / 200.0);
    const auto cnt = std::upper_bound(mod.begin(), mod.end(), r) - mod.begin();
    rep.radii.push_back(r);
    rep.counts.push_back(static_cast<double>(cnt));
    pts.emplace_back(std::sqrt(r), static_cast<double>(cnt));
  }
  auto sup_dev = [&](double p) {
    double s = 0.0;
    for (const auto& [sr, N] : pts) s = std::max(s, std::fabs(p * sr - N));
    return s;
  };
  if (fixed_p) {
    rep.p = *fixed_p;
  } else {
    double a = 0.0, b = 2.0 * static_cast<double>(mod.size()) / std::sqrt(mod.back()) + 1.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = sup_dev(c), fd = sup_dev(d);
    for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = sup_dev(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = sup_dev(d);
      }
    }
    rep.p = 0.5 * (a + b);
  }
  rep.s = sup_dev(rep.p);

  rep.gaps = gap_report(lambda, std::max<std::size_t>(3, gap_q));
  rep.gap_q = gap_q;
  const auto& g = rep.gaps[gap_q - 1];
  rep.rho = g.rho;
  rep.close_inf = g.close_inf;
  const double floor = 1e-8 * std::max(1.0, mod.front());
  rep.gap_ok = (g.rho > 0.0) && (g.close_inf > floor);
  return rep;
}

std::size_t GramMatrix::size() const { return store->G.n; }
int GramMatrix::precision_bits() const { return store->bits; }
double GramMatrix::min_pivot() const { return store->min_pivot; }
double GramMatrix::hermitian_defect() const { return store->hermitian_defect; }

cplx GramMatrix::entry(std::size_t m, std::size_t k) const { return store->G(m, k).to_cplx(); }

std::string GramMatrix::entry_string(std::size_t m, std::size_t k, int digits) const {
  const auto& e = store->G(m, k);
  return e.re.to_string(digits) + (e.im.sign() < 0 ? "" : "+") + e.im.to_string(digits) + "i";
}

GramMatrix gram_matrix(std::span<const cplx> lambda, double T, int precision_bits) {
  check_exponents(lambda, T);
  mp::PrecisionScope scope(precision_bits);
  auto st = std::make_shared<detail::GramStore>();
  st->bits = precision_bits;
  st->G = assemble_gram(to_mp(lambda), T);
  const std::size_t n = st->G.n;
  double defect = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      defect = std::max(defect, mp::abs(st->G(m, k) - mp::conj(st->G(k, m))).to_double());
  st->hermitian_defect = defect;
  mp::Matrix Ge(n);
  std::vector<mp::Real> dscale(n);
  for (std::size_t k = 0; k < n; ++k) dscale[k] = mp::Real(1.0) / mp::sqrt(st->G(k, k).re);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k) Ge(m, k) = st->G(m, k) * (dscale[m] * dscale[k]);
  mp::Matrix L;
  mp::Real pivot;
  mp::cholesky(Ge, L, pivot);
  st->min_pivot = pivot.to_double();
  GramMatrix g;
  g.store = st;
  return g;
}

std::size_t ExpSeries::size() const { return store->coeff.size(); }

cplx ExpSeries::coefficient(std::size_t k) const { return store->coeff.at(k).to_cplx(); }

std::vector<cplx> ExpSeries::sample(double s0, double ds, std::size_t count, cplx shift) const {
  mp::PrecisionScope scope(store->bits);
  const std::size_t K = store->coeff.size();
  const mp::Complex sh(shift);
  std::vector<mp::Complex> cur(K), step(K);
  for (std::size_t k = 0; k < K; ++k) {
    const mp::Complex rate = store->rate[k] + sh;
    const mp::Complex neg(-rate.re, -rate.im);
    cur[k] = store->coeff[k] * mp::exp(neg * mp::Real(s0));
    step[k] = mp::exp(neg * mp::Real(ds));
  }
  std::vector<cplx> out(count);
  mp::Real scratch;
  mp::Complex tmp;
  for (std::size_t j = 0; j < count; ++j) {
    mp::Complex acc(0.0);
    for (std::size_t k = 0; k < K; ++k) acc += cur[k];
    out[j] = acc.to_cplx();
    if (j + 1 < count) {
      for (std::size_t k = 0; k < K; ++k) {
        tmp = mp::Complex(0.0);
        mp::fma_into(tmp, cur[k], step[k], scratch);
        std::swap(cur[k], tmp);
      }
    }
  }
  return out;
}

cplx BiorthFamily::coefficient(std::size_t n, std::size_t m) const {
  return std::conj(store->Ginv(n, m).to_cplx());
}

std::string BiorthFamily::coefficient_string(std::size_t n, std::size_t m, bool imag, int digits) const {
  const auto& e = store->Ginv(n, m);
  if (!imag) return e.re.to_string(digits);
  mp::PrecisionScope scope(store->bits);
  return (-e.im).to_string(digits);
}

double BiorthFamily::norm(std::size_t n) const {
  mp::PrecisionScope scope(store->bits);
  return mp::sqrt(store->Ginv(n, n).re).to_double();
}

cplx BiorthFamily::eval(std::size_t n, double t) const {
  mp::PrecisionScope scope(store->bits);
  mp::Complex acc(0.0);
  mp::Real scratch;
  const mp::Real tt(t);
  for (std::size_t k = 0; k < size(); ++k) {
    const mp::Complex r = store->rate[k];
    mp::fma_into(acc, mp::conj(store->Ginv(n, k)), mp::exp(mp::Complex(-r.re, -r.im) * tt), scratch);
  }
  return acc.to_cplx();
}

cplx BiorthFamily::pairing(std::size_t n, cplx z) const {
  mp::PrecisionScope scope(store->bits + 64);
  const mp::Complex zz(z);
  const mp::Real half(horizon / 2.0);
  mp::Complex acc(0.0);
  mp::Real scratch;
  for (std::size_t k = 0; k < size(); ++k) {
    const mp::Complex w = store->rate[k] + zz;
    mp::Complex integral;
    if (w.re.sign() == 0 && w.im.sign() == 0) {
      integral = mp::Complex(horizon);
    } else {
      integral = (mp::sinh(w * half) * mp::Real(2.0)) / w;
    }
    mp::fma_into(acc, mp::conj(store->Ginv(n, k)), integral, scratch);
  }
  return acc.to_cplx();
}

ExpSeries BiorthFamily::combine(std::span<const cplx> weights) const {
  if (weights.size() != size()) throw std::invalid_argument("combine: weight count mismatch");
  mp::PrecisionScope scope(store->bits);
  auto st = std::make_shared<detail::SeriesStore>();
  st->bits = store->bits;
  st->rate = store->rate;
  st->coeff.assign(size(), mp::Complex(0.0));
  mp::Real scratch;
  for (std::size_t n = 0; n < size(); ++n) {
    if (weights[n] == cplx(0.0, 0.0)) continue;
    const mp::Complex w(weights[n]);
    for (std::size_t k = 0; k < size(); ++k) mp::fma_into(st->coeff[k], w, mp::conj(store->Ginv(n, k)), scratch);
  }
  ExpSeries s;
  s.store = st;
  return s;
}

BiorthFamily build_biorthogonal(std::span<const cplx> lambda, double T, int precision_bits) {
  check_exponents(lambda, T);
  mp::PrecisionScope scope(precision_bits);
  const std::size_t n = lambda.size();
  const auto lam = to_mp(lambda);
  const mp::Matrix G = assemble_gram(lam, T);

  std::vector<mp::Real> dscale(n);
  for (std::size_t k = 0; k < n; ++k) dscale[k] = mp::Real(1.0) / mp::sqrt(G(k, k).re);
  mp::Matrix Ge(n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k) Ge(m, k) = G(m, k) * (dscale[m] * dscale[k]);

  mp::Matrix L;
  mp::Real pivot;
  if (!mp::cholesky(Ge, L, pivot)) {
    throw PrecisionExhausted("Gram matrix lost positive definiteness at " + std::to_string(precision_bits) + " bits",
                             precision_bits, 2 * precision_bits);
  }
  const mp::Matrix Ginv_e = mp::cholesky_inverse(L);
  auto st = std::make_shared<detail::FamilyStore>();
  st->bits = precision_bits;
  st->T = T;
  st->Ginv = mp::Matrix(n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k) st->Ginv(m, k) = Ginv_e(m, k) * (dscale[m] * dscale[k]);
  for (const auto& l : lam) st->rate.push_back(mp::conj(l));

  BiorthFamily f;
  f.exponents.assign(lambda.begin(), lambda.end());
  f.horizon = T;
  f.precision_bits = precision_bits;
  const mp::Real cond = mp::norm1(Ge) * mp::norm1(Ginv_e);
  f.log10_condition = mp::log10(cond).to_double();
  f.store = st;
  f.residual = biorth_residual(*st, nullptr);
  if (!(f.residual <= kBiorthResidualTol)) {
    throw PrecisionExhausted("biorthogonality residual " + std::to_string(f.residual) + " at " +
                                 std::to_string(precision_bits) + " bits",
                             precision_bits, 2 * precision_bits);
  }
  return f;
}

BiorthFamily build_biorthogonal_escalating(std::span<const cplx> lambda, double T, int precision_bits,
                                           int max_bits) {
  int bits = precision_bits;
  while (true) {
    try {
      return build_biorthogonal(lambda, T, bits);
    } catch (const PrecisionExhausted& e) {
      if (2 * bits > max_bits) {
        throw PrecisionExhausted(e.what(), bits, 2 * bits);
      }
      bits *= 2;
    }
  }
}

FamilyReport verify_family(const BiorthFamily& family) {
  FamilyReport rep;
  rep.residual = biorth_residual(*family.store, &rep.residual_matrix);
  std::vector<double> x, xlin, y;
  for (std::size_t n = 0; n < family.size(); ++n) {
    const double nn = family.norm(n);
    rep.norms.push_back(nn);
    x.push_back(std::sqrt(family.exponents[n].real()));
    xlin.push_back(family.exponents[n].real());
    y.push_back(std::log(nn));
  }
  if (family.size() >= 3) {
    bool distinct = false;
    for (std::size_t i = 1; i < x.size(); ++i) distinct = distinct || x[i] != x[0];
    if (distinct) {
      rep.growth = linear_fit(x, y);
      const LinearFit lin = linear_fit(xlin, y);
      rep.super_sqrt = lin.slope > 0.0 && lin.r2 > rep.growth.r2 + 0.05;
    }
  }
  return rep;
}

LinearFit horizon_regression(std::span<const BiorthFamily> families, std::size_t n) {
  std::vector<double> x, y;
  for (const auto& f : families) {
    x.push_back(1.0 / f.horizon);
    y.push_back(std::log(f.norm(n)));
  }
  return linear_fit(x, y);
}

}  // namespace degen
