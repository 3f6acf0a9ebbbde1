#include "degen/moment_control.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "degen/errors.hpp"
#include "degen/simulator.hpp"
#include "degen/spaces.hpp"
#include "mp.hpp"

namespace degen {

namespace detail {

// Real rows of the discrete moment operator v -> int v e^{-lambda^(i)(T-t)} dt for the
// piecewise-linear control on the grid, and the Cholesky factor of the row-equilibrated R R^T.
struct RefinementStore {
  int bits = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> source;  // merged index of each real row
  std::vector<int> part;            // 0 = real part, 1 = imaginary part
  std::vector<mp::Real> R;          // rows x cols
  std::vector<mp::Real> scale;      // 1 / ||row||
  std::vector<mp::Real> L;          // factor of the equilibrated normal matrix
};

}  // namespace detail

namespace {

cplx rate_of(const SystemModel& m, const MergedExponent& e) {
  return m.spectrum.lambda[e.mode] - m.coupling.mu(e.branch);
}

std::shared_ptr<const detail::RefinementStore> build_refinement(const SystemModel& model,
                                                                const std::vector<MergedExponent>& merged,
                                                                double dt, std::size_t steps, int bits,
                                                                int max_bits) {
  const bool cpx = model.coupling.complex_pair();
  for (;; bits *= 2) {
    mp::PrecisionScope scope(bits);
    auto st = std::make_shared<detail::RefinementStore>();
    st->bits = bits;
    st->cols = steps + 1;
    for (std::size_t k = 0; k < merged.size(); ++k) {
      if (cpx) {
        if (merged[k].branch != 2) continue;
        st->source.push_back(k);
        st->part.push_back(0);
        st->source.push_back(k);
        st->part.push_back(1);
      } else {
        st->source.push_back(k);
        st->part.push_back(0);
      }
    }
    st->rows = st->source.size();
    st->R.assign(st->rows * st->cols, mp::Real(0.0));
    std::vector<mp::Complex> pw(steps + 1);
    mp::Real scratch;
    for (std::size_t r = 0; r < st->rows; r += cpx ? 2 : 1) {
      const BranchStep bs = branch_step(rate_of(model, merged[st->source[r]]), dt);
      const mp::Complex E(bs.decay);
      pw[0] = mp::Complex(1.0);
      for (std::size_t m = 1; m <= steps; ++m) pw[m] = pw[m - 1] * E;
      const mp::Complex wl(bs.w_left), wr(bs.w_right);
      for (std::size_t j = 0; j <= steps; ++j) {
        mp::Complex c(0.0);
        if (j < steps) mp::fma_into(c, pw[steps - 1 - j], wl, scratch);
        if (j >= 1) mp::fma_into(c, pw[steps - j], wr, scratch);
        st->R[r * st->cols + j] = c.re;
        if (cpx) st->R[(r + 1) * st->cols + j] = c.im;
      }
    }
    st->scale.resize(st->rows);
    for (std::size_t r = 0; r < st->rows; ++r) {
      mp::Real s(0.0);
      for (std::size_t j = 0; j < st->cols; ++j) s += st->R[r * st->cols + j] * st->R[r * st->cols + j];
      if (s.sign() == 0) throw MomentDegenerate("discrete moment row vanishes");
      st->scale[r] = mp::Real(1.0) / mp::sqrt(s);
    }
    const std::size_t n = st->rows;
    st->L.assign(n * n, mp::Real(0.0));
    mp::Real acc;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        acc = mp::Real(0.0);
        const mp::Real* ra = &st->R[a * st->cols];
        const mp::Real* rb = &st->R[b * st->cols];
        for (std::size_t j = 0; j < st->cols; ++j) mpfr_fma(acc.get(), ra[j].get(), rb[j].get(), acc.get(), MPFR_RNDN);
        acc *= st->scale[a] * st->scale[b];
        st->L[a * n + b] = acc;
        st->L[b * n + a] = acc;
      }
    }
    if (mp::cholesky_real(st->L, n)) return st;
    if (2 * bits > max_bits) {
      throw PrecisionExhausted("discrete moment normal matrix not positive definite at " + std::to_string(bits) +
                                   " bits",
                               bits, 2 * bits);
    }
  }
}

// r = C - R v in extended precision; a double residual loses linearity in y0 through
// cancellation that the normal solve then amplifies.
std::vector<mp::Real> moment_residual(const detail::RefinementStore& st, const std::vector<double>& target,
                                      const std::vector<double>& v) {
  mp::PrecisionScope scope(st.bits);
  std::vector<mp::Real> r(st.rows);
  mp::Real acc, vj;
  for (std::size_t k = 0; k < st.rows; ++k) {
    acc = mp::Real(0.0);
    const mp::Real* row = &st.R[k * st.cols];
    for (std::size_t j = 0; j < st.cols && j < v.size(); ++j) {
      if (v[j] == 0.0) continue;
      vj = mp::Real(v[j]);
      mpfr_fma(acc.get(), row[j].get(), vj.get(), acc.get(), MPFR_RNDN);
    }
    r[k] = mp::Real(target[k]) - acc;
  }
  return r;
}

// dv = R^T (R R^T)^{-1} r.
std::vector<double> min_norm_correction(const detail::RefinementStore& st, const std::vector<mp::Real>& residual) {
  mp::PrecisionScope scope(st.bits);
  const std::size_t n = st.rows;
  std::vector<mp::Real> y(n);
  for (std::size_t r = 0; r < n; ++r) y[r] = residual[r] * st.scale[r];
  mp::cholesky_real_solve(st.L, n, y);
  for (std::size_t r = 0; r < n; ++r) y[r] *= st.scale[r];
  std::vector<double> dv(st.cols);
  mp::Real acc;
  for (std::size_t j = 0; j < st.cols; ++j) {
    acc = mp::Real(0.0);
    for (std::size_t r = 0; r < n; ++r) mpfr_fma(acc.get(), st.R[r * st.cols + j].get(), y[r].get(), acc.get(), MPFR_RNDN);
    dv[j] = acc.to_double();
  }
  return dv;
}

double max_defect(const std::vector<cplx>& mom, const std::vector<cplx>& C) {
  double d = 0.0;
  for (std::size_t k = 0; k < C.size(); ++k) d = std::max(d, std::abs(mom[k] - C[k]));
  return d;
}

}  // namespace

MomentData moment_coefficients(const SystemModel& model, const ModalState& y0, double T) {
  if (y0.size() != model.modes()) throw std::invalid_argument("moment_coefficients: mode count mismatch");
  if (!(T > 0.0)) throw std::invalid_argument("moment_coefficients: horizon must be positive");
  const auto& c = model.coupling;
  for (int i = 1; i <= 2; ++i) {
    // B^* V_i with B = e1.
    if (std::abs(c.V(i)[0]) == 0.0) throw MomentDegenerate("B* V_i vanishes");
  }
  MomentData md;
  md.merged = lambda_sequence(model);
  md.shift = c.mu2;
  md.T = T;
  for (const auto& e : md.merged) {
    const CVec2& V = c.V(e.branch);
    const Vec2& y = y0[e.mode];
    const cplx z0 = V[0] * y[0] + V[1] * y[1];
    const cplx lam = rate_of(model, e);
    const cplx denom = model.spectrum.flux[e.mode] * V[0];
    const cplx C = std::exp(-lam * T) * z0 / denom;
    md.C.push_back(C);
    md.Chat.push_back(std::exp(-lam * (T / 2.0)) * z0 / denom);
  }
  return md;
}

MomentController::MomentController(const SystemModel& model, double T, std::size_t steps, SynthesisOptions options)
    : model_(model), T_(T), steps_(steps), options_(options) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("MomentController: horizon must be positive");
  if (steps < 1) throw std::invalid_argument("MomentController: need at least one step");
  merged_ = lambda_sequence(model_);
  const double dt = T / static_cast<double>(steps);
  family_ = build_biorthogonal_escalating(exponent_values(merged_), T_, options.precision_bits,
                                          options.max_bits);
  if (options.discrete_refinement) {
    refine_ = build_refinement(model_, merged_, dt, steps_, family_.precision_bits, options.max_bits);
  }
}

std::vector<cplx> MomentController::discrete_moments(const ControlSignal& v) const {
  if (v.values.size() < steps_ + 1) throw std::invalid_argument("discrete_moments: control too short");
  const double dt = T_ / static_cast<double>(steps_);
  std::vector<cplx> out;
  out.reserve(merged_.size());
  for (const auto& e : merged_) {
    const BranchStep st = branch_step(rate_of(model_, e), dt);
    cplx acc = 0.0, p = 1.0;
    for (std::size_t jj = steps_; jj-- > 0;) {
      acc += p * (st.w_left * v.values[jj] + st.w_right * v.values[jj + 1]);
      p *= st.decay;
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<double> MomentController::discrete_moment_scale(const ControlSignal& v) const {
  if (v.values.size() < steps_ + 1) throw std::invalid_argument("discrete_moment_scale: control too short");
  const double dt = T_ / static_cast<double>(steps_);
  std::vector<double> out;
  out.reserve(merged_.size());
  for (const auto& e : merged_) {
    const BranchStep st = branch_step(rate_of(model_, e), dt);
    double acc = 0.0;
    cplx p = 1.0;
    for (std::size_t jj = steps_; jj-- > 0;) {
      acc += std::abs(p * st.w_left) * std::fabs(v.values[jj]) + std::abs(p * st.w_right) * std::fabs(v.values[jj + 1]);
      p *= st.decay;
    }
    out.push_back(acc);
  }
  return out;
}

SynthesisResult MomentController::synthesize(const ModalState& y0, double t0) const {
  SynthesisResult res;
  res.moments = moment_coefficients(model_, y0, T_);
  res.horizon_used = T_;
  res.precision_bits = family_.precision_bits;
  res.log10_condition = family_.log10_condition;
  res.biorth_residual = family_.residual;
  double mu_re = std::max(model_.coupling.mu1.real(), model_.coupling.mu2.real());
  res.tail_bound = std::exp(-(model_.spectrum.next_lambda - mu_re) * T_);

  const double dt = T_ / static_cast<double>(steps_);
  const ExpSeries u = family_.combine(res.moments.Chat);
  const auto samples = u.sample(T_ / 2.0, -dt, steps_ + 1, res.moments.shift);
  double vmax = 0.0, imax = 0.0;
  for (const auto& s : samples) {
    vmax = std::max(vmax, std::fabs(s.real()));
    imax = std::max(imax, std::fabs(s.imag()));
  }
  res.imag_ratio = vmax > 0.0 ? imax / vmax : (imax > 0.0 ? 1.0 : 0.0);
  if (res.imag_ratio > 1e-8) {
    throw InternalError("synthesized control has imaginary residue " + std::to_string(res.imag_ratio) +
                        " (conjugate pairing broken)");
  }
  ControlSignal v;
  v.grid = TimeGrid{t0, t0 + T_, steps_};
  v.values.assign(steps_ + 1, 0.0);
  for (std::size_t j = 0; j <= steps_; ++j) v.values[j] = samples[j].real();

  auto mom = discrete_moments(v);
  res.moment_defect_raw = max_defect(mom, res.moments.C);
  res.moment_defect = res.moment_defect_raw;
  if (refine_) {
    const auto& st = *refine_;
    std::vector<double> target(st.rows);
    for (std::size_t k = 0; k < st.rows; ++k) {
      const cplx c = res.moments.C[st.source[k]];
      target[k] = st.part[k] == 0 ? c.real() : c.imag();
    }
    const auto dv = min_norm_correction(st, moment_residual(st, target, v.values));
    double n_dv = 0.0, n_v = 0.0;
    for (std::size_t j = 0; j <= steps_; ++j) {
      n_dv += dv[j] * dv[j];
      v.values[j] += dv[j];
      n_v += v.values[j] * v.values[j];
    }
    res.correction_ratio = n_v > 0.0 ? std::sqrt(n_dv / n_v) : 0.0;
    mom = discrete_moments(v);
    res.moment_defect = max_defect(mom, res.moments.C);
  }
  const auto scale = discrete_moment_scale(v);
  for (std::size_t k = 0; k < mom.size(); ++k) {
    const double d = std::abs(mom[k] - res.moments.C[k]);
    if (d > 0.0) res.moment_defect_rel = std::max(res.moment_defect_rel, scale[k] > 0.0 ? d / scale[k] : 1.0);
  }
  res.control = std::move(v);
  return res;
}

SynthesisResult synthesize_control(const SystemModel& model, const ModalState& y0, double T, std::size_t steps,
                                   const SynthesisOptions& options) {
  return MomentController(model, T, steps, options).synthesize(y0);
}

double control_l2(const ControlSignal& v) {
  const double h = v.grid.dt();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < v.values.size(); ++j) {
    const double a = v.values[j], b = v.values[j + 1];
    acc += h * (a * a + a * b + b * b) / 3.0;
  }
  return std::sqrt(acc);
}

CostScan control_cost_scan(const SystemModel& model, const std::vector<double>& horizons,
                           const std::vector<ModalState>& ensemble, std::size_t steps,
                           const SynthesisOptions& options, std::size_t jobs) {
  if (horizons.empty() || ensemble.empty()) throw std::invalid_argument("control_cost_scan: empty input");
  CostScan scan;
  scan.rows.resize(horizons.size());
  std::vector<std::exception_ptr> errors(horizons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < horizons.size(); i = next++) {
      try {
        const double T = horizons[i];
        MomentController ctl(model, T, steps, options);
        CostRow row;
        row.T = T;
        row.precision_bits = ctl.family().precision_bits;
        row.log10_condition = ctl.family().log10_condition;
        for (const auto& y0 : ensemble) {
          const double n0 = hm1_norm(y0, model.spectrum.lambda);
          if (n0 == 0.0) continue;
          const auto res = ctl.synthesize(y0);
          row.K = std::max(row.K, control_l2(res.control) / n0);
          const auto tr = forward_solve(model, y0, &res.control, nullptr, res.control.grid);
          row.max_terminal_ratio =
              std::max(row.max_terminal_ratio, hm1_norm(tr.final_state(), model.spectrum.lambda) / n0);
        }
        scan.rows[i] = row;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(jobs, horizons.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> x, y;
  for (const auto& r : scan.rows) {
    if (r.K <= 0.0) continue;
    x.push_back(1.0 / r.T);
    y.push_back(std::log(r.K));
  }
  if (x.size() >= 2) {
    const LinearFit f = linear_fit(x, y);
    scan.M = f.slope;
    scan.C0 = std::exp(f.intercept);
    scan.r2 = f.r2;
  }
  return scan;
}

}  // namespace degen
