#include "degen/spaces.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace degen {

CoefficientNorms component_norms(const ModalState& c, std::span<const double> lambda, int comp) {
  if (c.size() != lambda.size()) throw std::invalid_argument("coefficient_norms: length mismatch");
  CoefficientNorms r;
  for (std::size_t n = 0; n < c.size(); ++n) {
    double a = 0.0;
    if (comp < 0) {
      a = c[n][0] * c[n][0] + c[n][1] * c[n][1];
    } else {
      a = c[n][comp] * c[n][comp];
    }
    r.l2 += a;
    r.h1 += (1.0 + lambda[n]) * a;
    r.hm1 += a / (1.0 + lambda[n]);
  }
  r.l2 = std::sqrt(r.l2);
  r.h1 = std::sqrt(r.h1);
  r.hm1 = std::sqrt(r.hm1);
  return r;
}

CoefficientNorms coefficient_norms(const ModalState& c, std::span<const double> lambda) {
  return component_norms(c, lambda, -1);
}

double hm1_norm(const ModalState& c, std::span<const double> lambda) { return coefficient_norms(c, lambda).hm1; }

void WeightSpec::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("WeightSpec: T must be positive");
  if (!(p > 1.0) || !(q > 1.0)) throw std::invalid_argument("WeightSpec: p and q must exceed 1");
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("WeightSpec: M must be positive");
}

namespace {

void check_time(double t, const WeightSpec& spec) {
  if (!(t >= 0.0 && t <= spec.T)) throw std::invalid_argument("weight: t outside [0, T]");
}

double tail_exponent(double t, const WeightSpec& s, WeightKind which) {
  const double rem = s.T - t;
  switch (which) {
    case WeightKind::RhoF:
      return -s.q * s.q * (s.p + 1.0) * s.M / ((s.q - 1.0) * rem);
    case WeightKind::Rho0:
      return -s.p * s.M / ((s.q - 1.0) * rem);
    case WeightKind::Gamma:
      break;
  }
  return s.M / t;
}

}  // namespace

double log_weight_rho_tail(double t, const WeightSpec& spec, WeightKind which) {
  check_time(t, spec);
  if (which == WeightKind::Gamma) {
    return t == 0.0 ? std::numeric_limits<double>::infinity() : spec.M / t;
  }
  if (t == spec.T) return -std::numeric_limits<double>::infinity();
  return tail_exponent(t, spec, which);
}

double log_weight_rho(double t, const WeightSpec& spec, WeightKind which) {
  check_time(t, spec);
  if (which != WeightKind::Gamma) t = std::max(t, spec.plateau_end());
  return log_weight_rho_tail(t, spec, which);
}

double weight_rho(double t, const WeightSpec& spec, WeightKind which) {
  return std::exp(log_weight_rho(t, spec, which));
}

double weight_rho_tail(double t, const WeightSpec& spec, WeightKind which) {
  return std::exp(log_weight_rho_tail(t, spec, which));
}

double weighted_l2(std::span<const double> t, std::span<const double> width, std::span<const double> sq,
                   const WeightSpec& spec, WeightKind which) {
  if (t.size() != width.size() || t.size() != sq.size()) throw std::invalid_argument("weighted_l2: size mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (sq[j] == 0.0) continue;
    const double lw = log_weight_rho(t[j], spec, which);
    acc += width[j] * std::exp(std::log(sq[j]) - 2.0 * lw);
  }
  return std::sqrt(acc);
}

double weighted_sup(std::span<const double> t, std::span<const double> value, const WeightSpec& spec,
                    WeightKind which) {
  if (t.size() != value.size()) throw std::invalid_argument("weighted_sup: size mismatch");
  double best = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (value[j] == 0.0) continue;
    const double lw = log_weight_rho(t[j], spec, which);
    best = std::max(best, std::exp(std::log(std::fabs(value[j])) - lw));
  }
  return best;
}

MidpointSamples midpoint_samples(std::span<const Trajectory> pieces, int comp) {
  MidpointSamples m;
  for (const auto& tr : pieces) {
    const double dt = tr.grid.dt();
    for (std::size_t j = 0; j < tr.grid.steps; ++j) {
      double acc = 0.0;
      for (std::size_t n = 0; n < tr.modes; ++n) {
        const Vec2& a = tr.at(j, n);
        const Vec2& b = tr.at(j + 1, n);
        const double c0 = 0.5 * (a[0] + b[0]), c1 = 0.5 * (a[1] + b[1]);
        if (comp != 1) acc += c0 * c0;
        if (comp != 0) acc += c1 * c1;
      }
      m.t.push_back(tr.grid.t0 + (static_cast<double>(j) + 0.5) * dt);
      m.width.push_back(dt);
      m.sq.push_back(acc);
    }
  }
  return m;
}

MidpointSamples midpoint_samples(std::span<const ControlSignal> pieces) {
  MidpointSamples m;
  for (const auto& c : pieces) {
    const double dt = c.grid.dt();
    for (std::size_t j = 0; j < c.grid.steps; ++j) {
      const double v = 0.5 * (c.values[j] + c.values[j + 1]);
      m.t.push_back(c.grid.t0 + (static_cast<double>(j) + 0.5) * dt);
      m.width.push_back(dt);
      m.sq.push_back(v * v);
    }
  }
  return m;
}

double sup_component_over_weight(std::span<const Trajectory> pieces, const Basis& basis, const PointTable& table,
                                 int comp, const WeightSpec& spec, WeightKind which) {
  double best = 0.0;
  for (const auto& tr : pieces) {
    for (std::size_t j = 0; j < tr.grid.size(); ++j) {
      const double t = tr.grid.at(j);
      if (t >= spec.T) continue;
      const auto vals = basis.reconstruct(table, tr.state(j), comp, 0.0, false);
      double m = 0.0;
      for (double v : vals) m = std::max(m, std::fabs(v));
      if (m == 0.0) continue;
      best = std::max(best, std::exp(std::log(m) - log_weight_rho(t, spec, which)));
    }
  }
  return best;
}

double source_norm_F(std::span<const Trajectory> source_pieces, const WeightSpec& spec) {
  const auto m = midpoint_samples(source_pieces, -1);
  return weighted_l2(m.t, m.width, m.sq, spec, WeightKind::RhoF);
}

double control_norm_V(std::span<const ControlSignal> pieces, const WeightSpec& spec) {
  const auto m = midpoint_samples(pieces);
  return weighted_l2(m.t, m.width, m.sq, spec, WeightKind::Rho0);
}

double state_norm_H0(std::span<const Trajectory> pieces, const WeightSpec& spec) {
  const auto m = midpoint_samples(pieces, -1);
  return weighted_l2(m.t, m.width, m.sq, spec, WeightKind::Rho0);
}

double state_norm_H(std::span<const Trajectory> pieces, const Basis& basis, const PointTable& table,
                    const WeightSpec& spec) {
  const auto m = midpoint_samples(pieces, 0);
  const double a = weighted_l2(m.t, m.width, m.sq, spec, WeightKind::Rho0);
  const double b = sup_component_over_weight(pieces, basis, table, 1, spec, WeightKind::Rho0);
  return std::sqrt(a * a + b * b);
}

}  // namespace degen
