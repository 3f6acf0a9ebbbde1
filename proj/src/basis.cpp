#include "degen/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "degen/quadrature.hpp"

namespace degen {

Basis::Basis(const SpectralTruncation& s, std::size_t quad_nodes) : spec_(s) {
  const std::size_t N = s.size();
  const std::size_t Q = quad_nodes ? quad_nodes : std::max<std::size_t>(256, 8 * N + 64);
  const double kappa = s.params.kappa;
  const auto rule = gauss_legendre(Q, 0.0, 1.0);
  x_.resize(Q);
  w_.resize(Q);
  for (std::size_t q = 0; q < Q; ++q) {
    const double sq = rule.nodes[q];
    x_[q] = std::pow(sq, 1.0 / kappa);
    w_[q] = rule.weights[q] * std::pow(sq, 1.0 / kappa - 1.0) / kappa;
  }
  phi_.resize(N * Q);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t q = 0; q < Q; ++q) phi_[n * Q + q] = eigenfunction(spec_, n, x_[q]);
  std::vector<double> prof(Q);
  for (std::size_t q = 0; q < Q; ++q) prof[q] = std::pow(x_[q], 2.0 - s.params.alpha);
  lift_ = project_values(prof);
}

std::vector<double> Basis::project_values(std::span<const double> values) const {
  if (values.size() != x_.size()) throw std::invalid_argument("project_values: expected one value per node");
  const std::size_t Q = x_.size();
  std::vector<double> c(modes(), 0.0);
  for (std::size_t n = 0; n < modes(); ++n) {
    double acc = 0.0;
    for (std::size_t q = 0; q < Q; ++q) acc += w_[q] * values[q] * phi_[n * Q + q];
    c[n] = acc;
  }
  return c;
}

std::vector<double> Basis::project(const std::function<double(double)>& F) const {
  std::vector<double> v(x_.size());
  for (std::size_t q = 0; q < x_.size(); ++q) v[q] = F(x_[q]);
  return project_values(v);
}

ModalState Basis::project(const std::function<Vec2(double)>& F) const {
  std::vector<double> v0(x_.size()), v1(x_.size());
  for (std::size_t q = 0; q < x_.size(); ++q) {
    const Vec2 y = F(x_[q]);
    v0[q] = y[0];
    v1[q] = y[1];
  }
  const auto c0 = project_values(v0), c1 = project_values(v1);
  ModalState out(modes());
  for (std::size_t n = 0; n < modes(); ++n) out[n] = {c0[n], c1[n]};
  return out;
}

PointTable Basis::table(std::span<const double> xs) const {
  PointTable t;
  t.x.assign(xs.begin(), xs.end());
  t.modes = modes();
  t.phi.resize(modes() * xs.size());
  t.profile.resize(xs.size());
  for (std::size_t p = 0; p < xs.size(); ++p) t.profile[p] = std::pow(xs[p], 2.0 - spec_.params.alpha);
  for (std::size_t n = 0; n < modes(); ++n)
    for (std::size_t p = 0; p < xs.size(); ++p) t.phi[n * xs.size() + p] = eigenfunction(spec_, n, xs[p]);
  return t;
}

std::vector<double> Basis::reconstruct(const PointTable& t, const ModalState& c, int comp, double boundary,
                                       bool lifted) const {
  if (c.size() != modes() || t.modes != modes()) throw std::invalid_argument("reconstruct: mode count mismatch");
  const std::size_t P = t.x.size();
  std::vector<double> out(P, 0.0);
  const double b = lifted ? boundary : 0.0;
  for (std::size_t n = 0; n < modes(); ++n) {
    const double coef = c[n][comp] - b * lift_[n];
    if (coef == 0.0) continue;
    for (std::size_t p = 0; p < P; ++p) out[p] += coef * t.phi[n * P + p];
  }
  if (b != 0.0)
    for (std::size_t p = 0; p < P; ++p) out[p] += b * t.profile[p];
  return out;
}

}  // namespace degen
