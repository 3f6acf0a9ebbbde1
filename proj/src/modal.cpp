#include "degen/modal.hpp"

namespace degen {

double ControlSignal::operator()(double t) const {
  const double dt = grid.dt();
  const double u = (t - grid.t0) / dt;
  if (u <= 0.0) return values.front();
  if (u >= static_cast<double>(grid.steps)) return values.back();
  const auto j = static_cast<std::size_t>(u);
  const double w = u - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

double l2_norm_sq(const ModalState& s) {
  double acc = 0.0;
  for (const auto& c : s) acc += c[0] * c[0] + c[1] * c[1];
  return acc;
}

}  // namespace degen
