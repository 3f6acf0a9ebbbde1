#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace degen {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Coefficients of a state against the scalar eigenbasis, one 2-vector per mode.
using ModalState = std::vector<Vec2>;

/// Uniform grid t0 = t_0 < ... < t_steps = t1.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t steps = 1;

  TimeGrid() = default;
  TimeGrid(double start, double end, std::size_t n) : t0(start), t1(end), steps(n) {
    if (!(end > start) || n == 0) throw std::invalid_argument("TimeGrid: need t1 > t0 and steps >= 1");
  }

  double dt() const { return (t1 - t0) / static_cast<double>(steps); }
  std::size_t size() const { return steps + 1; }
  double at(std::size_t j) const {
    return j == steps ? t1 : t0 + (t1 - t0) * static_cast<double>(j) / static_cast<double>(steps);
  }
  std::vector<double> points() const {
    std::vector<double> t(size());
    for (std::size_t j = 0; j < size(); ++j) t[j] = at(j);
    return t;
  }
  bool operator==(const TimeGrid&) const = default;
};

struct TrajectoryMeta {
  double alpha = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Modal coefficients on a time grid, stored time-major.
struct Trajectory {
  TimeGrid grid;
  std::size_t modes = 0;
  TrajectoryMeta meta;
  std::vector<Vec2> data;

  Trajectory() = default;
  Trajectory(const TimeGrid& g, std::size_t n, TrajectoryMeta m = {})
      : grid(g), modes(n), meta(m), data(g.size() * n, Vec2{0.0, 0.0}) {}

  Vec2& at(std::size_t j, std::size_t n) { return data[j * modes + n]; }
  const Vec2& at(std::size_t j, std::size_t n) const { return data[j * modes + n]; }
  ModalState state(std::size_t j) const {
    return ModalState(data.begin() + static_cast<std::ptrdiff_t>(j * modes),
                      data.begin() + static_cast<std::ptrdiff_t>((j + 1) * modes));
  }
  ModalState final_state() const { return state(grid.steps); }
};

/// Scalar boundary control sampled on a grid; piecewise linear in between.
struct ControlSignal {
  TimeGrid grid;
  std::vector<double> values;

  ControlSignal() = default;
  explicit ControlSignal(const TimeGrid& g) : grid(g), values(g.size(), 0.0) {}
  ControlSignal(const TimeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("ControlSignal: size mismatch");
  }
  double operator()(double t) const;
};

/// Modal source sampler f(t) -> per-mode 2-vectors.
using SourceFn = std::function<ModalState(double)>;

double l2_norm_sq(const ModalState& s);

}  // namespace degen
