#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "degen/modal.hpp"
#include "degen/spectrum.hpp"

namespace degen {

/// Eigenfunctions sampled at fixed points, for repeated reconstruction.
struct PointTable {
  std::vector<double> x;
  std::size_t modes = 0;
  std::vector<double> phi;      // phi[n * x.size() + p]
  std::vector<double> profile;  // x^{2 - alpha}

  double at(std::size_t n, std::size_t p) const { return phi[n * x.size() + p]; }
};

/// Physical-space view of a spectral truncation: quadrature, projection, reconstruction.
/// Quadrature is Gauss-Legendre in s = x^kappa, which absorbs the x^{(1-alpha)/2} factor.
class Basis {
 public:
  explicit Basis(const SpectralTruncation& s, std::size_t quad_nodes = 0);

  std::size_t modes() const { return spec_.size(); }
  const SpectralTruncation& spectrum() const { return spec_; }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& weights() const { return w_; }
  double phi_at_node(std::size_t n, std::size_t q) const { return phi_[n * x_.size() + q]; }

  /// <F, Phi_n> for F given at the quadrature nodes.
  std::vector<double> project_values(std::span<const double> values) const;
  std::vector<double> project(const std::function<double(double)>& F) const;
  ModalState project(const std::function<Vec2(double)>& F) const;

  /// g_n = <x^{2-alpha}, Phi_n>.
  const std::vector<double>& lifting() const { return lift_; }

  PointTable table(std::span<const double> xs) const;

  /// Component comp (0 or 1) of the state at the table points. With lifted = true the
  /// boundary value (v B)_comp is carried by x^{2-alpha} and removed from the modes.
  std::vector<double> reconstruct(const PointTable& t, const ModalState& c, int comp, double boundary = 0.0,
                                  bool lifted = true) const;

 private:
  SpectralTruncation spec_;
  std::vector<double> x_, w_, phi_, lift_;
};

}  // namespace degen
