#pragma once

#include <span>
#include <vector>

#include "degen/basis.hpp"
#include "degen/modal.hpp"

namespace degen {

struct CoefficientNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double hm1 = 0.0;
};

/// Discrete norms against the eigenbasis: weights 1, 1 + lambda_n, 1 / (1 + lambda_n).
CoefficientNorms coefficient_norms(const ModalState& c, std::span<const double> lambda);
double hm1_norm(const ModalState& c, std::span<const double> lambda);
/// Norms of a single component (0 or 1).
CoefficientNorms component_norms(const ModalState& c, std::span<const double> lambda, int comp);

struct WeightSpec {
  double T = 1.0;
  double p = 2.0;
  double q = 1.2;
  double M = 1.0;

  void validate() const;
  /// q^2 < 2p / (p + 1), needed for the nonlinear argument.
  bool nonlinear_compatible() const { return q * q > 1.0 && q * q < 2.0 * p / (p + 1.0); }
  double plateau_end() const { return T * (1.0 - 1.0 / (q * q)); }
};

enum class WeightKind { Gamma, RhoF, Rho0 };

/// Weight value; rho_F and rho_0 are constant on [0, T(1 - 1/q^2)] and vanish at T.
double weight_rho(double t, const WeightSpec& spec, WeightKind which);
/// Logarithm of weight_rho (-inf at t = T for the rho weights).
double log_weight_rho(double t, const WeightSpec& spec, WeightKind which);
/// Tail formula without the initial plateau.
double weight_rho_tail(double t, const WeightSpec& spec, WeightKind which);
double log_weight_rho_tail(double t, const WeightSpec& spec, WeightKind which);

/// sqrt(sum width_j sq_j / rho(t_j)^2); entries with sq_j = 0 contribute 0.
double weighted_l2(std::span<const double> t, std::span<const double> width, std::span<const double> sq,
                   const WeightSpec& spec, WeightKind which);
/// max_j |value_j| / rho(t_j); zero values contribute 0.
double weighted_sup(std::span<const double> t, std::span<const double> value, const WeightSpec& spec,
                    WeightKind which);

/// Time samples of a piecewise object, evaluated at cell midpoints so that t = T is never hit.
struct MidpointSamples {
  std::vector<double> t, width, sq;
};

/// Squared L2(0,1) norms (component comp, or both if comp < 0) of midpoint states.
MidpointSamples midpoint_samples(std::span<const Trajectory> pieces, int comp = -1);
MidpointSamples midpoint_samples(std::span<const ControlSignal> pieces);

struct WeightedNorms {
  double F = 0.0;   // ||f / rho_F||, source
  double V = 0.0;   // ||v / rho_0||, control
  double H0 = 0.0;  // ||y / rho_0||
  double H = 0.0;   // (||y_1 / rho_0||^2 + sup |y_2 / rho_0|^2)^{1/2}
};

/// sup over grid nodes (t < T) and the table points of |y_comp / rho_0|.
double sup_component_over_weight(std::span<const Trajectory> pieces, const Basis& basis, const PointTable& table,
                                 int comp, const WeightSpec& spec, WeightKind which);

double source_norm_F(std::span<const Trajectory> source_pieces, const WeightSpec& spec);
double control_norm_V(std::span<const ControlSignal> pieces, const WeightSpec& spec);
double state_norm_H0(std::span<const Trajectory> pieces, const WeightSpec& spec);
double state_norm_H(std::span<const Trajectory> pieces, const Basis& basis, const PointTable& table,
                    const WeightSpec& spec);

}  // namespace degen
