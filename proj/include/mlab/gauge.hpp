#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mlab/field.hpp"
#include "mlab/madelung.hpp"

namespace mlab {

/// A positive, smooth scale p(t) that takes the place of hbar in the gauged equations.
/// Stores the value and its time derivative; `label` records the generator and parameters.
struct PSchedule {
  std::function<double(double)> value;
  std::function<double(double)> rate;
  std::string label;

  double operator()(double t) const { return value(t); }

  static PSchedule constant(double p0);
  /// p0 (1 + eps t)
  static PSchedule linear(double p0, double eps);
  /// p0 (1 + eps sin(omega t))
  static PSchedule sinusoidal(double p0, double eps, double omega);
};

/// Pointwise product (value by multiplication, rate by the product rule).
PSchedule operator*(const PSchedule& x, const PSchedule& y);

/// Throws DomainError when p is not strictly positive at any of `n` evenly spaced times
/// in [t0, t1] (endpoints included).
void require_positive(const PSchedule& p, double t0, double t1, std::size_t n = 257);

/// C5 and C6 on a space-time grid together with p(t).
struct DressingFields {
  RealField c5;
  RealField c6;
  PSchedule p;

  const Grid& grid() const { return c5.grid(); }
};

/// Validates shared grid, presence of a time axis and p > 0 over the time span.
DressingFields make_dressing(RealField c5, RealField c6, PSchedule p);

/// Identity dressing on a grid: C5 = C6 = 0, p = 1.
DressingFields identity_dressing(const Grid& grid);

enum class Direction { forward, inverse };

/// forward: chi -> chi exp(C6 - i C5) / p;  inverse: chi0 -> chi0 p exp(-(C6 - i C5)).
/// chi lives on the dressing grid.
ComplexField dress(const ComplexField& chi, const DressingFields& d, Direction direction);

/// As `dress` for a spatial snapshot at time-node `time_index` of the dressing grid.
ComplexField dress_slice(const ComplexField& chi, const DressingFields& d, std::size_t time_index,
                         Direction direction);

/// C5 and C6 add, p multiplies: dress(compose(x, y)) = dress(x) o dress(y).
DressingFields compose(const DressingFields& x, const DressingFields& y);

/// Vtilde = V - (p^2/2m)[|grad C6|^2 - |grad C5|^2 + lap C6] - p dC5/dt (finite differences).
RealField v_tilde_of_v(const RealField& v, const DressingFields& d, double mass);

/// The inverse relation, V from Vtilde.
RealField v_of_v_tilde(const RealField& v_tilde, const DressingFields& d, double mass);

/// e/(hbar c) multiplies A in the spatial substitution; e/hbar multiplies phi in the
/// temporal one.
struct CouplingConstants {
  double spatial = 0.0;
  double temporal = 0.0;
};

CouplingConstants coupling_constants(double charge, double hbar, double light_speed);

/// The substitution d/dq_k -> d/dq_k - i (e/hbar c) A_k, d/dt -> d/dt + i (e/hbar) phi,
/// bound to potentials sampled on a grid. With zero charge every method reduces to the
/// plain derivative.
class MinimalCoupling {
 public:
  MinimalCoupling(const EmPotentials& em, double hbar);

  const CouplingConstants& constants() const { return k_; }
  bool is_identity() const { return k_.spatial == 0.0 && k_.temporal == 0.0; }
  const Grid& grid() const { return phi_.grid(); }
  const RealField& a(std::size_t spatial_axis) const { return a_.at(spatial_axis); }
  const RealField& phi() const { return phi_; }

  /// (d/dq_k - i gamma A_k) psi on spatial axis k (0-based among spatial axes).
  ComplexField spatial(const ComplexField& psi, std::size_t k) const;
  /// (d/dt + i (e/hbar) phi) psi. Needs a time axis.
  ComplexField temporal(const ComplexField& psi) const;
  /// Expanded square: psi_qq - i gamma (A psi_q + (A psi)_q) - gamma^2 A^2 psi.
  ComplexField spatial_squared(const ComplexField& psi, std::size_t k) const;

 private:
  CouplingConstants k_;
  RealField phi_;
  std::vector<RealField> a_;
};

MinimalCoupling minimal_couple_operator(const EmPotentials& em, double hbar);

}  // namespace mlab
