#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlab/field.hpp"
#include "mlab/madelung.hpp"
#include "mlab/path.hpp"

namespace mlab {

// Coordinates are grid points (t, q1, q2, q3); the four-vector is x0 = v0 t, xk = qk.

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
/// jac[lambda][mu] = d A~_mu / d x_lambda
using Jac4 = std::array<Vec4, 4>;

/// Four-potential A~_mu, either from a closed-form generator (values and derivatives) or
/// tabulated on a 3+1D grid.
struct FourPotential {
  std::string generator;
  double v0 = 1.0;
  Point x0{};  ///< reference point of path integrals
  std::function<Vec4(const Point&)> value;
  std::function<Jac4(const Point&)> jacobian;
  std::function<bool(const Point&)> excluded;   ///< singular set left out of surface samples
  std::optional<std::array<RealField, 4>> table;

  bool closed_form() const { return !table.has_value(); }
  /// Components at p (interpolated when tabulated).
  Vec4 at(const Point& p) const;
};

/// A~ = (1/2) b x (q - center): uniform B~ = b.
FourPotential constant_b(const Vec3& b, const Vec3& center = {}, double v0 = 1.0);

/// Flux line along q3 through (c1, c2): A~_theta = flux / (2 pi r) outside the core radius,
/// the uniform-solenoid profile flux r / (2 pi r_core^2) inside. The core is the excluded set.
FourPotential flux_line(double flux, double c1, double c2, double core_radius, double v0 = 1.0);

/// A~_k = eps_k cos(k . q - v0 |k| t + phase), A~_0 = 0. Requires k . eps = 0.
FourPotential plane_wave(const Vec3& polarization, const Vec3& k, double phase = 0.0, double v0 = 1.0);

/// A~_mu = d Lambda / d x_mu with Lambda = amplitude sin(kappa . x).
FourPotential pure_gauge(double amplitude, const Vec4& kappa, double v0 = 1.0);

/// Tabulated components on a (t, q1, q2, q3) grid; x0 defaults to the grid corner.
FourPotential tabulated(std::array<RealField, 4> components, double v0 = 1.0);

/// Samples any potential onto a grid (the result is tabulated; x0 is kept).
FourPotential sample(const FourPotential& pot, const Grid& grid);

/// Closed-form sum (e.g. adding a pure gauge); x0, v0 and exclusion from the first.
FourPotential operator+(const FourPotential& a, const FourPotential& b);

/// A~_0 = -(e / hbar c) phi, A~_k = (e / hbar c) A_k, v0 = c.
FourPotential physical_to_tilde(const EmPotentials& em, double hbar);

/// C5 = integral of (dx_mu A~_mu) = integral of (dq_k A~_k + v0 dt A~_0) along the path.
double c5_path_integral(const FourPotential& pot, const PathSpec& path, std::size_t subdivisions = 256);

/// C = integral of (dq_k A_k - c dt phi) with the physical potentials; C5 = (e / hbar c) C.
double c_path_integral(const EmPotentials& em, const PathSpec& path, std::size_t subdivisions = 256);

/// Antisymmetric F~_mu_nu stored as its upper triangle.
class FieldTensor {
 public:
  FieldTensor(std::array<RealField, 6> upper, double v0);

  const Grid& grid() const { return f_[0].grid(); }
  double v0() const { return v0_; }
  /// F~_mu_nu; the lower triangle is the negated upper one and the diagonal is zero.
  RealField component(std::size_t mu, std::size_t nu) const;
  /// E~_k = -F~_0k and B~ with F~_12 = B~_3, F~_13 = -B~_2, F~_23 = B~_1 (k = 1..3).
  RealField e(std::size_t k) const;
  RealField b(std::size_t k) const;

  static std::size_t slot(std::size_t mu, std::size_t nu);

 private:
  std::array<RealField, 6> f_;
  double v0_;
};

/// Closed forms use their analytic derivatives at the grid nodes; tabulated potentials are
/// differentiated by finite differences on their own grid (pass that grid or the overload).
FieldTensor field_tensor(const FourPotential& pot, const Grid& grid);
FieldTensor field_tensor(const FourPotential& pot);

/// Tensor with F~_0k = -E_k and the B naming above.
FieldTensor tensor_from_eb(const std::array<RealField, 3>& e, const std::array<RealField, 3>& b, double v0);

struct StokesReport {
  double loop_integral = 0.0;
  double surface_integral = 0.0;
  double discrepancy = 0.0;  ///< loop - surface
  std::size_t axis_u = 0;
  std::size_t axis_v = 0;
  std::size_t surface_samples = 0;
  std::size_t excluded_samples = 0;
};

/// Both sides of the Stokes relation for a closed loop lying in an axis-aligned plane. The
/// surface side samples F~_uv at subdivisions^2 cell midpoints of the loop's bounding box,
/// weighted by the loop's winding number. Throws DomainError for non-planar or open loops.
StokesReport stokes_check(const FourPotential& pot, const PathSpec& loop, std::size_t subdivisions = 256);

/// (1/2) eps_kappa_lambda_mu_nu d F~_mu_nu / d x_lambda for kappa = 0..3 by finite differences.
/// Component 0 is div B~; components k are -(curl E~ + (1/v0) dB~/dt)_k.
std::array<RealField, 4> bianchi_residual(const FieldTensor& tensor);

struct MaxwellResidual {
  RealField div_b;
  std::array<RealField, 3> faraday;  ///< curl E~ + (1/v0) dB~/dt
};

MaxwellResidual maxwell_homogeneous_residual(const FieldTensor& tensor);

struct EBFields {
  std::array<RealField, 3> e;
  std::array<RealField, 3> b;
};

/// E = -(1/c) dA/dt - grad phi, B = curl A on a (t, q1, q2, q3) grid.
EBFields eb_from_potentials(const EmPotentials& em);

/// Paths from the reference point to each target; paths[i] all end at targets[i].
struct PathFamily {
  std::vector<Point> targets;
  std::vector<std::vector<PathSpec>> paths;
};

struct CompensationEntry {
  Point target{};
  std::vector<double> c5;     ///< per path
  std::vector<double> s_bar;  ///< S + hbar C5 per path
  double phase_spread = 0.0;  ///< max |exp(i S_bar_P / hbar) - exp(i S_bar_Q / hbar)|
};

struct CompensationReport {
  std::vector<CompensationEntry> entries;
  double tolerance = 1e-8;
  double max_phase_spread = 0.0;
  double max_action_spread = 0.0;  ///< max |S_bar_P - S_bar_Q|, the path dependence of the action
  std::size_t worst_target = 0;
  std::size_t path_a = 0;
  std::size_t path_b = 0;
  bool unique = true;  ///< exp(i S_bar / hbar) agrees across paths within tolerance
};

/// S_bar_P = S + hbar C5_P for every path of the family, with S a single-valued action
/// sampled on a grid containing the targets.
CompensationReport compensate_action(const RealField& s, const FourPotential& pot, const PathFamily& family,
                                     double hbar, double tolerance = 1e-8, std::size_t subdivisions = 256);

struct C6RejectionReport {
  RealField temporal;    ///< -2 rho_bar dC6/dt
  RealField convective;  ///< -2 rho_bar v . grad C6, v = (grad S_bar - (e/c) A) / m
  RealField source;      ///< temporal + convective: the terms rho_bar's continuity equation gains
  RealField coefficient; ///< source / rho_bar
  double max_source = 0.0;      ///< over interior nodes
  double cross_check = 0.0;     ///< max |e^{-2C6} cont(rho_bar e^{2C6}) - cont(rho_bar) + source|
  bool c6_survives = false;     ///< max_source > 0
};

/// Substitutes rho = rho_bar exp(2 C6) into the continuity equation and isolates the terms
/// that are not of divergence form. `em` (optional) supplies A for the kinetic velocity.
C6RejectionReport c6_rejection_demo(const RealField& rho_bar, const RealField& s_bar, const RealField& c6,
                                    double mass, const EmPotentials* em = nullptr);

}  // namespace mlab
