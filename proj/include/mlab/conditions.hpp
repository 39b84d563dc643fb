#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mlab/ansatz.hpp"
#include "mlab/sampling.hpp"

namespace mlab {

struct LevelResult {
  std::size_t nodes = 0;
  double spacing = 0.0;  ///< finest spacing of the sampled axes at this level
  double linf = 0.0;
  double l2 = 0.0;       ///< root-mean-square over the evaluated points
};

/// One certified relation. Analytic relations pass when every level stays below
/// `tolerance`; finite-difference relations pass when the fitted convergence order is at
/// least `min_order` (or when every level already sits below `roundoff_floor`).
struct ConditionRecord {
  std::size_t index = 0;
  std::string name;
  std::string relation;
  bool finite_difference = false;
  double tolerance = 1e-10;
  double min_order = 1.8;
  std::vector<LevelResult> levels;
  double order = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

struct ConditionReport {
  std::string set;
  std::vector<ConditionRecord> records;

  bool all_pass() const;
  std::vector<std::size_t> failing() const;  ///< indices of failing records
  const ConditionRecord& by_name(const std::string& name) const;
  std::string table() const;
};

inline constexpr double roundoff_floor = 1e-11;

/// Least-squares slope of log(error) against log(spacing).
double fitted_order(const std::vector<LevelResult>& levels);

/// Applies the pass policy to a record whose levels are filled in.
void finalize(ConditionRecord& record);

using ClosedFormBuilder = std::function<AnsatzClosedForm(const Grid&)>;

/// LHS - RHS of the fundamental requirement on a (t, q) grid:
///   Re[F (a chi_t + b chi_q + d chi_qq + e chi)] = rho_t + rho_q S_q / m + rho S_qq / m,
/// with total derivatives of chi(rho(q,t), S(q,t), q, t) by finite differences.
struct FundamentalResidual {
  RealField real;    ///< Re(LHS) - RHS
  RealField imag;    ///< Im(LHS), the induced second equation
  RealField lhs_re;  ///< Re(LHS)
  RealField rhs;
};

FundamentalResidual fundamental_residual(const AnsatzClosedForm& closed, const RealField& rho,
                                         const RealField& s, double f_scale = 1.0);

/// Refinement study of the real part of the fundamental requirement (interior nodes).
ConditionReport check_fundamental(const ClosedFormBuilder& build, const SamplePlan& plan);

/// Coefficients X' = X + delta * (X if X != 0 else d), applied to one of a, b, d, e.
CoefficientFields perturb_coefficient(const CoefficientFields& c, char which, cplx delta);

/// The ten static conditions evaluated with chi-derivatives in rho and S taken analytically.
/// `equation` (default: the closed form's own coefficients) supplies the coefficients of the
/// linear equation while chi and F are always derived from `closed`.
ConditionReport check_static_set(const AnsatzClosedForm& closed, const SamplePlan& plan,
                                 const CoefficientFields* equation = nullptr);

/// The extended set for space-time dependent coefficients; explicit q and t derivatives of
/// chi (rho and S held fixed) are finite differences. Evaluated on plan.levels refinements.
ConditionReport check_extended_set(const ClosedFormBuilder& build, const SamplePlan& plan);

struct AppendixSamples {
  std::vector<double> rho{0.3, 1.0, 2.5};
  double s_min = 0.0;
  double s_max = 1.0;
  double rho_min = 0.5;
  double rho_max = 3.0;
  std::size_t base_count = 17;
  std::size_t levels = 3;
};

/// Intermediate identities of the constructive derivation of chi and F for constant
/// coefficients (c1 may be nonzero). Uses the coefficients at node 0 of `closed`.
ConditionReport check_appendix_a(const AnsatzClosedForm& closed, const AppendixSamples& samples);

}  // namespace mlab
