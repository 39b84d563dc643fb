#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlab/field.hpp"
#include "mlab/gauge.hpp"
#include "mlab/madelung.hpp"

namespace mlab {

/// f(t, x) with x the spatial coordinates (entries past the spatial rank are unused).
using ScalarFn = std::function<double(double, const Point&)>;

enum class BoundaryKind {
  reflecting,  ///< psi = 0 on the outermost nodes
  periodic     ///< node count * spacing is the period; the last node is not repeated
};

/// Space axis of n nodes covering [a, a + length) for a periodic boundary.
Axis periodic_axis(double a, double length, std::size_t n);

/// Which form of the p(t) equation a schedule drives.
enum class PForm {
  undressed,  ///< i p chi0_t = -(p^2/2m) chi0_qq + V chi0
  amplitude   ///< i p chibar_t = -(p^2/2m) chibar_qq + V chibar + i p' chibar
};

/// Time-dependent electromagnetic potentials for the gauged equation.
struct TimeDependentEm {
  ScalarFn phi;            ///< empty: phi = 0
  std::vector<ScalarFn> a; ///< one per spatial axis; empty entries mean 0
  double charge = 1.0;
  double light_speed = 1.0;
};

/// Dressing fields and the dressed-equation potential Vtilde on a space-time grid whose
/// spatial part is the problem grid. Values between time nodes are linearly interpolated.
struct DressedTerms {
  DressingFields fields;
  RealField v_tilde;
};

struct EvolutionProblem {
  explicit EvolutionProblem(ComplexField initial_state) : initial(std::move(initial_state)) {}

  ComplexField initial;              ///< on a purely spatial grid (1 or 2 axes)
  double mass = 1.0;
  double hbar = 1.0;
  ScalarFn potential;                ///< empty: V = 0
  std::optional<PSchedule> p;        ///< replaces hbar in the p(t) equations
  PForm p_form = PForm::undressed;
  std::optional<TimeDependentEm> em;
  std::optional<DressedTerms> dressing;
  double dt = 1e-3;
  double t0 = 0.0;
  std::vector<BoundaryKind> boundary;  ///< per spatial axis; empty: all reflecting
  bool unnormalized = false;           ///< skip the unit-norm check on the initial state
};

struct SolverState {
  ComplexField psi;
  double time = 0.0;
  std::size_t step = 0;
};

/// Checks the problem invariants (dt > 0, grid shape, normalization, boundary list,
/// dressing grid, p > 0 at t0). Throws DomainError, GridError or SolverError.
void validate(const EvolutionProblem& problem);

SolverState initial_state(const EvolutionProblem& problem);

/// sum |psi|^2 times the spatial cell volume.
double norm(const ComplexField& psi);

/// Accuracy (not stability) warnings for the step at time t: dt max|V| / hbar > 0.5 and
/// dt > m dx^2 / hbar.
std::vector<std::string> accuracy_warnings(const EvolutionProblem& problem, double t);

enum class StepMode { plain, p_of_t, gauged, dressed };

/// Crank-Nicolson integrator for i P psi_t = H(t) psi with coefficients at the midpoint of
/// each step. Caches derived coefficient data of the problem; the free step functions
/// below construct one per call.
class Integrator {
 public:
  Integrator(const EvolutionProblem& problem, StepMode mode);

  SolverState step(const SolverState& state) const;
  /// Re <psi, H(t) psi> / <psi, psi>.
  double energy(const ComplexField& psi, double t) const;
  /// (H(t) psi) on every node (zero on reflecting boundary nodes).
  ComplexField apply_hamiltonian(const ComplexField& psi, double t) const;
  StepMode mode() const { return mode_; }

  struct Coefficients;

 private:
  Coefficients assemble(double t) const;

  const EvolutionProblem* problem_;
  StepMode mode_;
  std::vector<RealField> dressing_derivs_;  // c5q, c5qq, c6q, c6t on the dressing grid
};

/// One step of the plain equation i hbar psi_t = -(hbar^2/2m) lap psi + V psi.
/// Throws SolverError when the problem also carries p(t), potentials or dressing.
SolverState step_cn(const EvolutionProblem& problem, const SolverState& state);
/// One step with p(t) in place of hbar; the amplitude form multiplies by p(t2)/p(t1).
SolverState step_p_of_t(const EvolutionProblem& problem, const SolverState& state);
/// One step of the minimally coupled equation.
SolverState step_gauged(const EvolutionProblem& problem, const SolverState& state);
/// One step of the C5/C6-dressed equation
///   i p chi_t = -(p^2/2m)(chi_qq + 2 k_q chi_q) + [Vtilde + i((p^2/2m)(2 C5_q C6_q + C5_qq) + p' - p C6_t)] chi,
/// k = C6 - i C5 (one spatial dimension).
SolverState step_dressed(const EvolutionProblem& problem, const SolverState& state);

/// The mode implied by the optional parts of the problem.
StepMode default_mode(const EvolutionProblem& problem);

struct EvolveOptions {
  bool continuity = true;  ///< Madelung continuity residual per snapshot (plain and gauged)
  bool energy = true;      ///< per-step energy (plain and gauged)
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<ComplexField> snapshots;
  std::vector<double> norms;   ///< per step, starting with the initial state
  std::vector<double> energy;  ///< per step; empty when not applicable
  std::vector<std::optional<ResidualSummary>> continuity;  ///< per snapshot
  std::vector<std::string> warnings;
  std::size_t steps = 0;
  StepMode mode = StepMode::plain;
};

/// Steps horizon/dt times (horizon must be a whole multiple of dt) and snapshots every
/// `snapshot_every` steps plus the final state.
EvolutionTrace evolve(const EvolutionProblem& problem, double horizon, std::size_t snapshot_every,
                      const EvolveOptions& options = {});

/// i hbar psi_t + (hbar^2/2m) lap psi - V psi - r |psi|^2 psi on a space-time field.
/// With psi = sqrt(rho) exp(i S/hbar): psi* R = -rho QHJ + i (hbar/2) continuity (r = 0),
/// and r adds r rho to the QHJ part only.
ComplexField schrodinger_residual(const ComplexField& psi, const RealField& v, double mass, double hbar,
                                  double cubic = 0.0);

/// Stack of consecutive spatial snapshots as one space-time field.
ComplexField stack_in_time(const std::vector<ComplexField>& slices, double t0, double dt);

/// Index box around the bulk of |psi| (nodes above `fraction` of the peak modulus along
/// every axis), used to restrict phase continuation to where the phase is defined.
IndexBox support_box(const ComplexField& psi, double fraction = 1e-6);

}  // namespace mlab
