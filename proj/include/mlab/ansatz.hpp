#pragma once

#include <string>
#include <vector>

#include "mlab/field.hpp"
#include "mlab/madelung.hpp"

namespace mlab {

/// The four complex coefficients of the linear equation a chi_t + b chi_q + d chi_qq + e chi = 0
/// together with their derived real combinations. The combinations are always recomputed
/// from a, b, d, e:
///   c1 + i c2 = a conj(d),  g1 + i g2 = b conj(d),  h1 + i h2 = e conj(d).
struct CoefficientSet {
  cplx a{};
  cplx b{};
  cplx d{1.0, 0.0};
  cplx e{};

  double c1() const { return a.real() * d.real() + a.imag() * d.imag(); }
  double c2() const { return a.imag() * d.real() - a.real() * d.imag(); }
  double g1() const { return b.real() * d.real() + b.imag() * d.imag(); }
  double g2() const { return b.imag() * d.real() - b.real() * d.imag(); }
  double h1() const { return e.real() * d.real() + e.imag() * d.imag(); }
  double h2() const { return e.imag() * d.real() - e.real() * d.imag(); }
  double d_norm2() const { return std::norm(d); }
};

/// Everything the closed forms need at one (q, t): coefficients, mass and the
/// integration constants C3..C6.
struct LocalAnsatz {
  CoefficientSet coeffs;
  double mass = 1.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double c6 = 0.0;
};

/// U = c2 S / (2 m |d|^2) + C5, V = c1 S / (2 m |d|^2) + C6,
/// W = (2 m |d|^2 / c2) sqrt(rho), T = sqrt(rho) / (m |d|^2).
struct Abbreviations {
  double u;
  double v;
  double w;
  double t;
};

Abbreviations abbreviations(double rho, double s, const LocalAnsatz& la);

/// chi = chi1 + i chi2 with chi1 = -W cos U e^{-V} + C3 and chi2 = -W sin U e^{-V} + C4.
cplx chi_of(double rho, double s, const LocalAnsatz& la);

/// F = F1 + i F2 with F1 = T e^V (d1 sin U + d2 cos U), F2 = T e^V (d1 cos U - d2 sin U).
cplx f_multiplier(double rho, double s, const LocalAnsatz& la);

/// chi and its first and second partial derivatives with respect to rho and S.
struct ChiDerivatives {
  cplx value;
  cplx d_rho;
  cplx d_s;
  cplx d_rho_rho;
  cplx d_s_s;
  cplx d_rho_s;
};

ChiDerivatives chi_derivatives(double rho, double s, const LocalAnsatz& la);

struct FhValues {
  double f;
  double h;
};

/// f = ln tan(c2 S/(2 m|d|^2) + C5), h = -ln cos(...) - c1 S/(2 m|d|^2) - C6.
/// m_d2 is m |d|^2. Throws DomainError naming S when tan or cos is not positive.
FhValues fh_functions(double s, double c1, double c2, double m_d2, double c5, double c6);

/// Products of the coefficients with the multiplier F, e.g. abar = a F, stored as complex
/// numbers so that abar1 = a1 F1 - a2 F2 and abar2 = a2 F1 + a1 F2.
struct BarredCoefficients {
  cplx a;
  cplx b;
  cplx d;
  cplx e;
};

BarredCoefficients barred_coeffs(const CoefficientSet& c, cplx f);

/// The same barred coefficients written through U, V, T and the derived combinations.
BarredCoefficients barred_coeffs_trig(double rho, double s, const LocalAnsatz& la);

enum class AnsatzMode { static_coefficients, gauged };

/// Coefficient fields on a (t, q) grid.
struct CoefficientFields {
  ComplexField a;
  ComplexField b;
  ComplexField d;
  ComplexField e;

  CoefficientSet at(std::size_t node) const { return {a[node], b[node], d[node], e[node]}; }
};

/// Ansatz parameters as fields on the (t, q) grid; C5 and C6 are fields in both modes.
///
/// In static mode u_tilde = r1 / 2m is constant, h1 holds f (e = f d) and h2 is zero.
/// In gauged mode e = (h1 + i h2) d with h2 fixed by the consistency formula.
struct AnsatzParams {
  double mass = 1.0;
  RealField u_tilde;
  RealField c3;
  RealField c4;
  RealField c5;
  RealField c6;
  RealField h1;
  RealField h2;
};

struct ConstraintResidual {
  std::string name;
  double max_abs;  ///< largest |residual| / |d|^2 over the grid
};

struct AnsatzClosedForm {
  AnsatzMode mode;
  AnsatzParams params;
  CoefficientFields coeffs;
  std::vector<ConstraintResidual> constraints;

  const Grid& grid() const { return coeffs.d.grid(); }
  LocalAnsatz at(std::size_t node) const;
};

/// Closed form built directly from one constant coefficient set (no constraints imposed);
/// used to look at the ansatz before c1 = 0 is enforced.
AnsatzClosedForm make_static_ansatz(const Grid& grid, const CoefficientSet& c, double mass = 1.0,
                                    double c3 = 0.0, double c4 = 0.0, double c5 = 0.0,
                                    double c6 = 0.0);

/// a = i r1 d, b = 0, e = f d, C3 = C4 = 0.
AnsatzClosedForm solve_constraints_static(const ComplexField& d, double r1, const RealField& f,
                                          double c5 = 0.0, double c6 = 0.0, double mass = 1.0);
AnsatzClosedForm solve_constraints_static(const Grid& grid, cplx d, double r1, double f,
                                          double c5 = 0.0, double c6 = 0.0, double mass = 1.0);

/// a = 2 i m u d, b = (2 C6_q - 2 i C5_q) d, e = (H1 + i H2) d with
/// H2 = 2 m u (u_t / u + C6_t) - 2 C5_q C6_q - C5_qq. Derivatives are finite differences.
/// Throws DomainError when u_tilde varies along q or vanishes.
AnsatzClosedForm solve_constraints_gauged(const ComplexField& d, const RealField& u_tilde,
                                          const RealField& c5, const RealField& c6,
                                          const RealField& h1, double mass = 1.0);

/// Recomputes the named constraint residuals of a closed form.
std::vector<ConstraintResidual> check_constraints(const AnsatzClosedForm& closed);

/// Wave-function scale p (hbar in static mode, 1/u_tilde in gauged mode) and potentials:
/// static: V = -(hbar^2 / 2m) f; gauged: Vtilde = -H1 / (2 m u^2) and V recovered from Vtilde.
struct PsiPotential {
  RealField p;
  RealField v;
  RealField v_tilde;
};

PsiPotential to_psi_v(const AnsatzClosedForm& closed);

/// sqrt(rho) exp(i S / p) nodewise.
ComplexField psi_of(const PsiPotential& pp, const MadelungPair& pair);

/// chi and F evaluated nodewise with the local ansatz at each node.
ComplexField chi_field(const AnsatzClosedForm& closed, const RealField& rho, const RealField& s);
ComplexField f_field(const AnsatzClosedForm& closed, const RealField& rho, const RealField& s);

}  // namespace mlab
