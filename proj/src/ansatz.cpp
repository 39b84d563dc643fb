#include "mlab/ansatz.hpp"

#include <cmath>
#include <sstream>

#include "mlab/diff.hpp"

namespace mlab {

Abbreviations abbreviations(double rho, double s, const LocalAnsatz& la) {
  const CoefficientSet& c = la.coeffs;
  const double md2 = la.mass * c.d_norm2();
  if (!(md2 > 0.0)) throw DomainError("ansatz: d vanishes");
  const double c2 = c.c2();
  if (c2 == 0.0) throw DomainError("ansatz: c2 vanishes, the closed form is undefined");
  if (rho < 0.0) throw DomainError("ansatz: negative density");
  const double sr = std::sqrt(rho);
  return {c2 * s / (2.0 * md2) + la.c5, c.c1() * s / (2.0 * md2) + la.c6, 2.0 * md2 / c2 * sr, sr / md2};
}

cplx chi_of(double rho, double s, const LocalAnsatz& la) {
  const Abbreviations ab = abbreviations(rho, s, la);
  const double decay = std::exp(-ab.v);
  return {-ab.w * std::cos(ab.u) * decay + la.c3, -ab.w * std::sin(ab.u) * decay + la.c4};
}

cplx f_multiplier(double rho, double s, const LocalAnsatz& la) {
  const Abbreviations ab = abbreviations(rho, s, la);
  const double d1 = la.coeffs.d.real();
  const double d2 = la.coeffs.d.imag();
  const double g = ab.t * std::exp(ab.v);
  const double su = std::sin(ab.u);
  const double cu = std::cos(ab.u);
  return {g * (d1 * su + d2 * cu), g * (d1 * cu - d2 * su)};
}

ChiDerivatives chi_derivatives(double rho, double s, const LocalAnsatz& la) {
  if (!(rho > 0.0)) throw DomainError("chi_derivatives: rho must be positive");
  const Abbreviations ab = abbreviations(rho, s, la);
  const double md2 = la.mass * la.coeffs.d_norm2();
  const double alpha = la.coeffs.c2() / (2.0 * md2);
  const double beta = la.coeffs.c1() / (2.0 * md2);
  const double we = ab.w * std::exp(-ab.v);
  const double su = std::sin(ab.u);
  const double cu = std::cos(ab.u);

  ChiDerivatives d;
  d.value = {-we * cu + la.c3, -we * su + la.c4};
  d.d_rho = {-we * cu / (2.0 * rho), -we * su / (2.0 * rho)};
  d.d_rho_rho = {we * cu / (4.0 * rho * rho), we * su / (4.0 * rho * rho)};
  const double s1 = alpha * su + beta * cu;
  const double s2 = beta * su - alpha * cu;
  d.d_s = {we * s1, we * s2};
  d.d_rho_s = {we * s1 / (2.0 * rho), we * s2 / (2.0 * rho)};
  const double ab2 = alpha * alpha - beta * beta;
  d.d_s_s = {we * (ab2 * cu - 2.0 * alpha * beta * su), we * (ab2 * su + 2.0 * alpha * beta * cu)};
  return d;
}

FhValues fh_functions(double s, double c1, double c2, double m_d2, double c5, double c6) {
  const double u = c2 * s / (2.0 * m_d2) + c5;
  const double tn = std::tan(u);
  const double cs = std::cos(u);
  if (!(tn > 0.0) || !(cs > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "fh_functions: ln tan / ln cos undefined at S = " << s;
    throw DomainError(os.str());
  }
  return {std::log(tn), -std::log(cs) - c1 * s / (2.0 * m_d2) - c6};
}

BarredCoefficients barred_coeffs(const CoefficientSet& c, cplx f) {
  auto bar = [f](cplx x) {
    return cplx(x.real() * f.real() - x.imag() * f.imag(), x.imag() * f.real() + x.real() * f.imag());
  };
  return {bar(c.a), bar(c.b), bar(c.d), bar(c.e)};
}

BarredCoefficients barred_coeffs_trig(double rho, double s, const LocalAnsatz& la) {
  const Abbreviations ab = abbreviations(rho, s, la);
  const CoefficientSet& c = la.coeffs;
  const double g = ab.t * std::exp(ab.v);
  const double su = std::sin(ab.u);
  const double cu = std::cos(ab.u);
  auto pattern = [&](double x1, double x2) {
    return cplx(g * (x1 * su - x2 * cu), g * (x1 * cu + x2 * su));
  };
  const double nd = c.d_norm2();
  return {pattern(c.c1(), c.c2()), pattern(c.g1(), c.g2()), cplx(nd * g * su, nd * g * cu),
          pattern(c.h1(), c.h2())};
}

LocalAnsatz AnsatzClosedForm::at(std::size_t node) const {
  return {coeffs.at(node), params.mass, params.c3[node], params.c4[node], params.c5[node],
          params.c6[node]};
}

namespace {

void require_space_time_1d(const Grid& g, const char* where) {
  if (g.rank() != 2 || !g.has_time()) {
    throw GridError(std::string(where) + ": needs a (t, q) grid");
  }
}

double max_over(const Grid& g, auto&& fn) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(fn(i)));
  return m;
}

}  // namespace

AnsatzClosedForm make_static_ansatz(const Grid& grid, const CoefficientSet& c, double mass, double c3,
                                    double c4, double c5, double c6) {
  require_space_time_1d(grid, "make_static_ansatz");
  const double md2 = mass * c.d_norm2();
  AnsatzParams p{mass,
                 RealField::constant(grid, c.c2() / (2.0 * md2)),
                 RealField::constant(grid, c3),
                 RealField::constant(grid, c4),
                 RealField::constant(grid, c5),
                 RealField::constant(grid, c6),
                 RealField::constant(grid, c.h1() / c.d_norm2()),
                 RealField::constant(grid, c.h2() / c.d_norm2())};
  CoefficientFields cf{ComplexField::constant(grid, c.a), ComplexField::constant(grid, c.b),
                       ComplexField::constant(grid, c.d), ComplexField::constant(grid, c.e)};
  AnsatzClosedForm closed{AnsatzMode::static_coefficients, std::move(p), std::move(cf), {}};
  closed.constraints = check_constraints(closed);
  return closed;
}

AnsatzClosedForm solve_constraints_static(const ComplexField& d, double r1, const RealField& f,
                                          double c5, double c6, double mass) {
  const Grid& g = d.grid();
  require_space_time_1d(g, "solve_constraints_static");
  require_same_grid(g, f.grid(), "solve_constraints_static");
  if (r1 == 0.0) throw DomainError("solve_constraints_static: r1 must be nonzero");
  if ((d.values().abs() == 0.0).any()) throw DomainError("solve_constraints_static: d vanishes");
  const cplx i(0.0, 1.0);
  AnsatzParams p{mass,
                 RealField::constant(g, r1 / (2.0 * mass)),
                 RealField::constant(g, 0.0),
                 RealField::constant(g, 0.0),
                 RealField::constant(g, c5),
                 RealField::constant(g, c6),
                 f,
                 RealField::constant(g, 0.0)};
  CoefficientFields cf{ComplexField(g, (i * r1) * d.values()), ComplexField::constant(g, 0.0), d,
                       ComplexField(g, f.values().cast<cplx>() * d.values())};
  AnsatzClosedForm closed{AnsatzMode::static_coefficients, std::move(p), std::move(cf), {}};
  closed.constraints = check_constraints(closed);
  return closed;
}

AnsatzClosedForm solve_constraints_static(const Grid& grid, cplx d, double r1, double f, double c5,
                                          double c6, double mass) {
  return solve_constraints_static(ComplexField::constant(grid, d), r1, RealField::constant(grid, f),
                                  c5, c6, mass);
}

AnsatzClosedForm solve_constraints_gauged(const ComplexField& d, const RealField& u_tilde,
                                          const RealField& c5, const RealField& c6,
                                          const RealField& h1, double mass) {
  const Grid& g = d.grid();
  require_space_time_1d(g, "solve_constraints_gauged");
  for (const RealField* f : {&u_tilde, &c5, &c6, &h1}) require_same_grid(g, f->grid(), "solve_constraints_gauged");
  if ((d.values().abs() == 0.0).any()) throw DomainError("solve_constraints_gauged: d vanishes");
  if ((u_tilde.values() == 0.0).any()) throw DomainError("solve_constraints_gauged: u_tilde vanishes");
  const double u_scale = u_tilde.values().abs().maxCoeff();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t row0 = i - g.index_along(i, 1) * g.stride(1);
    if (std::abs(u_tilde[i] - u_tilde[row0]) > 1e-12 * u_scale) {
      std::ostringstream os;
      os << "solve_constraints_gauged: u_tilde varies along q at t = " << g.point(i)[0];
      throw DomainError(os.str());
    }
  }
  const RealField c5q = diff(c5, 1), c5qq = diff(c5, 1, 2), c5t = diff(c5, 0);
  const RealField c6q = diff(c6, 1), c6t = diff(c6, 0);
  const RealField ut = diff(u_tilde, 0);
  const auto& u = u_tilde.values();
  const Eigen::ArrayXd h2 = 2.0 * mass * u * (ut.values() / u + c6t.values()) -
                            2.0 * c5q.values() * c6q.values() - c5qq.values();
  const cplx i(0.0, 1.0);
  ComplexField::Values a = (2.0 * mass * u).cast<cplx>() * i * d.values();
  ComplexField::Values b(d.values().size());
  ComplexField::Values e(d.values().size());
  for (Eigen::Index n = 0; n < b.size(); ++n) {
    b[n] = cplx(2.0 * c6q.values()[n], -2.0 * c5q.values()[n]) * d.values()[n];
    e[n] = cplx(h1.values()[n], h2[n]) * d.values()[n];
  }
  AnsatzParams p{mass, u_tilde, RealField::constant(g, 0.0), RealField::constant(g, 0.0), c5, c6, h1,
                 RealField(g, h2)};
  CoefficientFields cf{ComplexField(g, std::move(a)), ComplexField(g, std::move(b)), d,
                       ComplexField(g, std::move(e))};
  AnsatzClosedForm closed{AnsatzMode::gauged, std::move(p), std::move(cf), {}};
  closed.constraints = check_constraints(closed);
  return closed;
}

std::vector<ConstraintResidual> check_constraints(const AnsatzClosedForm& closed) {
  const Grid& g = closed.grid();
  const CoefficientFields& cf = closed.coeffs;
  auto nd = [&](std::size_t i) { return std::norm(cf.d[i]); };
  std::vector<ConstraintResidual> out;
  auto add = [&](std::string name, auto&& fn) {
    out.push_back({std::move(name), max_over(g, [&](std::size_t i) { return fn(i) / nd(i); })});
  };
  add("c1_zero", [&](std::size_t i) { return cf.at(i).c1(); });
  add("c3_zero", [&](std::size_t i) { return closed.params.c3[i] * nd(i); });
  add("c4_zero", [&](std::size_t i) { return closed.params.c4[i] * nd(i); });
  add("a_scale", [&](std::size_t i) {
    return cf.at(i).c2() - 2.0 * closed.params.mass * closed.params.u_tilde[i] * nd(i);
  });
  if (closed.mode == AnsatzMode::static_coefficients) {
    add("b_parallel_d", [&](std::size_t i) { return cf.at(i).g1(); });
    add("b_orthogonal_d", [&](std::size_t i) { return cf.at(i).g2(); });
    add("e_real_multiple_of_d", [&](std::size_t i) { return cf.at(i).h2(); });
    return out;
  }
  const RealField c5q = diff(closed.params.c5, 1), c5qq = diff(closed.params.c5, 1, 2);
  const RealField c6q = diff(closed.params.c6, 1), c6t = diff(closed.params.c6, 0);
  const RealField ut = diff(closed.params.u_tilde, 0);
  const RealField uq = diff(closed.params.u_tilde, 1);
  add("u_tilde_q_independent", [&](std::size_t i) { return uq[i] * nd(i); });
  add("b_real_part", [&](std::size_t i) { return cf.at(i).g1() - 2.0 * nd(i) * c6q[i]; });
  add("b_imag_part", [&](std::size_t i) { return cf.at(i).g2() + 2.0 * nd(i) * c5q[i]; });
  add("rho_s_coefficient", [&](std::size_t i) {
    const CoefficientSet c = cf.at(i);
    const double u = closed.params.u_tilde[i];
    const double n2 = nd(i);
    const double r = 2.0 * c.h2() / c.c2() - 2.0 * (ut[i] / u + c6t[i]) -
                     c.g1() * c.g2() / (c.c2() * n2) + 2.0 * (n2 / c.c2()) * c5qq[i];
    return r * n2;
  });
  return out;
}

PsiPotential to_psi_v(const AnsatzClosedForm& closed) {
  const Grid& g = closed.grid();
  const double m = closed.params.mass;
  const auto& u = closed.params.u_tilde.values();
  const RealField p(g, u.inverse());
  if (closed.mode == AnsatzMode::static_coefficients) {
    const RealField v(g, -(p.values().square() / (2.0 * m)) * closed.params.h1.values());
    return {p, v, v};
  }
  const RealField vt(g, -closed.params.h1.values() / (2.0 * m * u.square()));
  const RealField c5q = diff(closed.params.c5, 1), c5t = diff(closed.params.c5, 0);
  const RealField c6q = diff(closed.params.c6, 1), c6qq = diff(closed.params.c6, 1, 2);
  const Eigen::ArrayXd& pv = p.values();
  const RealField v(g, vt.values() +
                           pv.square() / (2.0 * m) *
                               (c6q.values().square() - c5q.values().square() + c6qq.values()) +
                           pv * c5t.values());
  return {p, v, vt};
}

ComplexField psi_of(const PsiPotential& pp, const MadelungPair& pair) {
  require_same_grid(pp.p.grid(), pair.rho.grid(), "psi_of");
  ComplexField::Values v(static_cast<Eigen::Index>(pair.rho.size()));
  for (std::size_t i = 0; i < pair.rho.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = std::polar(std::sqrt(pair.rho[i]), pair.s[i] / pp.p[i]);
  }
  return {pair.rho.grid(), std::move(v)};
}

ComplexField chi_field(const AnsatzClosedForm& closed, const RealField& rho, const RealField& s) {
  require_same_grid(closed.grid(), rho.grid(), "chi_field");
  require_same_grid(closed.grid(), s.grid(), "chi_field");
  ComplexField::Values v(static_cast<Eigen::Index>(rho.size()));
  for (std::size_t i = 0; i < rho.size(); ++i) v[static_cast<Eigen::Index>(i)] = chi_of(rho[i], s[i], closed.at(i));
  return {rho.grid(), std::move(v)};
}

ComplexField f_field(const AnsatzClosedForm& closed, const RealField& rho, const RealField& s) {
  require_same_grid(closed.grid(), rho.grid(), "f_field");
  require_same_grid(closed.grid(), s.grid(), "f_field");
  ComplexField::Values v(static_cast<Eigen::Index>(rho.size()));
  for (std::size_t i = 0; i < rho.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = f_multiplier(rho[i], s[i], closed.at(i));
  }
  return {rho.grid(), std::move(v)};
}

}  // namespace mlab
