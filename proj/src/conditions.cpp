#include "mlab/conditions.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mlab/diff.hpp"

namespace mlab {

bool ConditionReport::all_pass() const {
  for (const ConditionRecord& r : records) {
    if (!r.pass) return false;
  }
  return !records.empty();
}

std::vector<std::size_t> ConditionReport::failing() const {
  std::vector<std::size_t> out;
  for (const ConditionRecord& r : records) {
    if (!r.pass) out.push_back(r.index);
  }
  return out;
}

const ConditionRecord& ConditionReport::by_name(const std::string& name) const {
  for (const ConditionRecord& r : records) {
    if (r.name == name) return r;
  }
  throw Error("no condition named " + name + " in report " + set);
}

std::string ConditionReport::table() const {
  std::ostringstream os;
  os << set << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "  %-3s %-30s %-4s %12s %8s  %s\n", "#", "condition", "fd", "max linf",
                "order", "status");
  os << line;
  for (const ConditionRecord& r : records) {
    double worst = 0.0;
    for (const LevelResult& l : r.levels) worst = std::max(worst, l.linf);
    std::snprintf(line, sizeof line, "  %-3zu %-30s %-4s %12.3e %8.3f  %s\n", r.index, r.name.c_str(),
                  r.finite_difference ? "yes" : "no", worst, r.order, r.pass ? "pass" : "FAIL");
    os << line;
  }
  return os.str();
}

double fitted_order(const std::vector<LevelResult>& levels) {
  if (levels.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(levels.size());
  for (const LevelResult& l : levels) {
    if (!(l.linf > 0.0) || !(l.spacing > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(l.spacing);
    const double y = std::log(l.linf);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void finalize(ConditionRecord& r) {
  double worst = 0.0;
  for (const LevelResult& l : r.levels) worst = std::max(worst, l.linf);
  if (!r.finite_difference) {
    r.pass = !r.levels.empty() && worst < r.tolerance;
    return;
  }
  if (r.levels.size() < 3) {
    r.pass = false;
    return;
  }
  r.order = fitted_order(r.levels);
  r.pass = worst < roundoff_floor || (std::isfinite(r.order) && r.order >= r.min_order);
}

namespace {

enum Coef { A, B, D, E };
enum Deriv { VAL, R, S_, RR, SS, RS };
enum Target { ZERO, ONE, HALF_M, RHO_M };

struct Def {
  const char* name;
  const char* relation;
  Coef coef;
  Deriv deriv;
  Target target;
};

constexpr std::array<Def, 10> static_defs{{
    {"a_chi_s", "Re(abar chi_S) = 0", A, S_, ZERO},
    {"d_chi_rho_rho", "Re(dbar chi_rho_rho) = 0", D, RR, ZERO},
    {"d_chi_s_s", "Re(dbar chi_SS) = 0", D, SS, ZERO},
    {"b_chi_rho", "Re(bbar chi_rho) = 0", B, R, ZERO},
    {"b_chi_s", "Re(bbar chi_S) = 0", B, S_, ZERO},
    {"d_chi_rho", "Re(dbar chi_rho) = 0", D, R, ZERO},
    {"a_chi_rho", "Re(abar chi_rho) = 1", A, R, ONE},
    {"d_chi_rho_s", "Re(dbar chi_rhoS) = 1/2m", D, RS, HALF_M},
    {"d_chi_s", "Re(dbar chi_S) = rho/m", D, S_, RHO_M},
    {"e_chi", "Re(ebar chi) = 0", E, VAL, ZERO},
}};

cplx pick(const BarredCoefficients& bc, Coef c) {
  switch (c) {
    case A: return bc.a;
    case B: return bc.b;
    case D: return bc.d;
    case E: return bc.e;
  }
  return {};
}

cplx pick(const ChiDerivatives& cd, Deriv d) {
  switch (d) {
    case VAL: return cd.value;
    case R: return cd.d_rho;
    case S_: return cd.d_s;
    case RR: return cd.d_rho_rho;
    case SS: return cd.d_s_s;
    case RS: return cd.d_rho_s;
  }
  return {};
}

// Real part of xbar * dchi written out in components.
double re_product(cplx xbar, cplx dchi) { return xbar.real() * dchi.real() - xbar.imag() * dchi.imag(); }

double target_value(Target t, double rho, double mass) {
  switch (t) {
    case ZERO: return 0.0;
    case ONE: return 1.0;
    case HALF_M: return 0.5 / mass;
    case RHO_M: return rho / mass;
  }
  return 0.0;
}

// Normalized residual: inhomogeneous targets divide by |target|; homogeneous relations
// divide by |F| |d| sum|dchi|, the size every term takes once coefficients are multiples of d.
double normalized(double value, double target, double ref_scale) {
  const double scale = target != 0.0 ? std::abs(target) : ref_scale;
  const double r = std::abs(value - target);
  return scale > 0.0 ? r / scale : r;
}

struct Accumulator {
  double linf = 0.0;
  double sum2 = 0.0;
  std::size_t n = 0;
  void add(double r) {
    linf = std::max(linf, r);
    sum2 += r * r;
    ++n;
  }
  LevelResult result(std::size_t nodes, double spacing) const {
    return {nodes, spacing, linf, n ? std::sqrt(sum2 / static_cast<double>(n)) : 0.0};
  }
};

double finest_spacing(const Grid& g) {
  double h = g.axis(0).spacing();
  for (std::size_t k = 1; k < g.rank(); ++k) h = std::min(h, g.axis(k).spacing());
  return h;
}

void require_positive(const RealField& rho, const char* where) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) {
      throw DomainError(std::string(where) + ": rho <= 0 at node " + std::to_string(i));
    }
  }
}

ConditionReport make_report(const std::string& set, bool fd_in_4_5_10) {
  ConditionReport rep{set, {}};
  for (std::size_t k = 0; k < static_defs.size(); ++k) {
    ConditionRecord r;
    r.index = k + 1;
    r.name = static_defs[k].name;
    r.relation = static_defs[k].relation;
    rep.records.push_back(r);
  }
  if (fd_in_4_5_10) {
    rep.records[3].name = "b_chi_rho_explicit";
    rep.records[3].relation = "Re(bbar chi_rho) + 2 Re(dbar chi_rho_q) = 0";
    rep.records[4].name = "b_chi_s_explicit";
    rep.records[4].relation = "Re(bbar chi_S) + 2 Re(dbar chi_S_q) = 0";
    rep.records[9].name = "e_chi_explicit";
    rep.records[9].relation = "Re(ebar chi + abar chi_t + bbar chi_q + dbar chi_qq) = 0";
    for (std::size_t k : {3, 4, 9}) rep.records[k].finite_difference = true;
  }
  return rep;
}

}  // namespace

FundamentalResidual fundamental_residual(const AnsatzClosedForm& closed, const RealField& rho,
                                         const RealField& s, double f_scale) {
  const Grid& g = closed.grid();
  require_positive(rho, "fundamental_residual");
  const ComplexField chi = chi_field(closed, rho, s);
  const ComplexField f = f_field(closed, rho, s);
  const ComplexField chi_t = diff(chi, 0), chi_q = diff(chi, 1), chi_qq = diff(chi, 1, 2);
  const CoefficientFields& c = closed.coeffs;
  const ComplexField::Values lhs =
      f_scale * f.values() *
      (c.a.values() * chi_t.values() + c.b.values() * chi_q.values() + c.d.values() * chi_qq.values() +
       c.e.values() * chi.values());
  const RealField rho_t = diff(rho, 0), rho_q = diff(rho, 1);
  const RealField s_q = diff(s, 1), s_qq = diff(s, 1, 2);
  const double m = closed.params.mass;
  const RealField rhs(g, rho_t.values() + rho_q.values() * s_q.values() / m +
                             rho.values() * s_qq.values() / m);
  const RealField lhs_re(g, lhs.real());
  return {lhs_re - rhs, RealField(g, lhs.imag()), lhs_re, rhs};
}

ConditionReport check_fundamental(const ClosedFormBuilder& build, const SamplePlan& plan) {
  ConditionReport rep{"fundamental", {}};
  ConditionRecord rec;
  rec.index = 1;
  rec.name = "fundamental_real";
  rec.relation = "Re[F (a chi_t + b chi_q + d chi_qq + e chi)] - (rho_t + rho_q S_q/m + rho S_qq/m)";
  rec.finite_difference = true;
  const auto pairs = plan.draw();
  Grid g = plan.grid;
  for (std::size_t level = 0; level < plan.levels; ++level) {
    if (level > 0) g = refine(g, 2);
    const AnsatzClosedForm closed = build(g);
    Accumulator acc;
    for (const auto& [rf, sf] : pairs) {
      const FundamentalResidual fr = fundamental_residual(closed, rf.sample(g), sf.sample(g));
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.interior(i)) acc.add(std::abs(fr.real[i]));
      }
    }
    rec.levels.push_back(acc.result(g.size(), finest_spacing(g)));
  }
  finalize(rec);
  rep.records.push_back(rec);
  return rep;
}

CoefficientFields perturb_coefficient(const CoefficientFields& c, char which, cplx delta) {
  auto bump = [&](const ComplexField& x) {
    ComplexField::Values v = x.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const cplx base = v[i] != cplx{} ? v[i] : c.d.values()[i];
      v[i] += delta * base;
    }
    return ComplexField(x.grid(), std::move(v));
  };
  CoefficientFields out = c;
  switch (which) {
    case 'a': out.a = bump(c.a); break;
    case 'b': out.b = bump(c.b); break;
    case 'd': out.d = bump(c.d); break;
    case 'e': out.e = bump(c.e); break;
    default: throw DomainError(std::string("perturb_coefficient: unknown coefficient '") + which + "'");
  }
  return out;
}

ConditionReport check_static_set(const AnsatzClosedForm& closed, const SamplePlan& plan,
                                 const CoefficientFields* equation) {
  if (closed.mode != AnsatzMode::static_coefficients) {
    throw DomainError("check_static_set: closed form is not in static mode");
  }
  const Grid& g = closed.grid();
  require_same_grid(g, plan.grid, "check_static_set");
  const CoefficientFields& eq = equation ? *equation : closed.coeffs;
  ConditionReport rep = make_report("static", false);
  std::array<Accumulator, 10> acc;
  for (const auto& [rf, sf] : plan.draw()) {
    const RealField rho = rf.sample(g), s = sf.sample(g);
    require_positive(rho, "check_static_set");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const LocalAnsatz la = closed.at(i);
      const cplx f = f_multiplier(rho[i], s[i], la);
      const ChiDerivatives cd = chi_derivatives(rho[i], s[i], la);
      const CoefficientSet ec = eq.at(i);
      const BarredCoefficients bc = barred_coeffs(ec, f);
      const double ref = std::abs(f) * std::abs(ec.d);
      for (std::size_t k = 0; k < static_defs.size(); ++k) {
        const Def& def = static_defs[k];
        const cplx dchi = pick(cd, def.deriv);
        const double value = re_product(pick(bc, def.coef), dchi);
        acc[k].add(normalized(value, target_value(def.target, rho[i], la.mass), ref * std::abs(dchi)));
      }
    }
  }
  for (std::size_t k = 0; k < 10; ++k) {
    rep.records[k].levels.push_back(acc[k].result(g.size(), finest_spacing(g)));
    finalize(rep.records[k]);
  }
  return rep;
}

ConditionReport check_extended_set(const ClosedFormBuilder& build, const SamplePlan& plan) {
  ConditionReport rep = make_report("extended", true);
  const auto pairs = plan.draw();
  Grid g = plan.grid;
  for (std::size_t level = 0; level < plan.levels; ++level) {
    if (level > 0) g = refine(g, 2);
    const AnsatzClosedForm closed = build(g);
    if (closed.mode != AnsatzMode::gauged) throw DomainError("check_extended_set: closed form is not gauged");
    const std::size_t st = g.stride(0), sq = g.stride(1);
    const double ht = g.axis(0).spacing(), hq = g.axis(1).spacing();
    std::array<Accumulator, 10> acc;
    for (const auto& [rf, sf] : pairs) {
      const RealField rho = rf.sample(g), s = sf.sample(g);
      require_positive(rho, "check_extended_set");
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.interior(i)) continue;
        const double r = rho[i], sv = s[i];
        const LocalAnsatz la = closed.at(i);
        const cplx f = f_multiplier(r, sv, la);
        const ChiDerivatives cd = chi_derivatives(r, sv, la);
        const CoefficientSet ec = closed.coeffs.at(i);
        const BarredCoefficients bc = barred_coeffs(ec, f);
        const double ref = std::abs(f) * std::abs(ec.d);
        // Explicit q and t dependence: rho and S fixed, ansatz parameters from the neighbours.
        const ChiDerivatives qp = chi_derivatives(r, sv, closed.at(i + sq));
        const ChiDerivatives qm = chi_derivatives(r, sv, closed.at(i - sq));
        const cplx chi_tp = chi_of(r, sv, closed.at(i + st));
        const cplx chi_tm = chi_of(r, sv, closed.at(i - st));
        const cplx chi_q = (qp.value - qm.value) / (2.0 * hq);
        const cplx chi_qq = (qp.value - 2.0 * cd.value + qm.value) / (hq * hq);
        const cplx chi_t = (chi_tp - chi_tm) / (2.0 * ht);
        const cplx chi_rq = (qp.d_rho - qm.d_rho) / (2.0 * hq);
        const cplx chi_sq = (qp.d_s - qm.d_s) / (2.0 * hq);
        for (std::size_t k = 0; k < static_defs.size(); ++k) {
          const Def& def = static_defs[k];
          const cplx dchi = pick(cd, def.deriv);
          double value = re_product(pick(bc, def.coef), dchi);
          double mag = std::abs(dchi);
          if (k == 3) {
            value += 2.0 * re_product(bc.d, chi_rq);
            mag += 2.0 * std::abs(chi_rq);
          } else if (k == 4) {
            value += 2.0 * re_product(bc.d, chi_sq);
            mag += 2.0 * std::abs(chi_sq);
          } else if (k == 9) {
            value += re_product(bc.a, chi_t) + re_product(bc.b, chi_q) + re_product(bc.d, chi_qq);
            mag += std::abs(chi_t) + std::abs(chi_q) + std::abs(chi_qq);
          }
          acc[k].add(normalized(value, target_value(def.target, r, la.mass), ref * mag));
        }
      }
    }
    for (std::size_t k = 0; k < 10; ++k) {
      rep.records[k].levels.push_back(acc[k].result(g.size(), finest_spacing(g)));
    }
  }
  for (ConditionRecord& r : rep.records) finalize(r);
  return rep;
}

ConditionReport check_appendix_a(const AnsatzClosedForm& closed, const AppendixSamples& samples) {
  if (closed.mode != AnsatzMode::static_coefficients) {
    throw DomainError("check_appendix_a: closed form is not in static mode");
  }
  const LocalAnsatz la = closed.at(0);
  const CoefficientSet& c = la.coeffs;
  const double m = la.mass;
  const double nd = c.d_norm2();
  const double md2 = m * nd;
  const double c1 = c.c1(), c2 = c.c2();
  auto fh = [&](double s) { return fh_functions(s, c1, c2, md2, la.c5, la.c6); };
  auto ratio = [&](double rho, double s) {
    const BarredCoefficients bc = barred_coeffs(c, f_multiplier(rho, s, la));
    return bc.d.real() / bc.d.imag();
  };
  auto u_of = [&](double rho, double s) {
    const ChiDerivatives cd = chi_derivatives(rho, s, la);
    return ratio(rho, s) * cd.d_s.real() - cd.d_s.imag();
  };

  ConditionReport rep{"appendix_a", {}};
  auto add = [&](std::string name, std::string relation, bool fd) -> ConditionRecord& {
    ConditionRecord r;
    r.index = rep.records.size() + 1;
    r.name = std::move(name);
    r.relation = std::move(relation);
    r.finite_difference = fd;
    r.tolerance = 1e-12;
    rep.records.push_back(r);
    return rep.records.back();
  };

  // Pointwise identities on the base S grid.
  const Grid s_grid({space_axis(samples.s_min, samples.s_max, samples.base_count)});
  struct Pointwise {
    const char* name;
    const char* relation;
    std::function<double(double, double)> rel_error;
  };
  const std::vector<Pointwise> pointwise{
      {"dbar_ratio_rho_independent", "dbar1/dbar2 (rho) = dbar1/dbar2 (4 rho)",
       [&](double r, double s) { return std::abs(ratio(r, s) - ratio(4 * r, s)) / std::abs(ratio(r, s)); }},
      {"dbar_ratio_exp_f", "dbar1/dbar2 = exp f",
       [&](double r, double s) { return std::abs(ratio(r, s) - std::exp(fh(s).f)) / std::abs(ratio(r, s)); }},
      {"u_sqrt_scaling", "U(4 rho, S) = 2 U(rho, S)",
       [&](double r, double s) { return std::abs(u_of(4 * r, s) - 2 * u_of(r, s)) / std::abs(u_of(r, s)); }},
      {"u_sqrt_rho_exp_h", "exp(f) chi1_S - chi2_S = sqrt(rho) exp h",
       [&](double r, double s) {
         const double u = u_of(r, s);
         return std::abs(u - std::sqrt(r) * std::exp(fh(s).h)) / std::abs(u);
       }},
      {"dbar2_from_h", "dbar2 = sqrt(rho)/m exp(-h)",
       [&](double r, double s) {
         const double d2 = barred_coeffs(c, f_multiplier(r, s, la)).d.imag();
         return std::abs(d2 - std::sqrt(r) / m * std::exp(-fh(s).h)) / std::abs(d2);
       }},
      {"dbar1_from_f_h", "dbar1 = sqrt(rho)/m exp(f - h)",
       [&](double r, double s) {
         const double d1 = barred_coeffs(c, f_multiplier(r, s, la)).d.real();
         const FhValues v = fh(s);
         return std::abs(d1 - std::sqrt(r) / m * std::exp(v.f - v.h)) / std::abs(d1);
       }},
      {"chi_rho_from_barred", "chi_rho = (dbar2, dbar1) / (dbar2 abar1 - dbar1 abar2)",
       [&](double r, double s) {
         const BarredCoefficients bc = barred_coeffs(c, f_multiplier(r, s, la));
         const double den = bc.d.imag() * bc.a.real() - bc.d.real() * bc.a.imag();
         const ChiDerivatives cd = chi_derivatives(r, s, la);
         const cplx pred(bc.d.imag() / den, bc.d.real() / den);
         return std::abs(pred - cd.d_rho) / std::abs(cd.d_rho);
       }},
      {"chi_from_f_h", "chi = -(2 m|d|^2/c2) sqrt(rho) (exp(h-f), exp h) / (exp f + exp -f) + (C3, C4)",
       [&](double r, double s) {
         const FhValues v = fh(s);
         const double k = -2.0 * md2 / c2 * std::sqrt(r) / (std::exp(v.f) + std::exp(-v.f));
         const cplx pred(k * std::exp(v.h - v.f) + la.c3, k * std::exp(v.h) + la.c4);
         const cplx chi = chi_of(r, s, la);
         return std::abs(pred - chi) / std::abs(chi);
       }},
      {"chi_s_formula_vs_analytic", "chi_S = sqrt(rho) exp(h) (c2 e^f + c1, c1 e^f - c2) / (c2 e^2f + c2)",
       [&](double r, double s) {
         const FhValues v = fh(s);
         const double ef = std::exp(v.f);
         const double k = std::sqrt(r) * std::exp(v.h) / (c2 * ef * ef + c2);
         const cplx pred(k * (c2 * ef + c1), k * (c1 * ef - c2));
         const cplx an = chi_derivatives(r, s, la).d_s;
         return std::abs(pred - an) / std::abs(an);
       }},
      {"barred_trig_forms", "barred coefficients from U, V, T agree with a F, b F, d F, e F",
       [&](double r, double s) {
         const BarredCoefficients x = barred_coeffs(c, f_multiplier(r, s, la));
         const BarredCoefficients y = barred_coeffs_trig(r, s, la);
         const double scale = std::abs(x.d) + std::abs(x.a) + std::abs(x.b) + std::abs(x.e);
         return (std::abs(x.a - y.a) + std::abs(x.b - y.b) + std::abs(x.d - y.d) + std::abs(x.e - y.e)) / scale;
       }},
  };
  for (const Pointwise& p : pointwise) {
    ConditionRecord& rec = add(p.name, p.relation, false);
    Accumulator acc;
    for (double r : samples.rho) {
      for (std::size_t i = 0; i < s_grid.size(); ++i) acc.add(p.rel_error(r, s_grid.point(i)[0]));
    }
    rec.levels.push_back(acc.result(s_grid.size(), s_grid.axis(0).spacing()));
    finalize(rec);
  }

  // Finite-difference identities along S (at each sample rho) and along rho.
  struct Sweep {
    const char* name;
    const char* relation;
    bool along_rho;
    std::function<RealField(const Grid&, double)> residual;  // second argument: fixed rho or S
  };
  auto sample1 = [](const Grid& g, auto&& fn) { return RealField::sample(g, [&](const Point& p) { return fn(p[0]); }); };
  const double alpha = c2 / (2.0 * md2);
  const double beta = c1 / (2.0 * md2);
  const std::vector<Sweep> sweeps{
      {"chi1_s_formula_fd", "chi1_S formula matches finite-difference d chi1 / dS", false,
       [&](const Grid& g, double r) {
         const RealField fd = diff(sample1(g, [&](double s) { return chi_of(r, s, la).real(); }), 0);
         const RealField pred = sample1(g, [&](double s) {
           const FhValues v = fh(s);
           const double ef = std::exp(v.f);
           return std::sqrt(r) * (c2 * ef + c1) / (c2 * ef * ef + c2) * std::exp(v.h);
         });
         return fd - pred;
       }},
      {"chi2_s_formula_fd", "chi2_S formula matches finite-difference d chi2 / dS", false,
       [&](const Grid& g, double r) {
         const RealField fd = diff(sample1(g, [&](double s) { return chi_of(r, s, la).imag(); }), 0);
         const RealField pred = sample1(g, [&](double s) {
           const FhValues v = fh(s);
           const double ef = std::exp(v.f);
           return std::sqrt(r) * (c1 * ef - c2) / (c2 * ef * ef + c2) * std::exp(v.h);
         });
         return fd - pred;
       }},
      {"f_ode", "f' = (c2 / 2m|d|^2)(e^f + e^-f)", false,
       [&](const Grid& g, double) {
         const RealField f = sample1(g, [&](double s) { return fh(s).f; });
         const RealField rhs = map(f, [&](double x) { return alpha * (std::exp(x) + std::exp(-x)); });
         return diff(f, 0) - rhs;
       }},
      {"fh_first", "-h' + f' 2e^2f/(1+e^2f) = (c2 e^f + c1)/2m|d|^2", false,
       [&](const Grid& g, double) {
         const RealField f = sample1(g, [&](double s) { return fh(s).f; });
         const RealField h = sample1(g, [&](double s) { return fh(s).h; });
         const RealField fp = diff(f, 0), hp = diff(h, 0);
         const auto& fv = f.values();
         const Eigen::ArrayXd e2 = (2.0 * fv).exp();
         return RealField(g, -hp.values() + fp.values() * 2.0 * e2 / (1.0 + e2) - (alpha * fv.exp() + beta));
       }},
      {"fh_second", "h' - f' (e^f - e^-f)/(e^f + e^-f) = (c2 e^-f - c1)/2m|d|^2", false,
       [&](const Grid& g, double) {
         const RealField f = sample1(g, [&](double s) { return fh(s).f; });
         const RealField h = sample1(g, [&](double s) { return fh(s).h; });
         const RealField fp = diff(f, 0), hp = diff(h, 0);
         const auto& fv = f.values();
         return RealField(g, hp.values() - fp.values() * fv.tanh() - (alpha * (-fv).exp() - beta));
       }},
      {"u_rho_ode", "2 rho dU/drho = U", true,
       [&](const Grid& g, double s) {
         const RealField u = sample1(g, [&](double r) { return u_of(r, s); });
         const RealField rho = sample1(g, [](double r) { return r; });
         return RealField(g, 2.0 * rho.values() * diff(u, 0).values() - u.values());
       }},
  };
  const std::vector<double> s_fixed{samples.s_min + 0.25 * (samples.s_max - samples.s_min),
                                    samples.s_min + 0.75 * (samples.s_max - samples.s_min)};
  for (const Sweep& sw : sweeps) {
    ConditionRecord& rec = add(sw.name, sw.relation, true);
    Grid g({sw.along_rho ? space_axis(samples.rho_min, samples.rho_max, samples.base_count)
                         : space_axis(samples.s_min, samples.s_max, samples.base_count)});
    const std::vector<double>& fixed = sw.along_rho ? s_fixed : samples.rho;
    for (std::size_t level = 0; level < samples.levels; ++level) {
      if (level > 0) g = refine(g, 2);
      Accumulator acc;
      for (double x : fixed) {
        const RealField r = sw.residual(g, x);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (g.interior(i)) acc.add(std::abs(r[i]));
        }
      }
      rec.levels.push_back(acc.result(g.size(), g.axis(0).spacing()));
    }
    finalize(rec);
  }
  return rep;
}

}  // namespace mlab
