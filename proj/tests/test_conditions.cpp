#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlab/conditions.hpp"
#include "mlab/errors.hpp"

using namespace mlab;

namespace {

Grid base_grid() { return Grid({time_axis(0, 1, 9), space_axis(-1, 1, 17)}); }

AnsatzClosedForm static_solution(const Grid& g) {
  return solve_constraints_static(g, cplx(0.8, -0.4), 1.5, -0.9, 0.2, 0.1, 1.1);
}

AnsatzClosedForm gauged_solution(const Grid& g) {
  const ComplexField d = ComplexField::sample(g, [](const Point& p) { return cplx(1.0, 0.1 * p[0]); });
  const RealField u = RealField::sample(g, [](const Point& p) { return 0.9 + 0.2 * std::sin(p[0]); });
  const RealField c5 = RealField::sample(g, [](const Point& p) { return 0.2 * p[1] * p[1] + 0.1 * p[0] * p[1]; });
  const RealField c6 = RealField::sample(g, [](const Point& p) { return 0.1 * std::cos(p[1] - p[0]); });
  const RealField h1 = RealField::sample(g, [](const Point& p) { return 0.5 * p[1] * p[1] - 0.3; });
  return solve_constraints_gauged(d, u, c5, c6, h1, 1.0);
}

std::vector<std::size_t> failing_of(const ConditionReport& r) { return r.failing(); }

}  // namespace

TEST_CASE("fitted order recovers a known power law") {
  std::vector<LevelResult> lv;
  for (double h : {0.1, 0.05, 0.025}) lv.push_back({0, h, 3.0 * h * h, 0.0});
  CHECK(fitted_order(lv) == doctest::Approx(2.0));
  ConditionRecord r;
  r.finite_difference = true;
  r.levels = lv;
  finalize(r);
  CHECK(r.pass);
  for (LevelResult& l : r.levels) l.linf = 0.1 * l.spacing;
  finalize(r);
  CHECK_FALSE(r.pass);
  for (LevelResult& l : r.levels) l.linf = 1e-14;
  finalize(r);
  CHECK(r.pass);  // below the roundoff floor
  r.levels.resize(2);
  finalize(r);
  CHECK_FALSE(r.pass);  // too few levels to fit an order
}

TEST_CASE("sample plans are deterministic and draw positive densities") {
  const SamplePlan plan = default_plan(base_grid(), 6, 42);
  const auto a = plan.draw();
  const auto b = plan.draw();
  REQUIRE(a.size() == 6);
  const Grid fine = refine(base_grid(), 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const RealField ra = a[k].first.sample(fine), rb = b[k].first.sample(fine);
    CHECK((ra.values() == rb.values()).all());
    CHECK(ra.values().minCoeff() > 0.0);
  }
  const auto c = default_plan(base_grid(), 6, 43).draw();
  CHECK(c[2].second(Point{0.3, 0.2, 0, 0}) != a[2].second(Point{0.3, 0.2, 0, 0}));
  CHECK_THROWS_AS(parse_generator_kind("fourier"), DomainError);
  CHECK(parse_generator_kind(generator_name(GeneratorKind::gaussian)) == GeneratorKind::gaussian);
}

TEST_CASE("static solution satisfies all ten conditions") {
  const SamplePlan plan = default_plan(base_grid(), 6, 7);
  const ConditionReport rep = check_static_set(static_solution(plan.grid), plan);
  REQUIRE(rep.records.size() == 10);
  for (const ConditionRecord& r : rep.records) {
    CHECK_MESSAGE(r.pass, r.name);
    CHECK(r.levels.at(0).linf < 1e-12);
  }
  CHECK(rep.all_pass());
  CHECK(rep.table().find("d_chi_rho_s") != std::string::npos);
}

TEST_CASE("condition seven by hand: Re(a F chi_rho) = 1") {
  const Grid g = base_grid();
  const AnsatzClosedForm closed = static_solution(g);
  const LocalAnsatz la = closed.at(0);
  const double rho = 0.7, s = 0.35;
  // chi_rho = (chi - C) / 2 rho with chi - C from the complex form.
  const CoefficientSet& c = la.coeffs;
  const double alpha = c.c2() / (2 * la.mass * c.d_norm2());
  const cplx I(0, 1);
  const cplx chi_c = -std::sqrt(rho) / alpha * std::exp(-la.c6) * std::exp(I * (alpha * s + la.c5));
  const cplx f = I * std::sqrt(rho) / (la.mass * c.d_norm2()) * std::exp(la.c6) * std::conj(c.d) *
                 std::exp(-I * (alpha * s + la.c5));
  CHECK(std::real(c.a * f * chi_c / (2 * rho)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::real(c.d * f * I * alpha * chi_c) == doctest::Approx(rho / la.mass).epsilon(1e-13));
}

TEST_CASE("b = 0.1 d breaks only the b conditions") {
  const SamplePlan plan = default_plan(base_grid(), 6, 7);
  const AnsatzClosedForm closed = static_solution(plan.grid);
  CoefficientFields eq = closed.coeffs;
  eq.b = ComplexField(eq.d.grid(), 0.1 * eq.d.values());
  const auto fail = failing_of(check_static_set(closed, plan, &eq));
  CHECK_FALSE(fail.empty());
  for (std::size_t k : fail) CHECK((k == 4 || k == 5));
}

TEST_CASE("each sensitivity direction violates at least one condition") {
  const SamplePlan plan = default_plan(base_grid(), 6, 7);
  const AnsatzClosedForm closed = solve_constraints_static(plan.grid, cplx(0.8, -0.4), 1.5, -0.9, 0.2, 0.1, 1.1);
  struct Dir {
    char which;
    cplx delta;
  };
  for (const Dir& dir : {Dir{'a', 1e-3}, Dir{'a', cplx(0, 1e-3)}, Dir{'b', 1e-3}, Dir{'b', cplx(0, 1e-3)},
                         Dir{'e', cplx(0, 1e-3)}, Dir{'d', 1e-3}}) {
    const CoefficientFields eq = perturb_coefficient(closed.coeffs, dir.which, dir.delta);
    const ConditionReport rep = check_static_set(closed, plan, &eq);
    CHECK_MESSAGE(!rep.failing().empty(), dir.which, " ", dir.delta);
  }
  // A real multiple of d added to e only shifts the potential: every condition still holds.
  const CoefficientFields eq = perturb_coefficient(closed.coeffs, 'e', 1e-3);
  CHECK(check_static_set(closed, plan, &eq).all_pass());
  CHECK_THROWS_AS(perturb_coefficient(closed.coeffs, 'x', 1.0), DomainError);
}

TEST_CASE("a nonzero C3 breaks only the e chi condition") {
  const SamplePlan plan = default_plan(base_grid(), 6, 7);
  AnsatzClosedForm closed = static_solution(plan.grid);
  closed.params.c3 = RealField::constant(plan.grid, 1.0);
  const auto fail = check_static_set(closed, plan).failing();
  REQUIRE(fail.size() == 1);
  CHECK(fail[0] == 10);
}

TEST_CASE("fundamental requirement converges for the static solution") {
  SamplePlan plan = default_plan(base_grid(), 3, 11);
  const ConditionReport rep = check_fundamental(static_solution, plan);
  const ConditionRecord& r = rep.by_name("fundamental_real");
  CHECK(r.levels.size() == 3);
  CHECK(r.order >= 1.8);
  CHECK(r.pass);
}

TEST_CASE("extended set holds for the gauged solution") {
  SamplePlan plan = default_plan(base_grid(), 3, 5);
  const ConditionReport rep = check_extended_set(gauged_solution, plan);
  for (const ConditionRecord& r : rep.records) CHECK_MESSAGE(r.pass, r.name, " order ", r.order);
  CHECK(rep.by_name("e_chi_explicit").finite_difference);
  CHECK_FALSE(rep.by_name("a_chi_rho").finite_difference);
}

TEST_CASE("fundamental requirement also converges for the gauged solution") {
  // Space-time dependent C5, C6 and u leave a larger truncation constant: start finer.
  SamplePlan plan = default_plan(refine(base_grid(), 4), 3, 5);
  CHECK(check_fundamental(gauged_solution, plan).all_pass());
}

TEST_CASE("intermediate identities of the derivation hold with c1 nonzero") {
  const Grid g({time_axis(0, 1, 3), space_axis(0, 1, 3)});
  CoefficientSet c{cplx(0.3, 0.9), cplx(0.0), cplx(1.0, 0.2), cplx(0.1, 0.0)};
  const AnsatzClosedForm closed = make_static_ansatz(g, c, 1.0, 0.1, -0.2, 0.3, 0.05);
  CHECK(std::abs(c.c1()) > 0.1);
  const ConditionReport rep = check_appendix_a(closed, AppendixSamples{});
  CHECK(rep.records.size() == 16);
  for (const ConditionRecord& r : rep.records) CHECK_MESSAGE(r.pass, r.name, " order ", r.order);
}

TEST_CASE("check_static_set refuses a gauged closed form and nonpositive densities") {
  SamplePlan plan = default_plan(base_grid(), 1, 1);
  CHECK_THROWS_AS(check_static_set(gauged_solution(plan.grid), plan), DomainError);
  const AnsatzClosedForm closed = static_solution(plan.grid);
  const RealField rho = RealField::constant(plan.grid, 0.0);
  CHECK_THROWS_AS(fundamental_residual(closed, rho, rho), DomainError);
}
