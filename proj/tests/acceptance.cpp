// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here and never
// read from a config.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "mlab/conditions.hpp"
#include "mlab/diff.hpp"
#include "mlab/errors.hpp"
#include "mlab/geometry.hpp"
#include "mlab/madelung.hpp"
#include "mlab/scenarios.hpp"
#include "mlab/solver.hpp"

using namespace mlab;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

struct Verdict {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [violated: " << what << "]";
    }
  }
};

template <typename T>
std::string fmt(T x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

double worst_linf(const ConditionRecord& r) {
  double m = 0.0;
  for (const LevelResult& l : r.levels) m = std::max(m, l.linf);
  return m;
}

double min_pair_order(const std::vector<double>& e, double ratio = 2.0) {
  double m = 1e300;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) m = std::min(m, std::log(e[i] / e[i + 1]) / std::log(ratio));
  return m;
}

ComplexField normalized(ComplexField f) {
  const double n = norm(f);
  return {f.grid(), f.values() / std::sqrt(n)};
}

cplx free_packet(double x, double t, double s0, double x0, double k0) {
  const cplx a = 1.0 + I * t / (2.0 * s0 * s0);
  const double xc = x - x0 - k0 * t;
  return std::pow(2.0 * pi * s0 * s0, -0.25) / std::sqrt(a) *
         std::exp(-xc * xc / (4.0 * s0 * s0 * a) + I * (k0 * (x - x0)) - I * k0 * k0 * t / 2.0);
}

EvolutionProblem packet_problem(std::size_t n, double dt) {
  const Grid g({space_axis(-15, 15, n)});
  EvolutionProblem pb(
      normalized(ComplexField::sample(g, [](const Point& x) { return free_packet(x[0], 0, 1.0, -2.0, 1.5); })));
  pb.dt = dt;
  return pb;
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
  return std::sqrt((a.values() - b.values()).abs2().sum() * a.grid().cell_volume(true));
}

const Grid& condition_grid() {
  static const Grid g({time_axis(0, 1, 9), space_axis(-1, 1, 17)});
  return g;
}

// ---------------------------------------------------------------------------------------

void c1_static(Verdict& v) {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t failing = 0;
  for (int k = 0; k < 100; ++k) {
    const cplx d = std::polar(0.3 + 1.2 * u(rng), pi * (2 * u(rng) - 1));
    const double r1 = 0.5 + 1.5 * u(rng), f = 2 * u(rng) - 1;
    const AnsatzClosedForm closed = solve_constraints_static(condition_grid(), d, r1, f, 0.0, 0.0, 1.0);
    const ConditionReport rep = check_static_set(closed, default_plan(condition_grid(), 3, 5000 + k));
    if (rep.records.size() != 10) v.require(false, "ten records");
    for (const ConditionRecord& r : rep.records) worst = std::max(worst, worst_linf(r));
    failing += rep.failing().size();
  }
  v.note << "100 random (d, r1, f): worst normalized residual " << fmt(worst);
  v.require(worst < 1e-10, "residual < 1e-10");
  v.require(failing == 0, "no failing condition");
}

void c2_fundamental(Verdict& v) {
  std::vector<double> orders;
  for (std::uint64_t k = 0; k < 5; ++k) {
    SamplePlan plan = default_plan(condition_grid(), 1, 700 + k);
    plan.pairs = {{GeneratorSpec{GeneratorKind::random_smooth, 0.5, 1.0, true, 0, 4},
                   GeneratorSpec{GeneratorKind::random_smooth, 0.8, 0.0, false, 0, 4}}};
    plan.levels = 3;
    const ConditionReport rep = check_fundamental(
        [](const Grid& g) { return solve_constraints_static(g, cplx(0.8, -0.4), 1.5, -0.9, 0.0, 0.0, 1.1); }, plan);
    const ConditionRecord& r = rep.by_name("fundamental_real");
    v.require(r.levels.size() == 3, "three levels");
    orders.push_back(r.order);
  }
  const double m = *std::min_element(orders.begin(), orders.end());
  v.note << "5 random smooth (rho, S): minimum order " << fmt(m);
  v.require(m >= 1.8, "order >= 1.8");
}

void c3_sensitivity(Verdict& v) {
  const Grid& g = condition_grid();
  const AnsatzClosedForm closed = solve_constraints_static(g, cplx(0.8, -0.4), 1.5, -0.9, 0.0, 0.0, 1.1);
  const SamplePlan plan = default_plan(g, 3, 31);
  struct Dir {
    char which;
    cplx delta;
    const char* label;
  };
  for (const Dir& d : {Dir{'a', 1e-3, "a"}, Dir{'b', 1e-3, "b"}, Dir{'e', cplx(0, 1e-3), "e (i 1e-3)"}}) {
    const CoefficientFields eq = perturb_coefficient(closed.coeffs, d.which, d.delta);
    const ConditionReport rep = check_static_set(closed, plan, &eq);
    double worst = 0.0;
    for (const ConditionRecord& r : rep.records) worst = std::max(worst, worst_linf(r));
    v.note << d.label << ": max residual " << fmt(worst) << "; ";
    v.require(worst > 1e-5, std::string(d.label) + " exceeds 1e-5");
  }
  AnsatzClosedForm c3 = closed;
  c3.params.c3 = RealField::constant(g, 1.0);
  const auto fails = check_static_set(c3, plan).failing();
  v.note << "C3 = 1 fails {";
  for (std::size_t i : fails) v.note << i << (i == fails.back() ? "" : ",");
  v.note << "}";
  v.require(fails == std::vector<std::size_t>{10}, "C3 = 1 fails exactly the e condition");
}

void c4_extended(Verdict& v) {
  // Space-time dependent C5, C6, u and H1 leave a larger truncation constant, so the
  // refinement starts one level finer than the static criteria.
  const Grid g = refine(condition_grid(), 2);
  std::mt19937_64 rng(4242);
  double min_order = 1e300;
  std::set<std::size_t> h2_fails_all;
  bool all_pass = true, h2_exact = true;
  for (int k = 0; k < 5; ++k) {
    const GeneratorSpec field{GeneratorKind::random_smooth, 0.3, 0.0, false, 0, 3};
    const GeneratorSpec ugen{GeneratorKind::random_smooth, 0.2, 1.0, true, 1, 3};
    const SmoothFunction c5 = draw_function(field, g, rng), h1 = draw_function(field, g, rng),
                         ut = draw_function(ugen, g, rng);
    // C6 always carries an explicit time dependence here.
    const SmoothFunction c6r = draw_function(field, g, rng);
    const SmoothFunction c6{[c6r](const Point& x) { return c6r(x) + 0.2 * x[0]; }, "c6"};
    for (bool zero_h2 : {false, true}) {
      auto build = [&, zero_h2](const Grid& gg) {
        const ComplexField d = ComplexField::constant(gg, cplx(0.9, 0.3));
        AnsatzClosedForm c = solve_constraints_gauged(d, ut.sample(gg), c5.sample(gg), c6.sample(gg), h1.sample(gg), 1.0);
        if (zero_h2) {
          c.params.h2 = RealField::constant(gg, 0.0);
          c.coeffs.e = to_complex(c.params.h1) * d;
        }
        return c;
      };
      const ConditionReport rep = check_extended_set(build, default_plan(g, 3, 90 + k));
      if (!zero_h2) {
        all_pass = all_pass && rep.all_pass();
        for (const ConditionRecord& r : rep.records) {
          if (r.finite_difference && std::isfinite(r.order)) min_order = std::min(min_order, r.order);
        }
      } else {
        const auto f = rep.failing();
        h2_fails_all.insert(f.begin(), f.end());
        h2_exact = h2_exact && f == std::vector<std::size_t>{10};
      }
    }
  }
  v.note << "5 random (C5, C6, u, H1): all pass = " << (all_pass ? "yes" : "no") << ", minimum FD order "
         << fmt(min_order) << "; H2 = 0 fails {";
  for (std::size_t i : h2_fails_all) v.note << i << " ";
  v.note << "}";
  v.require(all_pass, "all NE conditions pass");
  v.require(min_order >= 1.8, "order >= 1.8");
  v.require(h2_exact, "H2 = 0 fails exactly NE-10 in every sample");
}

void c5_appendix(Verdict& v) {
  const Grid g({time_axis(0, 1, 3), space_axis(0, 1, 3)});
  const CoefficientSet c{cplx(0.3, 0.9), cplx(0.0), cplx(1.0, 0.2), cplx(0.1, 0.0)};
  const ConditionReport rep = check_appendix_a(make_static_ansatz(g, c, 1.0, 0.1, -0.2, 0.3, 0.05), AppendixSamples{});
  double worst_analytic = 0.0, min_order = 1e300;
  for (const ConditionRecord& r : rep.records) {
    if (r.finite_difference) {
      min_order = std::min(min_order, r.order);
    } else {
      worst_analytic = std::max(worst_analytic, worst_linf(r));
    }
  }
  const double ratio = worst_linf(rep.by_name("dbar_ratio_rho_independent"));
  v.note << rep.records.size() << " identities: dbar ratio variation " << fmt(ratio) << ", worst analytic "
         << fmt(worst_analytic) << ", minimum FD order " << fmt(min_order);
  v.require(ratio < 1e-12, "dbar1/dbar2 rho-independent to 1e-12");
  v.require(worst_analytic < 1e-12, "analytic identities < 1e-12");
  v.require(min_order >= 1.8, "FD identities order >= 1.8");
  v.require(rep.all_pass(), "all records pass");
}

void c6_unitarity(Verdict& v) {
  const EvolutionProblem pb = packet_problem(512, 0.005);
  const EvolutionTrace tr = evolve(pb, 5.0, 100, {false, false});
  double drift = 0.0;
  for (double n : tr.norms) drift = std::max(drift, std::abs(n - 1.0));
  const ComplexField exact = ComplexField::sample(tr.snapshots.back().grid(), [](const Point& x) {
    return free_packet(x[0], 5.0, 1.0, -2.0, 1.5);
  });
  const double l2 = l2_distance(tr.snapshots.back(), exact);
  std::vector<double> res;
  double dt = 0.02;
  for (std::size_t n : {201, 401, 801}) {
    const EvolutionTrace lt = evolve(packet_problem(n, dt), 1.0, static_cast<std::size_t>(std::llround(0.5 / dt)));
    res.push_back(lt.continuity.back()->linf);
    dt /= 2;
  }
  const double order = min_pair_order(res);
  v.note << tr.steps << " steps: max |norm - 1| " << fmt(drift) << ", L2 vs analytic packet " << fmt(l2)
         << "; continuity order " << fmt(order);
  v.require(tr.steps == 1000, "1000 steps");
  v.require(drift < 1e-10, "|norm - 1| < 1e-10");
  // Second-order dispersion error of the scheme at dx = 30/511 over t = 5 is about 1e-2.
  v.require(l2 < 5e-2, "agrees with the analytic packet");
  v.require(order >= 1.8, "continuity order >= 1.8");
}

void c7_qhj(Verdict& v) {
  // Ground state of m = omega = hbar = 1: rho Gaussian, S = -t/2, V = q^2/2.
  std::vector<double> err, h;
  for (std::size_t n : {128, 256, 512}) {
    const Grid g({time_axis(0.0, 0.5, 5), space_axis(-2.5, 2.5, n)});
    const MadelungPair pair = make_pair(
        RealField::sample(g, [](const Point& p) { return std::exp(-p[1] * p[1]) / std::sqrt(pi); }),
        RealField::sample(g, [](const Point& p) { return -0.5 * p[0]; }));
    const Residual r = qhj_residual(pair, RealField::sample(g, [](const Point& p) { return 0.5 * p[1] * p[1]; }));
    err.push_back(r.summary.linf);
    h.push_back(g.axis(1).spacing());
  }
  double order = 1e300;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) order = std::min(order, std::log(err[i] / err[i + 1]) / std::log(h[i] / h[i + 1]));
  v.note << "L-inf at 512 nodes " << fmt(err.back()) << ", order " << fmt(order);
  v.require(err.back() < 1e-4, "L-inf < 1e-4");
  v.require(order >= 1.8, "order >= 1.8");
}

void c8_gauge(Verdict& v) {
  const double charge = 1.0, c = 2.0, gamma = charge / c;
  for (double rate : {0.0, 0.5}) {
    auto lambda = [=](double t, double q) { return 0.8 * std::sin(0.7 * q) * (1.0 + rate * t); };
    std::vector<double> errs;
    double dt = 0.02;
    for (std::size_t n : {201, 401, 801}) {
      const EvolutionProblem free = packet_problem(n, dt);
      const ComplexField psi_free = evolve(free, 1.0, 1000000, {false, false}).snapshots.back();
      EvolutionProblem gauged = free;
      const Grid& g = free.initial.grid();
      gauged.initial = ComplexField(
          g, free.initial.values() *
                 ComplexField::sample(g, [&](const Point& x) { return std::exp(I * gamma * lambda(0, x[0])); }).values());
      gauged.em = TimeDependentEm{[=](double, const Point& x) { return -0.8 * std::sin(0.7 * x[0]) * rate / c; },
                                  {[=](double t, const Point& x) { return 0.8 * 0.7 * std::cos(0.7 * x[0]) * (1 + rate * t); }},
                                  charge, c};
      const ComplexField got = evolve(gauged, 1.0, 1000000, {false, false}).snapshots.back();
      const ComplexField want(
          g, psi_free.values() *
                 ComplexField::sample(g, [&](const Point& x) { return std::exp(I * gamma * lambda(1.0, x[0])); }).values());
      errs.push_back(l2_distance(got, want));
      dt /= 2;
    }
    const double order = min_pair_order(errs);
    v.note << (rate == 0 ? "static" : "time-dependent") << " Lambda: finest L2 " << fmt(errs.back()) << ", order "
           << fmt(order) << "; ";
    v.require(order >= 1.8, "gauge covariance order >= 1.8");
  }
}

void c9_dressing(Verdict& v) {
  const double horizon = 0.5;
  std::mt19937_64 rng(9090);
  double min_order = 1e300;
  for (int k = 0; k < 5; ++k) {
    const Grid base = with_time(time_axis(0, horizon, 51), Grid({space_axis(-8, 8, 161)}));
    const GeneratorSpec spec{GeneratorKind::random_smooth, 0.3, 0.0, false, 0, 3};
    const SmoothFunction c5 = draw_function(spec, base, rng), c6 = draw_function(spec, base, rng);
    std::vector<double> errs;
    for (auto [n, nt] : {std::pair<std::size_t, std::size_t>{161, 51}, {321, 101}, {641, 201}}) {
      const Grid s({space_axis(-8, 8, n)});
      const Grid st = with_time(time_axis(0, horizon, nt), s);
      const DressingFields d = make_dressing(c5.sample(st), c6.sample(st), PSchedule::constant(1.0));
      EvolutionProblem plain(
          normalized(ComplexField::sample(s, [](const Point& x) { return free_packet(x[0], 0, 1.0, 0.0, 1.0); })));
      plain.potential = [](double, const Point& x) { return 0.3 * x[0] * x[0]; };
      plain.dt = horizon / static_cast<double>(nt - 1);
      const ComplexField direct = evolve(plain, horizon, 1000000, {false, false}).snapshots.back();
      EvolutionProblem dressed(dress_slice(plain.initial, d, 0, Direction::inverse));
      dressed.unnormalized = true;
      dressed.dressing = DressedTerms{d, v_tilde_of_v(RealField::sample(st, [](const Point& x) { return 0.3 * x[1] * x[1]; }), d, 1.0)};
      dressed.dt = plain.dt;
      const ComplexField chi = evolve(dressed, horizon, 1000000, {false, false}).snapshots.back();
      errs.push_back(l2_distance(dress_slice(chi, d, nt - 1, Direction::forward), direct));
    }
    min_order = std::min(min_order, min_pair_order(errs));
  }
  v.note << "5 random (C5, C6), p = 1: minimum two-route order " << fmt(min_order);
  v.require(min_order >= 1.8, "order >= 1.8");
}

void c10_p_of_t(Verdict& v) {
  const std::size_t n = 32;
  const double k = 2.0, eps = 0.5, dt = 5e-5, h = 2 * pi / n;
  const Grid g({periodic_axis(0, 2 * pi, n)});
  EvolutionProblem pb(normalized(ComplexField::sample(g, [&](const Point& x) { return std::polar(1.0, k * x[0]); })));
  pb.p = PSchedule::linear(1.0, eps);
  pb.dt = dt;
  pb.boundary = {BoundaryKind::periodic};
  const EvolutionTrace tr = evolve(pb, 1.0, 1000000, {false, false});
  const double kd2 = 4.0 / (h * h) * std::pow(std::sin(k * h / 2), 2);
  // Integral of 1 + eps t over [0, 1] in closed form.
  const double expected = -(kd2 / 2.0) * (1.0 + eps / 2.0);
  const double phase_err = std::abs(std::remainder(std::arg(tr.snapshots.back()[1] / pb.initial[1]) - expected, 2 * pi));

  const Grid g2({space_axis(-10, 10, 257)});
  const PSchedule sched = PSchedule::sinusoidal(1.0, 0.3, 2.0);
  EvolutionProblem un(
      normalized(ComplexField::sample(g2, [](const Point& x) { return free_packet(x[0], 0, 1.0, 0.5, 1.0); })));
  un.potential = [](double, const Point& x) { return 0.2 * x[0] * x[0]; };
  un.p = sched;
  un.dt = 0.01;
  EvolutionProblem amp = un;
  amp.p_form = PForm::amplitude;
  amp.initial = ComplexField(g2, un.initial.values() * sched(0.0));
  amp.unnormalized = true;
  const EvolutionTrace a = evolve(un, 1.0, 25, {false, false}), b = evolve(amp, 1.0, 25, {false, false});
  double comm = 0.0;
  for (std::size_t s = 0; s < b.times.size(); ++s) {
    comm = std::max(comm, (b.snapshots[s].values() / sched(b.times[s]) - a.snapshots[s].values()).abs().maxCoeff());
  }
  v.note << "single-mode phase error " << fmt(phase_err) << ", amplitude-form commutation " << fmt(comm);
  v.require(phase_err < 1e-8, "phase < 1e-8");
  v.require(comm < 1e-12, "chi_bar / p commutes with integration");
}

void c11_holonomy(Verdict& v) {
  const double flux = 1.3;
  const FourPotential pot = flux_line(flux, 0, 0, 0.1);
  auto at = [](double x, double y) { return Point{0, x, y, 0}; };
  const std::vector<PathSpec> inside{polygon_loop(at(0, 0), 1, 2, 1.0, 64),
                                     rectangle_loop(at(-0.7, -0.4), 1, 1.9, 2, 1.1),
                                     closed_loop({at(0.8, 0), at(0, 0.6), at(-1.3, 0), at(0, -0.9)}),
                                     closed_loop({at(-0.5, -0.5), at(1.2, -0.2), at(-0.2, 0.9)}),
                                     closed_loop({at(0.3, -0.8), at(1.1, 0.2), at(0.2, 1.0), at(-0.9, 0.7), at(-0.6, -0.9)})};
  const std::vector<PathSpec> outside{polygon_loop(at(2, 0), 1, 2, 0.8, 64),
                                      rectangle_loop(at(0.5, 0.5), 1, 1.0, 2, 0.7),
                                      closed_loop({at(-1, 1), at(-2, 1.5), at(-1.2, 2.5)})};
  double rel = 0.0, zero = 0.0;
  for (const PathSpec& p : inside) rel = std::max(rel, std::abs(c5_path_integral(pot, p, 16384) - flux) / flux);
  for (const PathSpec& p : outside) zero = std::max(zero, std::abs(c5_path_integral(pot, p, 16384)));

  const Grid g({time_axis(0, 1, 3), space_axis(-2, 2, 9), space_axis(-2, 2, 9), space_axis(-1, 1, 3)});
  const RealField phi = RealField::sample(g, [](const Point& x) { return 0.3 * x[1] - 0.2 * x[2] * x[2]; });
  const Point x0 = at(-1.5, 0), target = at(1.5, 0.2);
  PathFamily fam;
  fam.targets = {target};
  fam.paths = {{PathSpec{{x0, at(-1.5, 1.0), at(1.5, 1.0), target}}, PathSpec{{x0, at(-1.5, -1.0), at(1.5, -1.0), target}}}};
  FourPotential quantized = flux_line(2 * pi, 0, 0, 0.1), fractional = flux_line(1.0, 0, 0, 0.1);
  quantized.x0 = fractional.x0 = x0;
  const CompensationReport q = compensate_action(phi, quantized, fam, 1.2, 1e-8, 16384);
  const CompensationReport f = compensate_action(phi, fractional, fam, 1.2, 1e-8, 16384);
  v.note << "5 loops relative error " << fmt(rel) << ", non-encircling |C5| " << fmt(zero)
         << "; quantized spread " << fmt(q.max_phase_spread) << ", non-quantized spread " << fmt(f.max_phase_spread)
         << (f.unique ? " (not flagged)" : " (flagged)");
  v.require(rel < 1e-6, "winding-1 relative error < 1e-6");
  v.require(zero < 1e-8, "non-encircling loops vanish");
  v.require(q.unique && q.max_phase_spread < 1e-8, "quantized flux spread < 1e-8");
  // Analytic: the two paths enclose the line once, so exp(i S/hbar) differs by 2 sin(1/2).
  v.require(!f.unique && std::abs(f.max_phase_spread - 2 * std::sin(0.5)) < 1e-6, "non-quantized flux flagged");
}

void c12_stokes_bianchi(Verdict& v) {
  const FourPotential b = constant_b({0.3, -0.2, 1.4});
  const StokesReport s = stokes_check(b, rectangle_loop(Point{0, -0.3, 0.2, 0}, 1, 1.2, 2, 0.7));
  const FourPotential pot = plane_wave({1, -1, 1}, {1, 1, 0}, 0.4, 1.3) + constant_b({0.2, -0.1, 0.5}, {}, 1.3);
  std::vector<double> be, me;
  for (std::size_t n : {7, 13, 25}) {
    const Grid g({time_axis(0, 1, n), space_axis(-1, 1, n), space_axis(-1, 1, n), space_axis(-1, 1, n)});
    const FieldTensor f = field_tensor(pot, g);
    double bm = 0.0;
    for (const RealField& r : bianchi_residual(f)) bm = std::max(bm, max_abs(r));
    const MaxwellResidual m = maxwell_homogeneous_residual(f);
    double mm = max_abs(m.div_b);
    for (const RealField& r : m.faraday) mm = std::max(mm, max_abs(r));
    be.push_back(bm);
    me.push_back(mm);
  }
  // div B = 1 from B = (x, 0, 0) with E = 0.
  const Grid g({time_axis(0, 1, 5), space_axis(-1, 1, 9), space_axis(-1, 1, 9), space_axis(-1, 1, 9)});
  const RealField zero = RealField::constant(g, 0.0);
  const auto r = bianchi_residual(
      tensor_from_eb({zero, zero, zero}, {RealField::sample(g, [](const Point& x) { return x[1]; }), zero, zero}, 1.0));
  double dev = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) dev = std::max(dev, std::abs(r[0][i] - 1.0));
  const double ob = min_pair_order(be), om = min_pair_order(me);
  v.note << "Stokes discrepancy " << fmt(std::abs(s.discrepancy)) << "; Bianchi order " << fmt(ob)
         << ", Maxwell order " << fmt(om) << "; div-B violation deviation " << fmt(dev);
  v.require(std::abs(s.discrepancy) < 1e-6, "Stokes < 1e-6");
  v.require(std::abs(s.loop_integral - 1.4 * 1.2 * 0.7) < 1e-6, "loop matches B area");
  v.require(ob >= 1.8 && om >= 1.8, "orders >= 1.8");
  v.require(dev < 0.01, "violation within 1% of 1");
}

void c13_c6(Verdict& v) {
  const double m = 1.3, alpha = 0.4, beta = 0.6;
  const Grid g({time_axis(0, 1, 41), space_axis(-2, 2, 81)});
  auto rho_fn = [](const Point& x) { return std::exp(-0.5 * x[1] * x[1]) + 0.1; };
  const RealField rho = RealField::sample(g, rho_fn);
  const RealField s = RealField::sample(g, [](const Point& x) { return 0.9 * x[1] + 0.2 * x[1] * x[1] - 0.3 * x[0]; });
  const C6RejectionReport rc = c6_rejection_demo(rho, s, RealField::constant(g, 0.7), m);
  const C6RejectionReport rq = c6_rejection_demo(rho, s, RealField::sample(g, [&](const Point& x) { return alpha * x[1]; }), m);
  const C6RejectionReport rt = c6_rejection_demo(rho, s, RealField::sample(g, [&](const Point& x) { return beta * x[0]; }), m);
  // Predicted survivors: -2 alpha rho_bar S_q / m and -2 beta rho_bar.
  const double eq = max_abs(rq.source - RealField::sample(g, [&](const Point& x) {
                              return -2 * alpha * rho_fn(x) * (0.9 + 0.4 * x[1]) / m;
                            }));
  const double et = max_abs(rt.source + 2 * beta * rho);
  v.note << "constant max |source| " << rc.max_source << ", linear-q mismatch " << fmt(eq) << ", linear-t mismatch "
         << fmt(et);
  v.require(rc.max_source == 0.0 && !rc.c6_survives, "constant C6 exactly zero");
  v.require(eq < 1e-10 && rq.c6_survives, "linear-q survivor matches");
  v.require(et < 1e-10 && rt.c6_survives, "linear-t survivor matches");
}

std::map<std::string, std::string> read_reports(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.path().filename() != "report.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[std::filesystem::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

void c14_determinism(Verdict& v) {
  const std::filesystem::path root = std::filesystem::path(MLAB_TEST_TMP) / "acceptance-determinism";
  std::filesystem::remove_all(root);
  const SuiteConfig cfg = builtin_suite();
  RunOptions a, b;
  a.out_dir = (root / "sequential").string();
  b.out_dir = (root / "parallel").string();
  b.parallel = true;
  const SuiteOutcome ra = run_suite(cfg, a), rb = run_suite(cfg, b);
  const auto fa = read_reports(a.out_dir), fb = read_reports(b.out_dir);
  std::size_t differing = 0;
  for (const auto& [k, text] : fa) differing += (fb.count(k) && fb.at(k) == text) ? 0 : 1;
  // A different seed must change the randomized reports.
  RunOptions c;
  c.out_dir = (root / "other-seed").string();
  c.only = "static-conditions";
  run_suite(builtin_suite(7), c);
  const auto fc = read_reports(c.out_dir);
  const bool seed_matters = fc.at("static-conditions/report.json") != fa.at("static-conditions/report.json");
  v.note << fa.size() << " reports, " << differing << " differ between reruns; suite exit codes " << ra.exit_code
         << "/" << rb.exit_code;
  v.require(fa.size() == scenario_registry().size(), "one report per built-in scenario");
  v.require(differing == 0 && fa.size() == fb.size(), "byte-identical reports");
  v.require(ra.exit_code == 0 && rb.exit_code == 0, "built-in suite passes");
  v.require(seed_matters, "seed changes the randomized report");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Verdict&)> run;
    double limit_seconds;  // 0: no runtime bound
  };
  const std::vector<Criterion> criteria{
      {1, "static condition certification", c1_static, 10},
      {2, "fundamental-requirement convergence", c2_fundamental, 30},
      {3, "sensitivity of the condition set", c3_sensitivity, 0},
      {4, "extended-set certification", c4_extended, 0},
      {5, "constructive-derivation identities", c5_appendix, 0},
      {6, "solver unitarity and continuity", c6_unitarity, 60},
      {7, "QHJ eigenstate identity", c7_qhj, 0},
      {8, "gauge covariance", c8_gauge, 0},
      {9, "dressing equivalence", c9_dressing, 0},
      {10, "p(t) transformation", c10_p_of_t, 0},
      {11, "holonomy and compensation", c11_holonomy, 0},
      {12, "Stokes, Bianchi and Maxwell", c12_stokes_bianchi, 0},
      {13, "C6 rejection", c13_c6, 0},
      {14, "determinism", c14_determinism, 0},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0) v.require(secs < c.limit_seconds, "runtime < " + fmt(c.limit_seconds) + " s");
    failed += v.pass ? 0 : 1;
    std::printf("%s  %2d  %-38s %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.note.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
