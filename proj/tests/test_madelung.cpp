#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mlab/diff.hpp"
#include "mlab/madelung.hpp"

using namespace mlab;

namespace {

// Oscillator ground state in units with the given m, omega, hbar: rho is the Gaussian
// |psi0|^2 and S = -E0 t with E0 = hbar omega / 2.
MadelungPair oscillator_ground_state(const Grid& g, double m, double w, double hbar) {
  const double k = m * w / hbar;
  const RealField rho = RealField::sample(g, [&](const Point& p) {
    return std::sqrt(k / std::numbers::pi) * std::exp(-k * p[1] * p[1]);
  });
  const RealField s = RealField::sample(g, [&](const Point& p) { return -0.5 * hbar * w * p[0]; });
  return make_pair(rho, s, m, hbar);
}

RealField oscillator_potential(const Grid& g, double m, double w) {
  return RealField::sample(g, [&](const Point& p) { return 0.5 * m * w * w * p[1] * p[1]; });
}

}  // namespace

TEST_CASE("to_psi and from_psi invert each other on a smooth pair") {
  const Grid g({time_axis(0, 1, 5), space_axis(-1, 1, 33)});
  const RealField rho = RealField::sample(g, [](const Point& p) { return 1.0 + 0.5 * std::sin(p[1] + p[0]); });
  const RealField s = RealField::sample(g, [](const Point& p) { return 4.0 * p[1] * p[1] - 2.0 * p[0]; });
  const MadelungPair pair = make_pair(rho, s, 1.0, 0.7);
  const MadelungPair back = from_psi(to_psi(pair), 0.7);
  // The action is recovered up to one constant multiple of 2 pi hbar.
  const double shift = back.s[0] - s[0];
  CHECK(std::abs(std::remainder(shift, 2 * std::numbers::pi * 0.7)) < 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(back.rho[i] == doctest::Approx(rho[i]).epsilon(1e-14));
    CHECK(back.s[i] - shift == doctest::Approx(s[i]).epsilon(1e-11));
  }
}

TEST_CASE("from_psi unwraps a plane wave to a linear phase") {
  const Grid g({space_axis(0, 10, 201)});
  const ComplexField psi = ComplexField::sample(g, [](const Point& p) { return std::polar(1.0, 3.0 * p[0]); });
  const MadelungPair pair = from_psi(psi, 1.0);
  const double shift = pair.s[0];
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(pair.s[i] - shift == doctest::Approx(3.0 * g.point(i)[0]).epsilon(1e-12));
  }
}

TEST_CASE("from_psi honours an explicit anchor") {
  const Grid g({space_axis(0, 4, 41)});
  const ComplexField psi = ComplexField::sample(g, [](const Point& p) { return std::polar(1.0, 2.0 * p[0]); });
  FromPsiOptions opt;
  opt.anchor = 20;
  const MadelungPair pair = from_psi(psi, 2.0, 1.0, opt);
  CHECK(pair.s[20] == doctest::Approx(2.0 * std::remainder(2.0 * 2.0, 2 * std::numbers::pi)));
}

TEST_CASE("from_psi reports a phase singularity at a node of vanishing amplitude") {
  const Grid g({space_axis(-1, 1, 21)});
  const ComplexField psi = ComplexField::sample(g, [](const Point& p) { return cplx(p[0], 0.0); });
  try {
    from_psi(psi, 1.0);
    FAIL("expected a phase singularity");
  } catch (const PhaseSingularity& e) {
    CHECK(e.node() == 10);
    CHECK(std::string(e.what()).find("node 10") != std::string::npos);
  }
}

TEST_CASE("from_psi restricted to a region leaves the outside untouched") {
  const Grid g({space_axis(-10, 10, 201)});
  const ComplexField psi = ComplexField::sample(g, [](const Point& p) {
    return std::polar(std::exp(-p[0] * p[0]), 0.5 * p[0]);
  });
  CHECK_THROWS_AS(from_psi(psi, 1.0), PhaseSingularity);
  FromPsiOptions opt;
  opt.region = IndexBox{{60, 0, 0, 0}, {140, 0, 0, 0}};
  const MadelungPair pair = from_psi(psi, 1.0, 1.0, opt);
  CHECK(pair.phase_region.has_value());
  CHECK(pair.s[10] == 0.0);
}

TEST_CASE("oscillator ground state solves the quantum Hamilton-Jacobi equation") {
  const double m = 1.0, w = 1.0, hbar = 1.0;
  double prev = 0.0;
  for (std::size_t n : {128, 255, 509}) {
    const Grid g({time_axis(0.0, 0.5, 5), space_axis(-2.5, 2.5, n)});
    const MadelungPair pair = oscillator_ground_state(g, m, w, hbar);
    const Residual r = qhj_residual(pair, oscillator_potential(g, m, w));
    CHECK(r.summary.masked == 0);
    if (prev > 0.0) CHECK(std::log2(prev / r.summary.linf) > 1.8);
    prev = r.summary.linf;
    // Stationary density with zero current satisfies continuity exactly.
    CHECK(continuity_residual(pair).summary.linf < 1e-12);
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("qhj residual masks nodes below the density floor") {
  const Grid g({time_axis(0, 1, 3), space_axis(-12, 12, 241)});
  const MadelungPair pair = oscillator_ground_state(g, 1.0, 1.0, 1.0);
  const Residual r = qhj_residual(pair, oscillator_potential(g, 1.0, 1.0));
  CHECK(r.summary.masked > 0);
  CHECK(r.summary.evaluated + r.summary.masked == 239 * 1);
}

TEST_CASE("free classical action S = m q^2 / 2t solves the classical equation") {
  double prev = 0.0;
  for (std::size_t n : {33, 65, 129}) {
    const Grid g({time_axis(1.0, 2.0, n), space_axis(-1, 1, 9)});
    const RealField s = RealField::sample(g, [](const Point& p) { return 0.75 * p[1] * p[1] / p[0]; });
    const Residual r = classical_hj_residual(s, RealField::constant(g, 0.0), 1.5);
    if (prev > 0) CHECK(std::log2(prev / r.summary.linf) > 1.8);
    prev = r.summary.linf;
  }
}

TEST_CASE("zero charge leaves the coupled residuals equal to the uncoupled ones") {
  const Grid g({time_axis(0, 1, 7), space_axis(-1, 1, 21)});
  const RealField rho = RealField::sample(g, [](const Point& p) { return 1.2 + std::cos(p[1] - p[0]); });
  const RealField s = RealField::sample(g, [](const Point& p) { return p[1] * p[1] * p[0]; });
  const MadelungPair pair = make_pair(rho, s);
  EmPotentials em{RealField::sample(g, [](const Point& p) { return p[1]; }),
                  {RealField::sample(g, [](const Point& p) { return -std::sin(p[1]); })},
                  0.0, 3.0};
  const RealField v = RealField::sample(g, [](const Point& p) { return p[1] * p[1]; });
  CHECK((em_continuity_residual(pair, em).values.values() == continuity_residual(pair).values.values()).all());
  CHECK((em_qhj_residual(pair, em, v).values.values() == qhj_residual(pair, v).values.values()).all());
}

TEST_CASE("minimal coupling shifts the action gradients") {
  const Grid g({time_axis(0, 1, 5), space_axis(0, 1, 9)});
  const RealField s = RealField::sample(g, [](const Point& p) { return 2.0 * p[1] - p[0]; });
  EmPotentials em{RealField::constant(g, 0.5), {RealField::constant(g, 4.0)}, 2.0, 8.0};
  const CoupledGradients cg = minimal_couple_s(s, em);
  CHECK(cg.dq[0][7] == doctest::Approx(2.0 - 2.0 / 8.0 * 4.0));
  CHECK(cg.dt[7] == doctest::Approx(-1.0 + 2.0 * 0.5));
}

TEST_CASE("lowest Landau level solves the coupled quantum Hamilton-Jacobi equation") {
  // Landau gauge A = (0, B x): psi = exp(i k y - i E t) exp(-(x - x_k)^2 m w / 2 hbar),
  // w = e B / m c, x_k = hbar k c / (e B), E = hbar w / 2.
  const double m = 1.0, hbar = 1.0, e = 1.0, c = 1.0, b = 2.0, k = 0.8;
  const double w = e * b / (m * c), xk = hbar * k * c / (e * b);
  double prev = 0.0;
  for (std::size_t n : {65, 129, 257}) {
    const Grid g({time_axis(0, 1, 5), space_axis(-2, 2, n), space_axis(-1, 1, 9)});
    const RealField rho = RealField::sample(g, [&](const Point& p) {
      return std::exp(-(p[1] - xk) * (p[1] - xk) * m * w / hbar);
    });
    const RealField s = RealField::sample(g, [&](const Point& p) { return hbar * k * p[2] - 0.5 * hbar * w * p[0]; });
    EmPotentials em{RealField::constant(g, 0.0),
                    {RealField::constant(g, 0.0), RealField::sample(g, [&](const Point& p) { return b * p[1]; })},
                    e, c};
    const MadelungPair pair = make_pair(rho, s, m, hbar);
    const Residual r = em_qhj_residual(pair, em, RealField::constant(g, 0.0));
    if (prev > 0) CHECK(std::log2(prev / r.summary.linf) > 1.8);
    prev = r.summary.linf;
    CHECK(em_continuity_residual(pair, em).summary.linf < 1e-10);
  }
}

TEST_CASE("continuity residual of a moving packet converges at second order") {
  // Translating Gaussian rho(q - v t) with S = m v q: exact solution of continuity.
  const double v = 0.7;
  double prev = 0.0;
  for (std::size_t n : {33, 65, 129}) {
    const Grid g({time_axis(0, 1, n), space_axis(-3, 3, n)});
    const RealField rho = RealField::sample(g, [&](const Point& p) {
      const double x = p[1] - v * p[0];
      return std::exp(-x * x);
    });
    const RealField s = RealField::sample(g, [&](const Point& p) { return 2.0 * v * p[1]; });
    const Residual r = continuity_residual(make_pair(rho, s, 2.0, 1.0));
    if (prev > 0) CHECK(std::log2(prev / r.summary.linf) > 1.8);
    prev = r.summary.linf;
  }
}
