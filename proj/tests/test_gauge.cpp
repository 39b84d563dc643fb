#include <doctest.h>

#include <cmath>
#include <random>

#include "mlab/diff.hpp"
#include "mlab/errors.hpp"
#include "mlab/gauge.hpp"

using namespace mlab;

namespace {

Grid tq_grid(std::size_t n = 41) { return Grid({time_axis(0, 1, 21), space_axis(-2, 2, n)}); }

ComplexField random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexField::Values v(static_cast<Eigen::Index>(g.size()));
  for (auto& x : v) x = cplx(n(rng), n(rng));
  return {g, v};
}

DressingFields smooth_dressing(const Grid& g, double a5, double a6, PSchedule p) {
  return make_dressing(RealField::sample(g, [=](const Point& x) { return a5 * std::sin(x[1] + 0.5 * x[0]); }),
                       RealField::sample(g, [=](const Point& x) { return a6 * std::cos(0.7 * x[1] - x[0]); }),
                       std::move(p));
}

}  // namespace

TEST_CASE("p schedules evaluate their value and rate") {
  const PSchedule lin = PSchedule::linear(2.0, 0.5);
  CHECK(lin(2.0) == doctest::Approx(4.0));
  CHECK(lin.rate(0.3) == doctest::Approx(1.0));
  const PSchedule sn = PSchedule::sinusoidal(1.0, 0.2, 3.0);
  const double h = 1e-5;
  CHECK(sn.rate(0.4) == doctest::Approx((sn(0.4 + h) - sn(0.4 - h)) / (2 * h)).epsilon(1e-8));
  const PSchedule prod = lin * sn;
  CHECK(prod.rate(0.4) == doctest::Approx((prod(0.4 + h) - prod(0.4 - h)) / (2 * h)).epsilon(1e-8));
  CHECK_THROWS_AS(require_positive(PSchedule::linear(1.0, -2.0), 0.0, 1.0), DomainError);
  CHECK_NOTHROW(require_positive(PSchedule::linear(1.0, -0.5), 0.0, 1.0));
}

TEST_CASE("identity dressing leaves the field unchanged") {
  const Grid g = tq_grid();
  const ComplexField chi = random_field(g, 1);
  const ComplexField out = dress(chi, identity_dressing(g), Direction::forward);
  CHECK((out.values() == chi.values()).all());
}

TEST_CASE("dress then undress returns the original field") {
  const Grid g = tq_grid();
  const ComplexField chi = random_field(g, 2);
  const DressingFields d = smooth_dressing(g, 1.3, 0.8, PSchedule::sinusoidal(0.7, 0.3, 2.0));
  const ComplexField back = dress(dress(chi, d, Direction::forward), d, Direction::inverse);
  CHECK((back.values() - chi.values()).abs().maxCoeff() < 1e-14 * chi.values().abs().maxCoeff() * 4);
}

TEST_CASE("pure phase dressing preserves the modulus and its argmax") {
  const Grid g = tq_grid();
  const ComplexField chi = random_field(g, 3);
  const DressingFields d = smooth_dressing(g, 2.1, 0.0, PSchedule::constant(1.0));
  const ComplexField out = dress(chi, d, Direction::forward);
  CHECK((out.values().abs() - chi.values().abs()).abs().maxCoeff() < 1e-14 * 8);
  Eigen::Index i0, i1;
  chi.values().abs().maxCoeff(&i0);
  out.values().abs().maxCoeff(&i1);
  CHECK(i0 == i1);
}

TEST_CASE("dressing is a group action") {
  const Grid g = tq_grid();
  const ComplexField chi = random_field(g, 4);
  const DressingFields x = smooth_dressing(g, 0.6, 0.3, PSchedule::linear(1.2, 0.4));
  const DressingFields y = smooth_dressing(g, -1.1, 0.5, PSchedule::sinusoidal(0.9, 0.1, 5.0));
  const ComplexField two_step = dress(dress(chi, y, Direction::forward), x, Direction::forward);
  const ComplexField one_step = dress(chi, compose(x, y), Direction::forward);
  CHECK((two_step.values() - one_step.values()).abs().maxCoeff() < 1e-13 * chi.values().abs().maxCoeff());
}

TEST_CASE("dressing a snapshot matches dressing the space-time field") {
  const Grid g = tq_grid();
  const DressingFields d = smooth_dressing(g, 0.4, 0.2, PSchedule::linear(1.0, 0.5));
  const ComplexField chi = random_field(g, 5);
  const Grid s = spatial_part(g);
  const std::size_t n = 7;
  ComplexField::Values slice = chi.values().segment(static_cast<Eigen::Index>(n * g.stride(0)), static_cast<Eigen::Index>(s.size()));
  const ComplexField one = dress_slice(ComplexField(s, slice), d, n, Direction::forward);
  const ComplexField all = dress(chi, d, Direction::forward);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(one[i] == all[n * g.stride(0) + i]);
}

TEST_CASE("v_tilde_of_v: trivial dressing and a linear time phase") {
  const Grid g = tq_grid();
  const RealField v = RealField::sample(g, [](const Point& x) { return x[1] * x[1]; });
  const RealField same = v_tilde_of_v(v, identity_dressing(g), 1.0);
  CHECK((same.values() == v.values()).all());
  const double w = 1.7, p = 0.8;
  const DressingFields d = make_dressing(RealField::sample(g, [=](const Point& x) { return w * x[0]; }),
                                         RealField::constant(g, 0.0), PSchedule::constant(p));
  const RealField vt = v_tilde_of_v(v, d, 1.3);
  CHECK((vt.values() - (v.values() - p * w)).abs().maxCoeff() < 1e-12);
  CHECK((v_of_v_tilde(vt, d, 1.3).values() - v.values()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("v_tilde_of_v matches the analytic shift for smooth dressing") {
  double prev = 0;
  for (std::size_t n : {41, 81, 161}) {
    const Grid g({time_axis(0, 1, n), space_axis(-2, 2, n)});
    const double m = 1.4, p0 = 0.9;
    const DressingFields d = smooth_dressing(g, 0.5, 0.3, PSchedule::constant(p0));
    const RealField v = RealField::constant(g, 0.0);
    const RealField vt = v_tilde_of_v(v, d, m);
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g.interior(i)) continue;
      const Point x = g.point(i);
      const double c5q = 0.5 * std::cos(x[1] + 0.5 * x[0]), c5t = 0.25 * std::cos(x[1] + 0.5 * x[0]);
      const double c6q = -0.21 * std::sin(0.7 * x[1] - x[0]), c6qq = -0.147 * std::cos(0.7 * x[1] - x[0]);
      const double exact = -(p0 * p0 / (2 * m)) * (c6q * c6q - c5q * c5q + c6qq) - p0 * c5t;
      err = std::max(err, std::abs(vt[i] - exact));
    }
    if (prev > 0) CHECK(std::log2(prev / err) > 1.8);
    prev = err;
  }
}

TEST_CASE("minimal coupling with zero charge is the plain derivative") {
  const Grid g({time_axis(0, 1, 5), space_axis(0, 1, 17)});
  const EmPotentials em{RealField::constant(g, 3.0), {RealField::sample(g, [](const Point& x) { return x[1]; })}, 0.0, 1.0};
  const MinimalCoupling mc = minimal_couple_operator(em, 1.0);
  CHECK(mc.is_identity());
  const ComplexField psi = random_field(g, 6);
  CHECK((mc.spatial(psi, 0).values() == diff(psi, 1).values()).all());
  CHECK((mc.temporal(psi).values() == diff(psi, 0).values()).all());
}

TEST_CASE("covariant derivative of a plane wave with constant A") {
  const double e = 0.7, hbar = 1.1, c = 2.0, a0 = 1.5, k = 2.0;
  const double gamma = e / (hbar * c);
  double prev = 0;
  for (std::size_t n : {101, 201, 401}) {
    const Grid g({space_axis(0, 2, n)});
    const EmPotentials em{RealField::constant(g, 0.0), {RealField::constant(g, a0)}, e, c};
    const MinimalCoupling mc(em, hbar);
    CHECK(mc.constants().spatial == doctest::Approx(gamma));
    const ComplexField psi = ComplexField::sample(g, [&](const Point& x) { return std::polar(1.0, k * x[0]); });
    const ComplexField d = mc.spatial(psi, 0);
    double err = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) err = std::max(err, std::abs(d[i] - cplx(0, k - gamma * a0) * psi[i]));
    if (prev > 0) CHECK(std::log2(prev / err) > 1.9);
    prev = err;
  }
}

TEST_CASE("opposite couplings compose to the second derivative plus gamma^2 A^2") {
  const double e = 1.0, hbar = 1.0, c = 1.0, a0 = 0.8;
  const Grid g({space_axis(0, 3, 301)});
  const EmPotentials plus{RealField::constant(g, 0.0), {RealField::constant(g, a0)}, e, c};
  const EmPotentials minus{RealField::constant(g, 0.0), {RealField::constant(g, -a0)}, e, c};
  const ComplexField psi = ComplexField::sample(g, [](const Point& x) { return std::polar(std::exp(-x[0]), 1.3 * x[0] * x[0]); });
  const ComplexField composed = MinimalCoupling(plus, hbar).spatial(MinimalCoupling(minus, hbar).spatial(psi, 0), 0);
  const ComplexField expected(g, diff(psi, 0, 2).values() + a0 * a0 * psi.values());
  const double h = g.axis(0).spacing();
  double err = 0;
  for (std::size_t i = 2; i + 2 < g.size(); ++i) err = std::max(err, std::abs(composed[i] - expected[i]));
  CHECK(err < 200 * h * h);
  // The expanded square agrees with applying the substitution twice.
  const EmPotentials varying{RealField::constant(g, 0.0), {RealField::sample(g, [](const Point& x) { return std::sin(x[0]); })}, e, c};
  const MinimalCoupling mv(varying, hbar);
  const ComplexField twice = mv.spatial(mv.spatial(psi, 0), 0);
  const ComplexField expanded = mv.spatial_squared(psi, 0);
  err = 0;
  for (std::size_t i = 2; i + 2 < g.size(); ++i) err = std::max(err, std::abs(twice[i] - expanded[i]));
  CHECK(err < 200 * h * h);
}
