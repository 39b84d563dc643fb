#include "mlab/gauge.hpp"

#include <cmath>
#include <sstream>

#include "mlab/diff.hpp"

namespace mlab {

PSchedule PSchedule::constant(double p0) {
  return {[p0](double) { return p0; }, [](double) { return 0.0; }, "constant(" + std::to_string(p0) + ")"};
}

PSchedule PSchedule::linear(double p0, double eps) {
  std::ostringstream os;
  os << "linear(p0=" << p0 << ", eps=" << eps << ")";
  return {[=](double t) { return p0 * (1.0 + eps * t); }, [=](double) { return p0 * eps; }, os.str()};
}

PSchedule PSchedule::sinusoidal(double p0, double eps, double omega) {
  std::ostringstream os;
  os << "sinusoidal(p0=" << p0 << ", eps=" << eps << ", omega=" << omega << ")";
  return {[=](double t) { return p0 * (1.0 + eps * std::sin(omega * t)); },
          [=](double t) { return p0 * eps * omega * std::cos(omega * t); }, os.str()};
}

PSchedule operator*(const PSchedule& x, const PSchedule& y) {
  return {[x, y](double t) { return x.value(t) * y.value(t); },
          [x, y](double t) { return x.rate(t) * y.value(t) + x.value(t) * y.rate(t); },
          x.label + " * " + y.label};
}

void require_positive(const PSchedule& p, double t0, double t1, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = p(t);
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "p(t) must stay positive: p(" << t << ") = " << v << " for " << p.label;
      throw DomainError(os.str());
    }
  }
}

DressingFields make_dressing(RealField c5, RealField c6, PSchedule p) {
  require_same_grid(c5.grid(), c6.grid(), "make_dressing");
  const Grid& g = c5.grid();
  if (!g.has_time()) throw GridError("make_dressing: C5 and C6 need a space-time grid");
  require_positive(p, g.axis(0).origin, g.axis(0).end(), g.axis(0).count);
  return {std::move(c5), std::move(c6), std::move(p)};
}

DressingFields identity_dressing(const Grid& grid) {
  return make_dressing(RealField::constant(grid, 0.0), RealField::constant(grid, 0.0), PSchedule::constant(1.0));
}

namespace {

cplx factor(double c5, double c6, double p, Direction dir) {
  return dir == Direction::forward ? std::exp(cplx(c6, -c5)) / p : p * std::exp(cplx(-c6, c5));
}

}  // namespace

ComplexField dress(const ComplexField& chi, const DressingFields& d, Direction direction) {
  const Grid& g = d.grid();
  require_same_grid(chi.grid(), g, "dress");
  ComplexField::Values v(chi.values().size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = d.p(g.point(i)[0]);
    v[static_cast<Eigen::Index>(i)] = chi[i] * factor(d.c5[i], d.c6[i], p, direction);
  }
  return {g, std::move(v)};
}

ComplexField dress_slice(const ComplexField& chi, const DressingFields& d, std::size_t time_index,
                         Direction direction) {
  const Grid& g = d.grid();
  if (!(chi.grid() == spatial_part(g))) throw GridError("dress_slice: snapshot grid does not match");
  if (time_index >= g.axis(0).count) throw GridError("dress_slice: time index out of range");
  const std::size_t base = time_index * g.stride(0);
  const double p = d.p(g.axis(0).coord(time_index));
  ComplexField::Values v(chi.values().size());
  for (std::size_t i = 0; i < chi.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = chi[i] * factor(d.c5[base + i], d.c6[base + i], p, direction);
  }
  return {chi.grid(), std::move(v)};
}

DressingFields compose(const DressingFields& x, const DressingFields& y) {
  require_same_grid(x.grid(), y.grid(), "compose");
  return {x.c5 + y.c5, x.c6 + y.c6, x.p * y.p};
}

namespace {

// (p^2/2m)[|grad C6|^2 - |grad C5|^2 + lap C6] + p dC5/dt, the shift between V and Vtilde.
RealField dressing_shift(const DressingFields& d, double mass) {
  const Grid& g = d.grid();
  Eigen::ArrayXd bracket = laplacian(d.c6).values();
  for (std::size_t k = g.space_begin(); k < g.rank(); ++k) {
    bracket += diff(d.c6, k).values().square() - diff(d.c5, k).values().square();
  }
  const RealField p = RealField::sample(g, [&](const Point& x) { return d.p(x[0]); });
  const RealField c5t = diff(d.c5, 0);
  return RealField(g, p.values().square() / (2.0 * mass) * bracket + p.values() * c5t.values());
}

}  // namespace

RealField v_tilde_of_v(const RealField& v, const DressingFields& d, double mass) {
  require_same_grid(v.grid(), d.grid(), "v_tilde_of_v");
  return v - dressing_shift(d, mass);
}

RealField v_of_v_tilde(const RealField& v_tilde, const DressingFields& d, double mass) {
  require_same_grid(v_tilde.grid(), d.grid(), "v_of_v_tilde");
  return v_tilde + dressing_shift(d, mass);
}

CouplingConstants coupling_constants(double charge, double hbar, double light_speed) {
  if (!(hbar > 0.0) || !(light_speed > 0.0)) throw DomainError("coupling constants need hbar > 0 and c > 0");
  return {charge / (hbar * light_speed), charge / hbar};
}

MinimalCoupling::MinimalCoupling(const EmPotentials& em, double hbar)
    : k_(coupling_constants(em.charge, hbar, em.light_speed)), phi_(em.phi), a_(em.a) {
  const Grid& g = phi_.grid();
  if (a_.size() != g.space_rank()) {
    throw GridError("minimal coupling: need one vector-potential component per spatial axis");
  }
  for (const RealField& ak : a_) require_same_grid(g, ak.grid(), "minimal coupling");
}

ComplexField MinimalCoupling::spatial(const ComplexField& psi, std::size_t k) const {
  require_same_grid(grid(), psi.grid(), "MinimalCoupling::spatial");
  const std::size_t axis = grid().space_begin() + k;
  const ComplexField d = diff(psi, axis);
  return {grid(), d.values() - cplx(0.0, k_.spatial) * a_.at(k).values().cast<cplx>() * psi.values()};
}

ComplexField MinimalCoupling::temporal(const ComplexField& psi) const {
  require_same_grid(grid(), psi.grid(), "MinimalCoupling::temporal");
  if (!grid().has_time()) throw GridError("MinimalCoupling::temporal needs a time axis");
  const ComplexField d = diff(psi, 0);
  return {grid(), d.values() + cplx(0.0, k_.temporal) * phi_.values().cast<cplx>() * psi.values()};
}

ComplexField MinimalCoupling::spatial_squared(const ComplexField& psi, std::size_t k) const {
  require_same_grid(grid(), psi.grid(), "MinimalCoupling::spatial_squared");
  const std::size_t axis = grid().space_begin() + k;
  const Eigen::ArrayXcd a = a_.at(k).values().cast<cplx>();
  const ComplexField ap(grid(), a * psi.values());
  const double gamma = k_.spatial;
  return {grid(), diff(psi, axis, 2).values() -
                      cplx(0.0, gamma) * (a * diff(psi, axis).values() + diff(ap, axis).values()) -
                      gamma * gamma * a.square() * psi.values()};
}

MinimalCoupling minimal_couple_operator(const EmPotentials& em, double hbar) { return MinimalCoupling(em, hbar); }

}  // namespace mlab
