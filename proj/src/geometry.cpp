#include "mlab/geometry.hpp"

#include <cmath>
#include <numbers>

#include "mlab/diff.hpp"

namespace mlab {

namespace {

constexpr std::array<std::array<std::size_t, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

void require_spacetime(const Grid& g, const char* where) {
  if (g.rank() != 4 || !g.has_time()) {
    throw GridError(std::string(where) + ": needs a (t, q1, q2, q3) grid");
  }
}

int permutation_sign(std::array<std::size_t, 4> p) {
  int sign = 1;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Derivative along a four-vector axis: the time axis carries x0 = v0 t.
RealField d_dx(const RealField& f, std::size_t lambda, double v0) {
  RealField d = diff(f, lambda, 1);
  return lambda == 0 ? d * (1.0 / v0) : d;
}

Vec4 interpolate_table(const std::array<RealField, 4>& table, const Point& p) {
  Vec4 out{};
  for (std::size_t mu = 0; mu < 4; ++mu) out[mu] = interpolate(table[mu], p);
  return out;
}

// Continuity residual d rho/dt + sum_k d(rho v_k)/dq_k for given velocity fields.
RealField transport(const RealField& rho, const std::vector<RealField>& v) {
  const Grid& g = rho.grid();
  RealField acc = diff(rho, 0, 1);
  for (std::size_t k = 0; k < v.size(); ++k) acc = acc + diff(rho * v[k], g.space_begin() + k, 1);
  return acc;
}

}  // namespace

Vec4 FourPotential::at(const Point& p) const {
  if (table) return interpolate_table(*table, p);
  if (!value) throw DomainError("four-potential has neither a closed form nor a table");
  return value(p);
}

FourPotential constant_b(const Vec3& b, const Vec3& center, double v0) {
  if (!(v0 > 0.0)) throw DomainError("constant_b: v0 must be positive");
  FourPotential pot;
  pot.generator = "constant_b";
  pot.v0 = v0;
  pot.value = [b, center](const Point& x) {
    const Vec3 r{x[1] - center[0], x[2] - center[1], x[3] - center[2]};
    return Vec4{0.0, 0.5 * (b[1] * r[2] - b[2] * r[1]), 0.5 * (b[2] * r[0] - b[0] * r[2]),
                0.5 * (b[0] * r[1] - b[1] * r[0])};
  };
  pot.jacobian = [b](const Point&) {
    Jac4 j{};
    // A~_1 = (b2 r3 - b3 r2)/2 etc.
    j[3][1] = 0.5 * b[1];
    j[2][1] = -0.5 * b[2];
    j[1][2] = 0.5 * b[2];
    j[3][2] = -0.5 * b[0];
    j[2][3] = 0.5 * b[0];
    j[1][3] = -0.5 * b[1];
    return j;
  };
  return pot;
}

FourPotential flux_line(double flux, double c1, double c2, double core_radius, double v0) {
  if (!(core_radius > 0.0)) throw DomainError("flux_line: core radius must be positive");
  if (!(v0 > 0.0)) throw DomainError("flux_line: v0 must be positive");
  FourPotential pot;
  pot.generator = "flux_line";
  pot.v0 = v0;
  const double k = flux / (2.0 * std::numbers::pi);
  const double rc2 = core_radius * core_radius;
  // A~ = g(r2) (-y, x) with g = k / r2 outside the core and k / rc2 inside.
  pot.value = [=](const Point& p) {
    const double x = p[1] - c1, y = p[2] - c2, r2 = x * x + y * y;
    const double g = r2 >= rc2 ? k / r2 : k / rc2;
    return Vec4{0.0, -g * y, g * x, 0.0};
  };
  pot.jacobian = [=](const Point& p) {
    const double x = p[1] - c1, y = p[2] - c2, r2 = x * x + y * y;
    Jac4 j{};
    if (r2 >= rc2) {
      const double r4 = r2 * r2;
      j[1][1] = 2.0 * k * x * y / r4;
      j[2][1] = -k * (x * x - y * y) / r4;
      j[1][2] = k * (y * y - x * x) / r4;
      j[2][2] = -2.0 * k * x * y / r4;
    } else {
      j[2][1] = -k / rc2;
      j[1][2] = k / rc2;
    }
    return j;
  };
  pot.excluded = [=](const Point& p) {
    const double x = p[1] - c1, y = p[2] - c2;
    return x * x + y * y < rc2;
  };
  return pot;
}

FourPotential plane_wave(const Vec3& polarization, const Vec3& k, double phase, double v0) {
  if (!(v0 > 0.0)) throw DomainError("plane_wave: v0 must be positive");
  const double kn = norm3(k);
  if (kn == 0.0) throw DomainError("plane_wave: wave vector must be nonzero");
  const double dot = polarization[0] * k[0] + polarization[1] * k[1] + polarization[2] * k[2];
  if (std::abs(dot) > 1e-12 * kn * std::max(1.0, norm3(polarization))) {
    throw DomainError("plane_wave: polarization must be transverse to the wave vector");
  }
  FourPotential pot;
  pot.generator = "plane_wave";
  pot.v0 = v0;
  const double omega = v0 * kn;
  auto arg = [=](const Point& x) { return k[0] * x[1] + k[1] * x[2] + k[2] * x[3] - omega * x[0] + phase; };
  pot.value = [=](const Point& x) {
    const double c = std::cos(arg(x));
    return Vec4{0.0, polarization[0] * c, polarization[1] * c, polarization[2] * c};
  };
  pot.jacobian = [=](const Point& x) {
    const double s = std::sin(arg(x));
    // d/dx0 of the phase is -omega / v0 = -|k|.
    const Vec4 dphase{-kn, k[0], k[1], k[2]};
    Jac4 j{};
    for (std::size_t l = 0; l < 4; ++l) {
      for (std::size_t m = 1; m < 4; ++m) j[l][m] = -polarization[m - 1] * s * dphase[l];
    }
    return j;
  };
  return pot;
}

FourPotential pure_gauge(double amplitude, const Vec4& kappa, double v0) {
  if (!(v0 > 0.0)) throw DomainError("pure_gauge: v0 must be positive");
  FourPotential pot;
  pot.generator = "pure_gauge";
  pot.v0 = v0;
  auto arg = [=](const Point& x) {
    return kappa[0] * v0 * x[0] + kappa[1] * x[1] + kappa[2] * x[2] + kappa[3] * x[3];
  };
  pot.value = [=](const Point& x) {
    const double c = amplitude * std::cos(arg(x));
    return Vec4{kappa[0] * c, kappa[1] * c, kappa[2] * c, kappa[3] * c};
  };
  pot.jacobian = [=](const Point& x) {
    const double s = amplitude * std::sin(arg(x));
    Jac4 j{};
    for (std::size_t l = 0; l < 4; ++l) {
      for (std::size_t m = 0; m < 4; ++m) j[l][m] = -kappa[l] * kappa[m] * s;
    }
    return j;
  };
  return pot;
}

FourPotential tabulated(std::array<RealField, 4> components, double v0) {
  if (!(v0 > 0.0)) throw DomainError("tabulated: v0 must be positive");
  const Grid& g = components[0].grid();
  require_spacetime(g, "tabulated");
  for (const RealField& c : components) require_same_grid(g, c.grid(), "tabulated");
  FourPotential pot;
  pot.generator = "tabulated";
  pot.v0 = v0;
  for (std::size_t k = 0; k < 4; ++k) pot.x0[k] = g.axis(k).origin;
  pot.table = std::move(components);
  return pot;
}

FourPotential sample(const FourPotential& pot, const Grid& grid) {
  require_spacetime(grid, "sample");
  std::array<RealField::Values, 4> v;
  for (auto& c : v) c.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec4 a = pot.at(grid.point(i));
    for (std::size_t mu = 0; mu < 4; ++mu) v[mu][static_cast<Eigen::Index>(i)] = a[mu];
  }
  FourPotential out = tabulated({RealField(grid, std::move(v[0])), RealField(grid, std::move(v[1])),
                                 RealField(grid, std::move(v[2])), RealField(grid, std::move(v[3]))},
                                pot.v0);
  out.x0 = pot.x0;
  out.excluded = pot.excluded;
  return out;
}

FourPotential operator+(const FourPotential& a, const FourPotential& b) {
  if (a.v0 != b.v0) throw DomainError("adding four-potentials with different v0");
  if (a.table || b.table) {
    const Grid& g = a.table ? (*a.table)[0].grid() : (*b.table)[0].grid();
    const FourPotential sa = a.table ? a : sample(a, g);
    const FourPotential sb = b.table ? b : sample(b, g);
    std::array<RealField, 4> sum{(*sa.table)[0] + (*sb.table)[0], (*sa.table)[1] + (*sb.table)[1],
                                 (*sa.table)[2] + (*sb.table)[2], (*sa.table)[3] + (*sb.table)[3]};
    FourPotential out = tabulated(std::move(sum), a.v0);
    out.generator = a.generator + "+" + b.generator;
    out.x0 = a.x0;
    out.excluded = a.excluded;
    return out;
  }
  FourPotential out;
  out.generator = a.generator + "+" + b.generator;
  out.v0 = a.v0;
  out.x0 = a.x0;
  out.excluded = a.excluded;
  auto va = a.value, vb = b.value;
  auto ja = a.jacobian, jb = b.jacobian;
  out.value = [va, vb](const Point& x) {
    Vec4 p = va(x);
    const Vec4 q = vb(x);
    for (std::size_t m = 0; m < 4; ++m) p[m] += q[m];
    return p;
  };
  out.jacobian = [ja, jb](const Point& x) {
    Jac4 p = ja(x);
    const Jac4 q = jb(x);
    for (std::size_t l = 0; l < 4; ++l) {
      for (std::size_t m = 0; m < 4; ++m) p[l][m] += q[l][m];
    }
    return p;
  };
  return out;
}

FourPotential physical_to_tilde(const EmPotentials& em, double hbar) {
  if (!(hbar > 0.0)) throw DomainError("physical_to_tilde: hbar must be positive");
  if (!(em.light_speed > 0.0)) throw DomainError("physical_to_tilde: light speed must be positive");
  require_spacetime(em.phi.grid(), "physical_to_tilde");
  if (em.a.size() != 3) throw GridError("physical_to_tilde: need three vector-potential components");
  const double gamma = em.charge / (hbar * em.light_speed);
  return tabulated({-gamma * em.phi, gamma * em.a[0], gamma * em.a[1], gamma * em.a[2]}, em.light_speed);
}

double c5_path_integral(const FourPotential& pot, const PathSpec& path, std::size_t subdivisions) {
  if (path.waypoints.size() < 2) throw GridError("c5_path_integral: a path needs at least two waypoints");
  if (pot.table) {
    const auto& t = *pot.table;
    return line_integral(path, {pot.v0 * t[0], t[1], t[2], t[3]}, subdivisions);
  }
  const double v0 = pot.v0;
  const auto& value = pot.value;
  return line_integral(path, 4,
                       [&](const Point& x) {
                         const Vec4 a = value(x);
                         return Point{v0 * a[0], a[1], a[2], a[3]};
                       },
                       subdivisions);
}

double c_path_integral(const EmPotentials& em, const PathSpec& path, std::size_t subdivisions) {
  const Grid& g = em.phi.grid();
  if (em.a.size() != g.space_rank()) throw GridError("c_path_integral: one A component per spatial axis");
  std::vector<RealField> comps;
  if (g.has_time()) comps.push_back(-em.light_speed * em.phi);
  for (const RealField& a : em.a) comps.push_back(a);
  return line_integral(path, comps, subdivisions);
}

FieldTensor::FieldTensor(std::array<RealField, 6> upper, double v0) : f_(std::move(upper)), v0_(v0) {
  require_spacetime(f_[0].grid(), "FieldTensor");
  for (const RealField& c : f_) require_same_grid(f_[0].grid(), c.grid(), "FieldTensor");
  if (!(v0 > 0.0)) throw DomainError("FieldTensor: v0 must be positive");
}

std::size_t FieldTensor::slot(std::size_t mu, std::size_t nu) {
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    if (pairs[s][0] == mu && pairs[s][1] == nu) return s;
  }
  throw GridError("FieldTensor: slot needs mu < nu < 4");
}

RealField FieldTensor::component(std::size_t mu, std::size_t nu) const {
  if (mu > 3 || nu > 3) throw GridError("FieldTensor: index out of range");
  if (mu == nu) return RealField::constant(grid(), 0.0);
  return mu < nu ? f_[slot(mu, nu)] : -f_[slot(nu, mu)];
}

RealField FieldTensor::e(std::size_t k) const {
  if (k < 1 || k > 3) throw GridError("FieldTensor: E component index must be 1..3");
  return -f_[slot(0, k)];
}

RealField FieldTensor::b(std::size_t k) const {
  switch (k) {
    case 1: return f_[slot(2, 3)];
    case 2: return -f_[slot(1, 3)];
    case 3: return f_[slot(1, 2)];
    default: throw GridError("FieldTensor: B component index must be 1..3");
  }
}

FieldTensor field_tensor(const FourPotential& pot, const Grid& grid) {
  require_spacetime(grid, "field_tensor");
  if (pot.table) {
    const auto& t = *pot.table;
    if (!(t[0].grid() == grid)) throw GridError("field_tensor: tabulated potential lives on another grid");
    std::array<std::array<std::optional<RealField>, 4>, 4> d;
    auto deriv = [&](std::size_t l, std::size_t m) -> const RealField& {
      if (!d[l][m]) d[l][m] = d_dx(t[m], l, pot.v0);
      return *d[l][m];
    };
    std::array<RealField, 6> up{deriv(0, 1) - deriv(1, 0), deriv(0, 2) - deriv(2, 0), deriv(0, 3) - deriv(3, 0),
                                deriv(1, 2) - deriv(2, 1), deriv(1, 3) - deriv(3, 1), deriv(2, 3) - deriv(3, 2)};
    return FieldTensor(std::move(up), pot.v0);
  }
  std::array<RealField::Values, 6> v;
  for (auto& c : v) c.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Jac4 j = pot.jacobian(grid.point(i));
    for (std::size_t s = 0; s < 6; ++s) {
      const auto [mu, nu] = pairs[s];
      v[s][static_cast<Eigen::Index>(i)] = j[mu][nu] - j[nu][mu];
    }
  }
  return FieldTensor({RealField(grid, std::move(v[0])), RealField(grid, std::move(v[1])),
                      RealField(grid, std::move(v[2])), RealField(grid, std::move(v[3])),
                      RealField(grid, std::move(v[4])), RealField(grid, std::move(v[5]))},
                     pot.v0);
}

FieldTensor field_tensor(const FourPotential& pot) {
  if (!pot.table) throw GridError("field_tensor: a closed-form potential needs a sampling grid");
  return field_tensor(pot, (*pot.table)[0].grid());
}

FieldTensor tensor_from_eb(const std::array<RealField, 3>& e, const std::array<RealField, 3>& b, double v0) {
  return FieldTensor({-e[0], -e[1], -e[2], b[2], -b[1], b[0]}, v0);
}

namespace {

// Winding number of the polygon (u, v) around p, counterclockwise positive.
int winding_number(const std::vector<std::array<double, 2>>& poly, double pu, double pv) {
  int wn = 0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[i + 1];
    const double left = (b[0] - a[0]) * (pv - a[1]) - (pu - a[0]) * (b[1] - a[1]);
    if (a[1] <= pv) {
      if (b[1] > pv && left > 0.0) ++wn;
    } else if (b[1] <= pv && left < 0.0) {
      --wn;
    }
  }
  return wn;
}

}  // namespace

StokesReport stokes_check(const FourPotential& pot, const PathSpec& loop, std::size_t subdivisions) {
  if (!loop.is_closed()) throw DomainError("stokes_check: loop must be closed");
  if (subdivisions == 0) throw DomainError("stokes_check: subdivisions must be positive");
  const Point& first = loop.waypoints.front();
  std::vector<std::size_t> varying;
  for (std::size_t k = 0; k < 4; ++k) {
    for (const Point& w : loop.waypoints) {
      if (std::abs(w[k] - first[k]) > 1e-12 * std::max(1.0, std::abs(first[k]))) {
        varying.push_back(k);
        break;
      }
    }
  }
  if (varying.size() != 2) {
    throw DomainError("stokes_check: loop is not planar in an axis-aligned coordinate plane");
  }
  StokesReport r;
  r.axis_u = varying[0];
  r.axis_v = varying[1];
  r.loop_integral = c5_path_integral(pot, loop, subdivisions);

  std::vector<std::array<double, 2>> poly;
  double umin = first[r.axis_u], umax = umin, vmin = first[r.axis_v], vmax = vmin;
  for (const Point& w : loop.waypoints) {
    poly.push_back({w[r.axis_u], w[r.axis_v]});
    umin = std::min(umin, w[r.axis_u]);
    umax = std::max(umax, w[r.axis_u]);
    vmin = std::min(vmin, w[r.axis_v]);
    vmax = std::max(vmax, w[r.axis_v]);
  }

  std::optional<RealField> tabulated_f;
  if (pot.table) tabulated_f = field_tensor(pot).component(r.axis_u, r.axis_v);
  const double du = (umax - umin) / static_cast<double>(subdivisions);
  const double dv = (vmax - vmin) / static_cast<double>(subdivisions);
  // The surface element in x coordinates picks up v0 when the time axis lies in the plane.
  const double area = du * dv * (r.axis_u == 0 ? pot.v0 : 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < subdivisions; ++i) {
    for (std::size_t j = 0; j < subdivisions; ++j) {
      Point x = first;
      x[r.axis_u] = umin + (static_cast<double>(i) + 0.5) * du;
      x[r.axis_v] = vmin + (static_cast<double>(j) + 0.5) * dv;
      const int wn = winding_number(poly, x[r.axis_u], x[r.axis_v]);
      if (wn == 0) continue;
      if (pot.excluded && pot.excluded(x)) {
        ++r.excluded_samples;
        continue;
      }
      ++r.surface_samples;
      double f;
      if (tabulated_f) {
        f = interpolate(*tabulated_f, x);
      } else {
        const Jac4 jac = pot.jacobian(x);
        f = jac[r.axis_u][r.axis_v] - jac[r.axis_v][r.axis_u];
      }
      sum += wn * f;
    }
  }
  r.surface_integral = sum * area;
  r.discrepancy = r.loop_integral - r.surface_integral;
  return r;
}

std::array<RealField, 4> bianchi_residual(const FieldTensor& tensor) {
  const Grid& g = tensor.grid();
  std::array<std::optional<RealField>, 4> out;
  for (std::size_t kappa = 0; kappa < 4; ++kappa) {
    RealField acc = RealField::constant(g, 0.0);
    for (std::size_t lambda = 0; lambda < 4; ++lambda) {
      if (lambda == kappa) continue;
      std::array<std::size_t, 2> rest{};
      std::size_t n = 0;
      for (std::size_t m = 0; m < 4; ++m) {
        if (m != kappa && m != lambda) rest[n++] = m;
      }
      const int sign = permutation_sign({kappa, lambda, rest[0], rest[1]});
      // The mu <-> nu pair appears twice in the sum, cancelling the factor 1/2.
      const RealField d = d_dx(tensor.component(rest[0], rest[1]), lambda, tensor.v0());
      acc = acc + static_cast<double>(sign) * d;
    }
    out[kappa] = std::move(acc);
  }
  return {std::move(*out[0]), std::move(*out[1]), std::move(*out[2]), std::move(*out[3])};
}

MaxwellResidual maxwell_homogeneous_residual(const FieldTensor& tensor) {
  const std::array<RealField, 3> e{tensor.e(1), tensor.e(2), tensor.e(3)};
  const std::array<RealField, 3> b{tensor.b(1), tensor.b(2), tensor.b(3)};
  RealField div = diff(b[0], 1) + diff(b[1], 2) + diff(b[2], 3);
  const double inv = 1.0 / tensor.v0();
  RealField f1 = diff(e[2], 2) - diff(e[1], 3) + diff(b[0], 0) * inv;
  RealField f2 = diff(e[0], 3) - diff(e[2], 1) + diff(b[1], 0) * inv;
  RealField f3 = diff(e[1], 1) - diff(e[0], 2) + diff(b[2], 0) * inv;
  return {std::move(div), {std::move(f1), std::move(f2), std::move(f3)}};
}

EBFields eb_from_potentials(const EmPotentials& em) {
  const Grid& g = em.phi.grid();
  if (g.space_rank() != 3 || em.a.size() != 3) {
    throw GridError("eb_from_potentials: needs three spatial axes and three A components");
  }
  if (!(em.light_speed > 0.0)) throw DomainError("eb_from_potentials: light speed must be positive");
  for (const RealField& a : em.a) require_same_grid(g, a.grid(), "eb_from_potentials");
  const std::size_t s0 = g.space_begin();
  auto dq = [&](const RealField& f, std::size_t k) { return diff(f, s0 + k - 1); };
  std::array<std::optional<RealField>, 3> e;
  for (std::size_t k = 1; k <= 3; ++k) {
    RealField ek = -dq(em.phi, k);
    if (g.has_time()) ek = ek - diff(em.a[k - 1], 0) * (1.0 / em.light_speed);
    e[k - 1] = std::move(ek);
  }
  const auto& a = em.a;
  return {{std::move(*e[0]), std::move(*e[1]), std::move(*e[2])},
          {dq(a[2], 2) - dq(a[1], 3), dq(a[0], 3) - dq(a[2], 1), dq(a[1], 1) - dq(a[0], 2)}};
}

CompensationReport compensate_action(const RealField& s, const FourPotential& pot, const PathFamily& family,
                                     double hbar, double tolerance, std::size_t subdivisions) {
  if (!(hbar > 0.0)) throw DomainError("compensate_action: hbar must be positive");
  if (family.paths.size() != family.targets.size()) {
    throw DomainError("compensate_action: one path list per target");
  }
  CompensationReport r;
  r.tolerance = tolerance;
  for (std::size_t t = 0; t < family.targets.size(); ++t) {
    const Point& target = family.targets[t];
    const auto& paths = family.paths[t];
    if (paths.empty()) throw DomainError("compensate_action: target without paths");
    CompensationEntry entry;
    entry.target = target;
    const double s_target = interpolate(s, target);
    for (const PathSpec& p : paths) {
      if (p.waypoints.size() < 2) throw DomainError("compensate_action: a path needs two waypoints");
      for (std::size_t k = 0; k < 4; ++k) {
        if (std::abs(p.waypoints.front()[k] - pot.x0[k]) > 1e-12 * std::max(1.0, std::abs(pot.x0[k])) ||
            std::abs(p.waypoints.back()[k] - target[k]) > 1e-12 * std::max(1.0, std::abs(target[k]))) {
          throw DomainError("compensate_action: paths must run from the reference point to their target");
        }
      }
      const double c5 = c5_path_integral(pot, p, subdivisions);
      entry.c5.push_back(c5);
      entry.s_bar.push_back(s_target + hbar * c5);
    }
    const std::size_t n = paths.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double spread = std::abs(std::polar(1.0, entry.s_bar[a] / hbar) - std::polar(1.0, entry.s_bar[b] / hbar));
        r.max_action_spread = std::max(r.max_action_spread, std::abs(entry.s_bar[a] - entry.s_bar[b]));
        if (spread > entry.phase_spread) entry.phase_spread = spread;
        if (spread > r.max_phase_spread) {
          r.max_phase_spread = spread;
          r.worst_target = t;
          r.path_a = a;
          r.path_b = b;
        }
      }
    }
    r.entries.push_back(std::move(entry));
  }
  r.unique = r.max_phase_spread <= tolerance;
  return r;
}

C6RejectionReport c6_rejection_demo(const RealField& rho_bar, const RealField& s_bar, const RealField& c6,
                                    double mass, const EmPotentials* em) {
  const Grid& g = rho_bar.grid();
  if (!g.has_time()) throw GridError("c6_rejection_demo: needs a time axis");
  if (!(mass > 0.0)) throw DomainError("c6_rejection_demo: mass must be positive");
  require_same_grid(g, s_bar.grid(), "c6_rejection_demo");
  require_same_grid(g, c6.grid(), "c6_rejection_demo");
  std::vector<RealField> v;
  for (std::size_t k = 0; k < g.space_rank(); ++k) {
    RealField p = diff(s_bar, g.space_begin() + k);
    if (em) {
      if (em->a.size() != g.space_rank()) throw GridError("c6_rejection_demo: one A component per spatial axis");
      p = p - (em->charge / em->light_speed) * em->a[k];
    }
    v.push_back(p * (1.0 / mass));
  }
  const RealField c6_t = diff(c6, 0);
  RealField advect = RealField::constant(g, 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) advect = advect + v[k] * diff(c6, g.space_begin() + k);

  const RealField temporal = -2.0 * (rho_bar * c6_t);
  const RealField convective = -2.0 * (rho_bar * advect);
  const RealField source = temporal + convective;
  C6RejectionReport r{temporal, convective, source, -2.0 * (c6_t + advect)};
  r.max_source = max_abs(source, true);
  r.c6_survives = r.max_source > 0.0;

  const RealField weight = map(c6, [](double c) { return std::exp(2.0 * c); });
  const RealField unweight = map(c6, [](double c) { return std::exp(-2.0 * c); });
  const RealField check = unweight * transport(rho_bar * weight, v) - transport(rho_bar, v) + source;
  r.cross_check = max_abs(check, true);
  return r;
}

}  // namespace mlab
