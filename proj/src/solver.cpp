#include "mlab/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mlab/diff.hpp"

namespace mlab {

Axis periodic_axis(double a, double length, std::size_t n) {
  if (n < 3 || !(length > 0.0)) throw GridError("periodic_axis: need n >= 3 and a positive length");
  return space_axis(a, a + length - length / static_cast<double>(n), n);
}

double norm(const ComplexField& psi) { return psi.values().abs2().sum() * psi.grid().cell_volume(true); }

namespace {

constexpr double solve_tolerance = 1e-12;
constexpr int max_solve_iterations = 2000;

BoundaryKind boundary_of(const EvolutionProblem& pb, std::size_t k) {
  return pb.boundary.empty() ? BoundaryKind::reflecting : pb.boundary[k];
}

double schedule_or(const std::optional<PSchedule>& p, double hbar, double t) { return p ? p->value(t) : hbar; }

double time_coefficient(const EvolutionProblem& pb, StepMode mode, double t) {
  switch (mode) {
    case StepMode::plain:
    case StepMode::gauged: return pb.hbar;
    case StepMode::p_of_t:
    case StepMode::dressed: return schedule_or(pb.p, pb.hbar, t);
  }
  return pb.hbar;
}

// Linear-in-time interpolation of a space-time field onto spatial node i at time t.
double at_time(const RealField& f, double t, std::size_t i) {
  const Grid& g = f.grid();
  const Axis& ax = g.axis(0);
  const double s = (t - ax.origin) / ax.spacing();
  const double last = static_cast<double>(ax.count - 1);
  if (s < -1e-9 || s > last + 1e-9) {
    std::ostringstream os;
    os << "time " << t << " lies outside the dressing grid [" << ax.origin << ", " << ax.end() << "]";
    throw SolverError(os.str());
  }
  const std::size_t n = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(s))), ax.count - 2);
  const double w = s - static_cast<double>(n);
  const std::size_t st = g.stride(0);
  return (1.0 - w) * f[n * st + i] + w * f[(n + 1) * st + i];
}

struct Neighbours {
  std::size_t minus;
  std::size_t plus;
};

Neighbours neighbours(const Grid& g, std::size_t i, std::size_t k) {
  const std::size_t idx = g.index_along(i, k), s = g.stride(k), n = g.axis(k).count;
  return {idx == 0 ? i + (n - 1) * s : i - s, idx + 1 == n ? i - (n - 1) * s : i + s};
}

}  // namespace

struct Integrator::Coefficients {
  double p = 1.0;
  Eigen::ArrayXcd diag;
  std::vector<Eigen::ArrayXcd> lower;
  std::vector<Eigen::ArrayXcd> upper;
  std::vector<std::uint8_t> unknown;  // node carries an unknown (not a reflecting boundary)
};

void validate(const EvolutionProblem& pb) {
  const Grid& g = pb.initial.grid();
  if (g.has_time()) throw GridError("evolution problem: the initial state must live on a spatial grid");
  if (g.space_rank() > 2) throw GridError("evolution problem: only 1 or 2 spatial dimensions are supported");
  if (!(pb.dt > 0.0) || !std::isfinite(pb.dt)) throw DomainError("evolution problem: dt must be positive");
  if (!(pb.mass > 0.0) || !(pb.hbar > 0.0)) throw DomainError("evolution problem: mass and hbar must be positive");
  if (!pb.boundary.empty() && pb.boundary.size() != g.space_rank()) {
    throw GridError("evolution problem: one boundary kind per spatial axis");
  }
  if (!pb.unnormalized && std::abs(norm(pb.initial) - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "evolution problem: initial state has norm " << norm(pb.initial) << " (expected 1 within 1e-10)";
    throw DomainError(os.str());
  }
  if (pb.p) require_positive(*pb.p, pb.t0, pb.t0, 1);
  if (pb.em) {
    if (pb.p || pb.dressing) throw SolverError("evolution problem: potentials cannot be combined with p(t) or dressing");
    if (!pb.em->a.empty() && pb.em->a.size() != g.space_rank()) {
      throw GridError("evolution problem: one vector-potential component per spatial axis");
    }
    coupling_constants(pb.em->charge, pb.hbar, pb.em->light_speed);
  }
  if (pb.dressing) {
    const Grid& dg = pb.dressing->fields.grid();
    if (g.space_rank() != 1) throw GridError("evolution problem: dressing is supported in one spatial dimension");
    if (!(spatial_part(dg) == g)) throw GridError("evolution problem: dressing grid does not match the state grid");
    require_same_grid(dg, pb.dressing->v_tilde.grid(), "evolution problem dressing");
    if (pb.potential) throw SolverError("evolution problem: dressed problems take their potential from v_tilde");
  }
}

SolverState initial_state(const EvolutionProblem& pb) {
  validate(pb);
  return {pb.initial, pb.t0, 0};
}

StepMode default_mode(const EvolutionProblem& pb) {
  if (pb.dressing) return StepMode::dressed;
  if (pb.em) return StepMode::gauged;
  if (pb.p) return StepMode::p_of_t;
  return StepMode::plain;
}

Integrator::Integrator(const EvolutionProblem& problem, StepMode mode) : problem_(&problem), mode_(mode) {
  validate(problem);
  switch (mode) {
    case StepMode::plain:
      if (problem.p || problem.em || problem.dressing) {
        throw SolverError("step_cn: problem carries p(t), potentials or dressing; use the matching step");
      }
      break;
    case StepMode::p_of_t:
      if (!problem.p) throw SolverError("step_p_of_t: problem has no p(t) schedule");
      if (problem.dressing) throw SolverError("step_p_of_t: problem carries dressing; use step_dressed");
      break;
    case StepMode::gauged:
      if (!problem.em) throw SolverError("step_gauged: problem has no electromagnetic potentials");
      break;
    case StepMode::dressed: {
      if (!problem.dressing) throw SolverError("step_dressed: problem has no dressing fields");
      const DressingFields& d = problem.dressing->fields;
      dressing_derivs_ = {diff(d.c5, 1), diff(d.c5, 1, 2), diff(d.c6, 1), diff(d.c6, 0)};
      break;
    }
  }
}

Integrator::Coefficients Integrator::assemble(double t) const {
  const EvolutionProblem& pb = *problem_;
  const Grid& g = pb.initial.grid();
  const std::size_t n = g.size(), rank = g.rank();
  Coefficients c;
  c.p = time_coefficient(pb, mode_, t);
  if (!(c.p > 0.0)) {
    std::ostringstream os;
    os << "p(t) crossed zero: p(" << t << ") = " << c.p;
    throw DomainError(os.str());
  }
  const double kin = c.p * c.p / (2.0 * pb.mass);
  c.diag = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(n));
  c.lower.assign(rank, Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(n)));
  c.upper.assign(rank, Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(n)));
  c.unknown.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rank; ++k) {
      const std::size_t idx = g.index_along(i, k);
      if (boundary_of(pb, k) == BoundaryKind::reflecting && (idx == 0 || idx + 1 == g.axis(k).count)) {
        c.unknown[i] = 0;
      }
    }
  }
  for (std::size_t k = 0; k < rank; ++k) {
    const double h = g.axis(k).spacing();
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      c.diag[ii] += 2.0 * kin / (h * h);
      c.lower[k][ii] = -kin / (h * h);
      c.upper[k][ii] = -kin / (h * h);
    }
  }
  auto potential_at = [&](std::size_t i) { return pb.potential ? pb.potential(t, g.point(i)) : 0.0; };

  if (mode_ == StepMode::gauged) {
    const TimeDependentEm& em = *pb.em;
    const double gamma = coupling_constants(em.charge, pb.hbar, em.light_speed).spatial;
    for (std::size_t k = 0; k < rank; ++k) {
      const bool has_a = k < em.a.size() && em.a[k];
      Eigen::ArrayXd a = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n));
      if (has_a) {
        for (std::size_t i = 0; i < n; ++i) a[static_cast<Eigen::Index>(i)] = em.a[k](t, g.point(i));
      }
      const double h = g.axis(k).spacing();
      for (std::size_t i = 0; i < n; ++i) {
        if (!c.unknown[i]) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        const Neighbours nb = neighbours(g, i, k);
        const double ai = a[ii];
        c.upper[k][ii] += cplx(0.0, kin * gamma * (ai + a[static_cast<Eigen::Index>(nb.plus)]) / (2.0 * h));
        c.lower[k][ii] += cplx(0.0, -kin * gamma * (ai + a[static_cast<Eigen::Index>(nb.minus)]) / (2.0 * h));
        c.diag[ii] += kin * gamma * gamma * ai * ai;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double phi = em.phi ? em.phi(t, g.point(i)) : 0.0;
      c.diag[static_cast<Eigen::Index>(i)] += potential_at(i) + em.charge * phi;
    }
  } else if (mode_ == StepMode::dressed) {
    const DressedTerms& dt = *pb.dressing;
    const double rate = pb.p ? pb.p->rate(t) : 0.0;
    const double h = g.axis(0).spacing();
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double c5q = at_time(dressing_derivs_[0], t, i), c5qq = at_time(dressing_derivs_[1], t, i);
      const double c6q = at_time(dressing_derivs_[2], t, i), c6t = at_time(dressing_derivs_[3], t, i);
      const cplx beta(2.0 * c6q, -2.0 * c5q);
      c.upper[0][ii] += -kin * beta / (2.0 * h);
      c.lower[0][ii] += kin * beta / (2.0 * h);
      c.diag[ii] += cplx(at_time(dt.v_tilde, t, i), kin * (2.0 * c5q * c6q + c5qq) + rate - c.p * c6t);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) c.diag[static_cast<Eigen::Index>(i)] += potential_at(i);
  }
  return c;
}

namespace {

Eigen::VectorXcd apply(const Grid& g, const Integrator::Coefficients& c, const Eigen::VectorXcd& psi,
                       const std::vector<std::uint8_t>& unknown) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!unknown[i]) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    cplx v = c.diag[ii] * psi[ii];
    for (std::size_t k = 0; k < g.rank(); ++k) {
      const Neighbours nb = neighbours(g, i, k);
      if (unknown[nb.minus]) v += c.lower[k][ii] * psi[static_cast<Eigen::Index>(nb.minus)];
      if (unknown[nb.plus]) v += c.upper[k][ii] * psi[static_cast<Eigen::Index>(nb.plus)];
    }
    out[ii] = v;
  }
  return out;
}

// Thomas algorithm: sub[j] multiplies x[j-1], sup[j] multiplies x[j+1].
void thomas(std::vector<cplx> sub, std::vector<cplx> diag, std::vector<cplx> sup, std::vector<cplx>& x) {
  const std::size_t n = diag.size();
  for (std::size_t j = 1; j < n; ++j) {
    const cplx w = sub[j] / diag[j - 1];
    diag[j] -= w * sup[j - 1];
    x[j] -= w * x[j - 1];
  }
  x[n - 1] /= diag[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) x[j] = (x[j] - sup[j] * x[j + 1]) / diag[j];
  for (const cplx& v : x) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw SolverError("tridiagonal solve produced non-finite values");
  }
}

// Cyclic tridiagonal system with corner entries: row 0 couples to x[n-1] by sub[0],
// row n-1 couples to x[0] by sup[n-1]. Sherman-Morrison on top of the Thomas solve.
void cyclic_thomas(const std::vector<cplx>& sub, const std::vector<cplx>& diag, const std::vector<cplx>& sup,
                   std::vector<cplx>& x) {
  const std::size_t n = diag.size();
  const cplx alpha = sup[n - 1], beta = sub[0];
  const cplx gamma = -diag[0];
  std::vector<cplx> bb = diag;
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;
  std::vector<cplx> u(n, cplx{});
  u[0] = gamma;
  u[n - 1] = alpha;
  thomas(sub, bb, sup, x);
  thomas(sub, bb, sup, u);
  const cplx fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
  for (std::size_t j = 0; j < n; ++j) x[j] -= fact * u[j];
}

}  // namespace

ComplexField Integrator::apply_hamiltonian(const ComplexField& psi, double t) const {
  const Coefficients c = assemble(t);
  const Grid& g = problem_->initial.grid();
  require_same_grid(g, psi.grid(), "apply_hamiltonian");
  return {g, apply(g, c, psi.values().matrix(), c.unknown).array()};
}

double Integrator::energy(const ComplexField& psi, double t) const {
  const ComplexField h = apply_hamiltonian(psi, t);
  const cplx num = (psi.values().conjugate() * h.values()).sum();
  return num.real() / psi.values().abs2().sum();
}

SolverState Integrator::step(const SolverState& state) const {
  const EvolutionProblem& pb = *problem_;
  const Grid& g = pb.initial.grid();
  require_same_grid(g, state.psi.grid(), "step");
  const double dt = pb.dt;
  const double t_mid = state.time + 0.5 * dt;
  const Coefficients c = assemble(t_mid);
  const cplx half(0.0, 0.5 * dt);
  const Eigen::VectorXcd psi = state.psi.values().matrix();
  const Eigen::VectorXcd rhs = c.p * psi - half * apply(g, c, psi, c.unknown);
  Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());

  if (g.rank() == 1) {
    const std::size_t n = g.size();
    const bool periodic = boundary_of(pb, 0) == BoundaryKind::periodic;
    const std::size_t first = periodic ? 0 : 1, count = periodic ? n : n - 2;
    std::vector<cplx> sub(count), diag(count), sup(count), x(count);
    for (std::size_t j = 0; j < count; ++j) {
      const auto i = static_cast<Eigen::Index>(first + j);
      diag[j] = c.p + half * c.diag[i];
      sub[j] = half * c.lower[0][i];
      sup[j] = half * c.upper[0][i];
      x[j] = rhs[i];
    }
    if (periodic) {
      cyclic_thomas(sub, diag, sup, x);
    } else {
      thomas(sub, diag, sup, x);
    }
    for (std::size_t j = 0; j < count; ++j) next[static_cast<Eigen::Index>(first + j)] = x[j];
  } else {
    std::vector<Eigen::Index> unk(g.size(), -1);
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (c.unknown[i]) {
        unk[i] = static_cast<Eigen::Index>(nodes.size());
        nodes.push_back(i);
      }
    }
    const auto m = static_cast<Eigen::Index>(nodes.size());
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(nodes.size() * (1 + 2 * g.rank()));
    Eigen::VectorXcd b(m), guess(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const std::size_t i = nodes[static_cast<std::size_t>(r)];
      const auto ii = static_cast<Eigen::Index>(i);
      trip.emplace_back(r, r, c.p + half * c.diag[ii]);
      for (std::size_t k = 0; k < g.rank(); ++k) {
        const Neighbours nb = neighbours(g, i, k);
        if (unk[nb.minus] >= 0) trip.emplace_back(r, unk[nb.minus], half * c.lower[k][ii]);
        if (unk[nb.plus] >= 0) trip.emplace_back(r, unk[nb.plus], half * c.upper[k][ii]);
      }
      b[r] = rhs[ii];
      guess[r] = psi[ii];
    }
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> a(m, m);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::BiCGSTAB<Eigen::SparseMatrix<cplx, Eigen::RowMajor>> solver;
    solver.setTolerance(solve_tolerance);
    solver.setMaxIterations(max_solve_iterations);
    solver.compute(a);
    const Eigen::VectorXcd x = solver.solveWithGuess(b, guess);
    if (solver.info() != Eigen::Success || !x.allFinite()) {
      std::ostringstream os;
      os << "iterative solve did not converge: " << solver.iterations() << " iterations, relative residual "
         << solver.error();
      throw SolverError(os.str());
    }
    for (Eigen::Index r = 0; r < m; ++r) next[static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(r)])] = x[r];
  }

  if (mode_ == StepMode::p_of_t && pb.p_form == PForm::amplitude) {
    const double p1 = pb.p->value(state.time), p2 = pb.p->value(state.time + dt);
    if (!(p2 > 0.0)) throw DomainError("p(t) crossed zero during the step");
    next *= p2 / p1;
  }
  return {ComplexField(g, next.array()), state.time + dt, state.step + 1};
}

SolverState step_cn(const EvolutionProblem& pb, const SolverState& s) { return Integrator(pb, StepMode::plain).step(s); }
SolverState step_p_of_t(const EvolutionProblem& pb, const SolverState& s) { return Integrator(pb, StepMode::p_of_t).step(s); }
SolverState step_gauged(const EvolutionProblem& pb, const SolverState& s) { return Integrator(pb, StepMode::gauged).step(s); }
SolverState step_dressed(const EvolutionProblem& pb, const SolverState& s) { return Integrator(pb, StepMode::dressed).step(s); }

std::vector<std::string> accuracy_warnings(const EvolutionProblem& pb, double t) {
  const StepMode mode = default_mode(pb);
  const Grid& g = pb.initial.grid();
  const double p = time_coefficient(pb, mode, t);
  double vmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = pb.potential ? pb.potential(t, g.point(i)) : 0.0;
    if (pb.em && pb.em->phi) v += pb.em->charge * pb.em->phi(t, g.point(i));
    if (pb.dressing) v = at_time(pb.dressing->v_tilde, t, i);
    vmax = std::max(vmax, std::abs(v));
  }
  double dx = g.axis(0).spacing();
  for (std::size_t k = 1; k < g.rank(); ++k) dx = std::min(dx, g.axis(k).spacing());
  std::vector<std::string> out;
  std::ostringstream os;
  if (pb.dt * vmax / p > 0.5) {
    os << "potential step: dt max|V| / hbar = " << pb.dt * vmax / p << " exceeds 0.5 at t = " << t;
    out.push_back(os.str());
    os.str("");
  }
  if (pb.dt > pb.mass * dx * dx / p) {
    os << "diffusive step: dt = " << pb.dt << " exceeds m dx^2 / hbar = " << pb.mass * dx * dx / p;
    out.push_back(os.str());
  }
  return out;
}

ComplexField stack_in_time(const std::vector<ComplexField>& slices, double t0, double dt) {
  if (slices.size() < 3) throw GridError("stack_in_time: need at least three slices");
  const Grid& s = slices.front().grid();
  const Grid g = with_time(time_axis(t0, t0 + dt * static_cast<double>(slices.size() - 1), slices.size()), s);
  ComplexField::Values v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t n = 0; n < slices.size(); ++n) {
    require_same_grid(s, slices[n].grid(), "stack_in_time");
    v.segment(static_cast<Eigen::Index>(n * s.size()), static_cast<Eigen::Index>(s.size())) = slices[n].values();
  }
  return {g, std::move(v)};
}

IndexBox support_box(const ComplexField& psi, double fraction) {
  const Grid& g = psi.grid();
  const double thr = fraction * psi.values().abs().maxCoeff();
  IndexBox box;
  for (std::size_t k = 0; k < g.rank(); ++k) {
    box.lo[k] = g.axis(k).count - 1;
    box.hi[k] = 0;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(psi[i]) <= thr) continue;
    for (std::size_t k = 0; k < g.rank(); ++k) {
      const std::size_t idx = g.index_along(i, k);
      box.lo[k] = std::min(box.lo[k], idx);
      box.hi[k] = std::max(box.hi[k], idx);
    }
  }
  return box;
}

namespace {

std::optional<ResidualSummary> snapshot_continuity(const EvolutionProblem& pb, StepMode mode,
                                                   const std::vector<ComplexField>& three, double t_first,
                                                   std::vector<std::string>& warnings) {
  const ComplexField stack = stack_in_time(three, t_first, pb.dt);
  const Grid& g = stack.grid();
  const IndexBox sb = support_box(three[1]);
  IndexBox box;
  box.lo[0] = 0;
  box.hi[0] = 2;
  for (std::size_t k = 0; k < three[1].grid().rank(); ++k) {
    box.lo[k + 1] = sb.lo[k];
    box.hi[k + 1] = sb.hi[k];
  }
  FromPsiOptions opt;
  opt.region = box;
  try {
    const MadelungPair pair = from_psi(stack, pb.hbar, pb.mass, opt);
    if (mode == StepMode::plain) return continuity_residual(pair).summary;
    const TimeDependentEm& em = *pb.em;
    EmPotentials pot{RealField::sample(g, [&](const Point& x) {
                       if (!em.phi) return 0.0;
                       Point s{};
                       std::copy(x.begin() + 1, x.end(), s.begin());
                       return em.phi(x[0], s);
                     }),
                     {},
                     em.charge,
                     em.light_speed};
    for (std::size_t k = 0; k < g.space_rank(); ++k) {
      pot.a.push_back(RealField::sample(g, [&](const Point& x) {
        if (k >= em.a.size() || !em.a[k]) return 0.0;
        Point s{};
        std::copy(x.begin() + 1, x.end(), s.begin());
        return em.a[k](x[0], s);
      }));
    }
    return em_continuity_residual(pair, pot).summary;
  } catch (const PhaseSingularity& e) {
    warnings.push_back(std::string("continuity skipped: ") + e.what());
    return std::nullopt;
  }
}

}  // namespace

EvolutionTrace evolve(const EvolutionProblem& pb, double horizon, std::size_t snapshot_every,
                      const EvolveOptions& options) {
  if (snapshot_every == 0) throw DomainError("evolve: snapshot_every must be at least 1");
  if (horizon < 0.0) throw DomainError("evolve: negative horizon");
  const double ratio = horizon / pb.dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw SolverError("evolve: horizon is not a whole multiple of dt");
  }
  const StepMode mode = default_mode(pb);
  const Integrator integ(pb, mode);
  const bool hermitian = mode == StepMode::plain || mode == StepMode::gauged;
  const bool want_energy = options.energy && hermitian;
  const bool want_continuity = options.continuity && hermitian;

  EvolutionTrace tr;
  tr.mode = mode;
  tr.steps = steps;
  std::set<std::string> seen;
  auto note = [&](double t) {
    for (const std::string& w : accuracy_warnings(pb, t)) {
      const std::string kind = w.substr(0, w.find(':'));
      if (seen.insert(kind).second) tr.warnings.push_back(w);
    }
  };
  auto is_snapshot = [&](std::size_t n) { return n % snapshot_every == 0 || n == steps; };

  SolverState cur = initial_state(pb);
  std::vector<ComplexField> window{cur.psi};  // last up to three states
  tr.times.push_back(cur.time);
  tr.snapshots.push_back(cur.psi);
  tr.continuity.push_back(std::nullopt);
  tr.norms.push_back(norm(cur.psi));
  if (want_energy) tr.energy.push_back(integ.energy(cur.psi, cur.time));

  auto close_pending = [&](std::size_t n_mid) {
    // window holds states n_mid - 1, n_mid, n_mid + 1
    const double t_first = pb.t0 + pb.dt * static_cast<double>(n_mid - 1);
    tr.continuity.back() = snapshot_continuity(pb, mode, window, t_first, tr.warnings);
  };

  for (std::size_t n = 1; n <= steps; ++n) {
    note(cur.time + 0.5 * pb.dt);
    cur = integ.step(cur);
    cur.time = pb.t0 + pb.dt * static_cast<double>(n);
    window.push_back(cur.psi);
    if (window.size() > 3) window.erase(window.begin());
    tr.norms.push_back(norm(cur.psi));
    if (want_energy) tr.energy.push_back(integ.energy(cur.psi, cur.time));
    if (want_continuity && n >= 2 && is_snapshot(n - 1) && n - 1 >= 1) close_pending(n - 1);
    if (is_snapshot(n)) {
      tr.times.push_back(cur.time);
      tr.snapshots.push_back(cur.psi);
      tr.continuity.push_back(std::nullopt);
    }
  }
  if (want_continuity && steps >= 1) {
    const SolverState extra = integ.step(cur);
    window.push_back(extra.psi);
    if (window.size() > 3) window.erase(window.begin());
    close_pending(steps);
  }
  return tr;
}

ComplexField schrodinger_residual(const ComplexField& psi, const RealField& v, double mass, double hbar,
                                  double cubic) {
  require_same_grid(psi.grid(), v.grid(), "schrodinger_residual");
  if (!psi.grid().has_time()) throw GridError("schrodinger_residual needs a space-time grid");
  const auto& p = psi.values();
  return {psi.grid(), cplx(0.0, hbar) * diff(psi, 0).values() + hbar * hbar / (2.0 * mass) * laplacian(psi).values() -
                          v.values().cast<cplx>() * p - cubic * p.abs2().cast<cplx>() * p};
}

}  // namespace mlab
