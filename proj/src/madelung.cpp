#include "mlab/madelung.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "mlab/diff.hpp"

namespace mlab {

bool IndexBox::contains(const Index& idx, std::size_t rank) const {
  for (std::size_t k = 0; k < rank; ++k) {
    if (idx[k] < lo[k] || idx[k] > hi[k]) return false;
  }
  return true;
}

IndexBox IndexBox::shrunk(std::size_t rank) const {
  IndexBox b = *this;
  for (std::size_t k = 0; k < rank; ++k) {
    b.lo[k] += 1;
    b.hi[k] = b.hi[k] > 0 ? b.hi[k] - 1 : 0;
  }
  return b;
}

MadelungPair make_pair(RealField rho, RealField s, double mass, double hbar) {
  require_same_grid(rho.grid(), s.grid(), "make_pair");
  if ((rho.values() < 0.0).any()) throw DomainError("make_pair: negative density");
  if (!(mass > 0.0) || !(hbar > 0.0)) throw DomainError("make_pair: mass and hbar must be positive");
  return MadelungPair{std::move(rho), std::move(s), mass, hbar, std::nullopt};
}

ComplexField to_psi(const MadelungPair& pair) {
  const auto& r = pair.rho.values();
  const auto& s = pair.s.values();
  ComplexField::Values v(r.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::polar(std::sqrt(r[i]), s[i] / pair.hbar);
  return {pair.rho.grid(), std::move(v)};
}

namespace {

std::string describe_node(const Grid& g, std::size_t node) {
  std::ostringstream os;
  os << "node " << node << " (";
  const Point p = g.point(node);
  for (std::size_t k = 0; k < g.rank(); ++k) os << (k ? ", " : "") << p[k];
  os << ")";
  return os.str();
}

double wrap_pi(double x) {
  x = std::remainder(x, 2.0 * std::numbers::pi);
  return x;
}

}  // namespace

MadelungPair from_psi(const ComplexField& psi, double hbar, double mass, const FromPsiOptions& options) {
  const Grid& g = psi.grid();
  IndexBox region;
  for (std::size_t k = 0; k < g.rank(); ++k) region.hi[k] = g.axis(k).count - 1;
  if (options.region) region = *options.region;
  auto in_region = [&](std::size_t l) { return region.contains(g.unravel(l), g.rank()); };

  std::size_t anchor = 0;
  if (options.anchor) {
    anchor = *options.anchor;
    if (anchor >= g.size() || !in_region(anchor)) throw GridError("from_psi: anchor outside region");
  } else {
    double best = -1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (in_region(i) && std::abs(psi[i]) > best) {
        best = std::abs(psi[i]);
        anchor = i;
      }
    }
  }

  Eigen::ArrayXd s = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(g.size()));
  std::vector<std::uint8_t> seen(g.size(), 0);
  auto check = [&](std::size_t l) {
    if (std::abs(psi[l]) < options.threshold) {
      throw PhaseSingularity("phase singularity at " + describe_node(g, l), l);
    }
  };
  check(anchor);
  double phase_anchor = std::arg(psi[anchor]);
  s[static_cast<Eigen::Index>(anchor)] = phase_anchor;
  seen[anchor] = 1;
  std::deque<std::size_t> queue{anchor};
  while (!queue.empty()) {
    const std::size_t l = queue.front();
    queue.pop_front();
    const double base = s[static_cast<Eigen::Index>(l)];
    for (std::size_t k = 0; k < g.rank(); ++k) {
      const std::size_t j = g.index_along(l, k);
      for (int dir : {-1, 1}) {
        if ((dir < 0 && j == 0) || (dir > 0 && j + 1 == g.axis(k).count)) continue;
        const std::size_t nb = dir < 0 ? l - g.stride(k) : l + g.stride(k);
        if (seen[nb] || !in_region(nb)) continue;
        check(nb);
        seen[nb] = 1;
        s[static_cast<Eigen::Index>(nb)] = base + wrap_pi(std::arg(psi[nb]) - base);
        queue.push_back(nb);
      }
    }
  }
  MadelungPair pair = make_pair(abs2(psi), RealField(g, s * hbar), mass, hbar);
  if (options.region) pair.phase_region = region;
  return pair;
}

CoupledGradients minimal_couple_s(const RealField& s, const EmPotentials& em) {
  const Grid& g = s.grid();
  if (!g.has_time()) throw GridError("minimal_couple_s: needs a time axis");
  require_same_grid(g, em.phi.grid(), "minimal_couple_s");
  if (em.a.size() != g.space_rank()) {
    throw GridError("minimal_couple_s: need one vector-potential component per spatial axis");
  }
  const double ec = em.charge / em.light_speed;
  CoupledGradients out{diff(s, 0) + em.charge * em.phi, {}};
  for (std::size_t k = 0; k < g.space_rank(); ++k) {
    require_same_grid(g, em.a[k].grid(), "minimal_couple_s");
    out.dq.push_back(diff(s, g.space_begin() + k) - ec * em.a[k]);
  }
  return out;
}

ResidualSummary summarize(const RealField& values, const std::vector<std::uint8_t>& evaluated,
                          std::size_t masked) {
  ResidualSummary sum;
  sum.masked = masked;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!evaluated[i]) continue;
    ++sum.evaluated;
    sum.linf = std::max(sum.linf, std::abs(values[i]));
    acc += values[i] * values[i];
  }
  sum.l2 = std::sqrt(acc * values.grid().cell_volume());
  return sum;
}

namespace {

CoupledGradients plain_gradients(const RealField& s) {
  const Grid& g = s.grid();
  if (!g.has_time()) throw GridError("residual evaluation needs a time axis");
  CoupledGradients out{diff(s, 0), {}};
  for (std::size_t k = g.space_begin(); k < g.rank(); ++k) out.dq.push_back(diff(s, k));
  return out;
}

std::vector<std::uint8_t> evaluation_mask(const MadelungPair* pair, const Grid& g) {
  std::optional<IndexBox> box;
  if (pair && pair->phase_region) box = pair->phase_region->shrunk(g.rank());
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    mask[i] = g.interior(i) && (!box || box->contains(g.unravel(i), g.rank()));
  }
  return mask;
}

Residual finish(RealField values, std::vector<std::uint8_t> mask, std::size_t masked) {
  ResidualSummary sum = summarize(values, mask, masked);
  return Residual{std::move(values), std::move(mask), sum};
}

Residual continuity_from(const MadelungPair& pair, const CoupledGradients& grad) {
  const Grid& g = pair.rho.grid();
  RealField r = diff(pair.rho, 0);
  for (std::size_t k = 0; k < grad.dq.size(); ++k) {
    const RealField flux(g, pair.rho.values() * grad.dq[k].values() / pair.mass);
    r = r + diff(flux, g.space_begin() + k);
  }
  return finish(std::move(r), evaluation_mask(&pair, g), 0);
}

Residual qhj_from(const MadelungPair& pair, const CoupledGradients& grad, const RealField& v) {
  const Grid& g = pair.rho.grid();
  require_same_grid(g, v.grid(), "qhj_residual");
  const RealField amp(g, pair.rho.values().sqrt());
  const RealField lap = laplacian(amp);
  Eigen::ArrayXd kinetic = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(g.size()));
  for (const RealField& d : grad.dq) kinetic += d.values().square();
  const double qcoef = pair.hbar * pair.hbar / (2.0 * pair.mass);
  std::vector<std::uint8_t> mask = evaluation_mask(&pair, g);
  Eigen::ArrayXd r(static_cast<Eigen::Index>(g.size()));
  std::size_t masked = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    if (pair.rho[n] < rho_floor) {
      r[i] = 0.0;
      if (mask[n]) ++masked;
      mask[n] = 0;
      continue;
    }
    r[i] = grad.dt[n] + kinetic[i] / (2.0 * pair.mass) + v[n] - qcoef * lap[n] / amp[n];
  }
  return finish(RealField(g, std::move(r)), std::move(mask), masked);
}

}  // namespace

Residual continuity_residual(const MadelungPair& pair) {
  return continuity_from(pair, plain_gradients(pair.s));
}

Residual em_continuity_residual(const MadelungPair& pair, const EmPotentials& em) {
  return continuity_from(pair, minimal_couple_s(pair.s, em));
}

Residual qhj_residual(const MadelungPair& pair, const RealField& v) {
  return qhj_from(pair, plain_gradients(pair.s), v);
}

Residual em_qhj_residual(const MadelungPair& pair, const EmPotentials& em, const RealField& v) {
  return qhj_from(pair, minimal_couple_s(pair.s, em), v);
}

Residual classical_hj_residual(const RealField& s, const RealField& v, double mass) {
  const Grid& g = s.grid();
  require_same_grid(g, v.grid(), "classical_hj_residual");
  const CoupledGradients grad = plain_gradients(s);
  Eigen::ArrayXd r = grad.dt.values() + v.values();
  for (const RealField& d : grad.dq) r += d.values().square() / (2.0 * mass);
  return finish(RealField(g, std::move(r)), evaluation_mask(nullptr, g), 0);
}

}  // namespace mlab
