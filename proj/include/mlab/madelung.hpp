#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mlab/field.hpp"

namespace mlab {

/// Inclusive box of node indices.
struct IndexBox {
  Index lo{};
  Index hi{};
  bool contains(const Index& idx, std::size_t rank) const;
  /// The same box with one layer removed on each side of every axis.
  IndexBox shrunk(std::size_t rank) const;
};

/// Density / action pair on a common grid.
///
/// rho >= 0 everywhere. When the action was recovered from a wave function by phase
/// continuation restricted to a box, `phase_region` records that box; outside it s is 0
/// and carries no information.
struct MadelungPair {
  RealField rho;
  RealField s;
  double mass = 1.0;
  double hbar = 1.0;
  std::optional<IndexBox> phase_region;
};

MadelungPair make_pair(RealField rho, RealField s, double mass = 1.0, double hbar = 1.0);

ComplexField to_psi(const MadelungPair& pair);

struct FromPsiOptions {
  double threshold = 1e-12;              ///< smallest |psi| accepted on the continuation path
  std::optional<std::size_t> anchor;     ///< default: node of largest |psi|
  std::optional<IndexBox> region;        ///< default: whole grid
};

/// rho = |psi|^2 and a continuous action S obtained by breadth-first branch
/// continuation of hbar * arg(psi) from the anchor node, where S = hbar * Arg(psi).
/// Throws PhaseSingularity naming the node when |psi| < threshold inside the region.
MadelungPair from_psi(const ComplexField& psi, double hbar, double mass = 1.0,
                      const FromPsiOptions& options = {});

/// Electromagnetic potentials sampled on the same space-time grid as the pair:
/// scalar potential phi and one vector-potential component per spatial axis.
struct EmPotentials {
  RealField phi;
  std::vector<RealField> a;
  double charge = 1.0;
  double light_speed = 1.0;
};

struct ResidualSummary {
  double linf = 0.0;
  double l2 = 0.0;          ///< sqrt(sum r^2 * cell volume) over evaluated nodes
  std::size_t masked = 0;   ///< interior nodes skipped because rho fell below the floor
  std::size_t evaluated = 0;
};

/// Residual samples plus the bookkeeping of which nodes entered the norms.
/// Only interior nodes (and, for phase-restricted pairs, nodes strictly inside the
/// phase region) are evaluated; masked nodes hold 0.
struct Residual {
  RealField values;
  std::vector<std::uint8_t> evaluated;
  ResidualSummary summary;
};

inline constexpr double rho_floor = 1e-12;

/// Gradients of the action with the minimal-coupling shifts applied:
/// dq[k] = dS/dq_k - (e/c) A_k and dt = dS/dt + e phi.
struct CoupledGradients {
  RealField dt;
  std::vector<RealField> dq;
};

CoupledGradients minimal_couple_s(const RealField& s, const EmPotentials& em);

/// d rho/dt + div(rho grad S / m). Needs a time axis.
Residual continuity_residual(const MadelungPair& pair);

/// dS/dt + |grad S|^2 / 2m + V - (hbar^2 / 2m) lap(sqrt rho) / sqrt rho.
Residual qhj_residual(const MadelungPair& pair, const RealField& v);

/// dS/dt + |grad S|^2 / 2m + V.
Residual classical_hj_residual(const RealField& s, const RealField& v, double mass = 1.0);

/// Continuity with the kinetic momentum grad S - (e/c) A.
Residual em_continuity_residual(const MadelungPair& pair, const EmPotentials& em);

/// Quantum Hamilton-Jacobi residual with dS/dt + e phi and grad S - (e/c) A.
Residual em_qhj_residual(const MadelungPair& pair, const EmPotentials& em, const RealField& v);

/// Summary over the given flags (nonzero = evaluated).
ResidualSummary summarize(const RealField& values, const std::vector<std::uint8_t>& evaluated,
                          std::size_t masked);

}  // namespace mlab
