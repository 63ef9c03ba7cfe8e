#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "kinplume/core.hpp"

namespace kinplume::lattice {

/// Birth-death lattice with spacing dx = c sqrt(dt). A free particle moves right with
/// probability beta, left with delta, stays with alpha; the phase switch is applied after
/// the move with probabilities lambda dt (free -> adsorbed) and mu dt (adsorbed -> free).
struct LatticeConfig {
  TransportParams transport;
  KineticsParams kinetics;
  double dt = 0.0;
  double c = 0.0;
  double dx = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  /// Cells run from -half_width to +half_width.
  long half_width = 0;

  void validate() const;
  double x(long cell) const { return static_cast<double>(cell) * dx; }
};

/// [c_min, c_max] keeping beta, delta, alpha inside [0, 1].
std::pair<double, double> admissible_c(const TransportParams& tp, double dt);
/// 2 sqrt(2 D + v^2 dt), capped at c_max.
double default_c(const TransportParams& tp, double dt);

/// Half-width (cells) reaching drift + 12 spreads at the horizon t, never more than the step
/// count since a particle moves at most one cell per step.
long auto_half_width(const TransportParams& tp, const KineticsParams& kin, double dt, double c,
                     double t);

/// half_width <= 0 selects auto_half_width for horizon t.
LatticeConfig make_config(const TransportParams& tp, const KineticsParams& kin, double dt, double t,
                          long half_width = 0, std::optional<double> c = std::nullopt);

struct LatticeState {
  std::vector<double> p_f;
  std::vector<double> p_a;
  long n = 0;
  long half_width = 0;

  double& free_at(long cell) { return p_f[static_cast<std::size_t>(cell + half_width)]; }
  double& adsorbed_at(long cell) { return p_a[static_cast<std::size_t>(cell + half_width)]; }
  double free_at(long cell) const { return p_f[static_cast<std::size_t>(cell + half_width)]; }
  double adsorbed_at(long cell) const { return p_a[static_cast<std::size_t>(cell + half_width)]; }
  double mass() const;
};

/// Unit pulse at cell 0 split into free_mass and adsorbed_mass. Throws DomainError when the
/// lattice cannot hold drift + 6 spreads after horizon_steps (unless it holds every
/// reachable cell).
LatticeState init_lattice(const LatticeConfig& cfg, double free_mass, double adsorbed_mass,
                          long horizon_steps);
LatticeState init_lattice(const LatticeConfig& cfg, Initial initial, long horizon_steps);

/// One exact master-equation step. Moves past the last cell are clipped; DomainError when
/// an edge cell holds more than 1e-12.
void step_lattice(LatticeState& state, const LatticeConfig& cfg);
void advance(LatticeState& state, const LatticeConfig& cfg, long steps);

struct PhaseMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

struct LatticeMoments {
  PhaseMoments free;
  PhaseMoments adsorbed;
  PhaseMoments total;
};

/// Moments of position i dx under p_f, p_a and p_f + p_a (each normalised by its own mass).
LatticeMoments lattice_moments(const LatticeState& state, const LatticeConfig& cfg);

/// CSV columns: cell, x, p_f, p_a.
void write_snapshot_csv(std::ostream& os, const LatticeState& state, const LatticeConfig& cfg);

}  // namespace kinplume::lattice
