#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kinplume/core.hpp"
#include "kinplume/moments.hpp"
#include "kinplume/quadrature.hpp"

namespace kinplume::giddings {

/// Point masses of the free-residence-time law.
struct Atoms {
  double at_0 = 0.0;  ///< never released (adsorbed throughout)
  double at_t = 0.0;  ///< never captured (free throughout)
};

/// Continuous part of the free-residence-time density at tau in [0, t] for particles
/// started from `initial` and found in `final_phase` at t (nullopt: either phase).
/// Zero outside [0, t].
double density(Initial initial, std::optional<Phase> final_phase, double tau, double t,
               const KineticsParams& kin);
Atoms atoms(Initial initial, std::optional<Phase> final_phase, double t, const KineticsParams& kin);

/// Tabulated density with explicit atoms.
struct ResidenceDensity {
  Initial initial = Initial::Free;
  std::optional<Phase> final_phase;
  double t = 0.0;
  std::vector<double> tau;
  std::vector<double> values;
  double atom_at_0 = 0.0;
  double atom_at_t = 0.0;
};

ResidenceDensity residence_density(Phase i, Phase j, double t, const KineticsParams& kin,
                                   std::span<const double> tau_grid);
/// pi_f h_fj + pi_a h_aj; final_phase = nullopt gives the total.
ResidenceDensity equilibrium_density(std::optional<Phase> final_phase, double t,
                                     const KineticsParams& kin, std::span<const double> tau_grid);

/// n cell centres of a uniform partition of (0, t).
std::vector<double> interior_grid(double t, std::size_t n);

/// Probability and raw moments of tau (continuous part integrated numerically, atoms added).
moments::ResidenceMoments numeric_moments(Initial initial, std::optional<Phase> final_phase,
                                          double t, const KineticsParams& kin,
                                          const quad::Options& opt = {1e-11, 1e-12, 4000, 1});

/// Cumulative distribution of the continuous part, tabulated on `cells` uniform cells with
/// Gauss-Legendre sums and evaluated by cubic Hermite interpolation.
class ContinuousCdf {
 public:
  ContinuousCdf(Initial initial, std::optional<Phase> final_phase, double t,
                const KineticsParams& kin, std::size_t cells = 2000);
  /// Integral of the continuous density over [0, tau].
  double integral(double tau) const;
  double mass() const { return cumulative_.back(); }
  /// integral(tau) / mass().
  double normalized(double tau) const { return integral(tau) / mass(); }

 private:
  Initial initial_;
  std::optional<Phase> final_;
  double t_;
  KineticsParams kin_;
  double h_;
  std::vector<double> cumulative_;
  std::vector<double> slope_;
};

/// 1D plume for pure advection in the free phase: N_j(x) = h_j(x / v, t) / v on [0, v t].
struct Profile1D {
  double t = 0.0;
  double v = 0.0;
  Initial initial = Initial::Equilibrium;
  std::vector<double> x;
  /// Scaled coordinate (x - v* t) / sqrt(2 D* t); empty when D* = 0.
  std::vector<double> x_hat;
  std::vector<double> n_f;
  std::vector<double> n_a;
  std::vector<double> n_tot;
  /// Normal density with mean v* t and variance 2 D* t; empty when D* = 0.
  std::vector<double> gaussian_ref;
  /// Adsorbed mass never released, sitting at x = 0.
  double atom_x0 = 0.0;
  /// Free mass never captured, sitting at x = v t.
  double atom_vt = 0.0;
};

Profile1D profile_1d(double t, const KineticsParams& kin, double v, std::span<const double> x_grid,
                     Initial initial = Initial::Equilibrium);
/// Cell-centred grid over [x_lo, x_hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// L1 distance between the total profile (atoms included) and the normal density with
/// mean v* t and variance 2 D* t.
double gaussian_l1_distance(double t, const KineticsParams& kin, double v,
                            Initial initial = Initial::Equilibrium);

void write_profile_csv(std::ostream& os, const Profile1D& p);

enum class Regime { Wave, Telegraph, Diffusion };
std::string_view to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::Wave;
  /// Survival probabilities e^{-lambda t} (free pulse) and e^{-mu t} (adsorbed pulse).
  double free_survival = 1.0;
  double adsorbed_survival = 1.0;
  /// Pulse weights of an equilibrium injection: pi_f e^{-lambda t}, pi_a e^{-mu t}.
  double free_pulse = 0.0;
  double adsorbed_pulse = 0.0;
};

/// Diffusion when t > 3/lambda and t > 3/mu; wave when both survival probabilities
/// exceed 0.5; telegraph otherwise.
RegimeReport regime_check(double t, const KineticsParams& kin);

}  // namespace kinplume::giddings
