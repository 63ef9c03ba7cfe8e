#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "kinplume/errors.hpp"

namespace kinplume {

enum class Phase { Free, Adsorbed };

/// Initial phase law of a particle or of an injected pulse.
enum class Initial { Free, Adsorbed, Equilibrium };

std::string_view to_string(Phase p);
std::string_view to_string(Initial i);
Phase parse_phase(std::string_view s);
Initial parse_initial(std::string_view s);

constexpr Phase other(Phase p) { return p == Phase::Free ? Phase::Adsorbed : Phase::Free; }

/// Advection velocity and dispersion coefficients. d_t is ignored by 1D code paths.
struct TransportParams {
  double v = 0.0;
  double d_l = 0.0;
  double d_t = 0.0;

  void validate() const;
};

/// Sorption rates: lambda is free -> adsorbed, mu is adsorbed -> free.
struct KineticsParams {
  double lambda = 0.0;
  double mu = 0.0;

  void validate() const;
  double total_rate() const { return lambda + mu; }
  /// Stationary fraction of time spent free, mu / (lambda + mu).
  double pi_free() const { return mu / (lambda + mu); }
  double pi_adsorbed() const { return lambda / (lambda + mu); }
  /// Rate swapped copy; maps the adsorbed-time process onto a free-time process.
  KineticsParams swapped() const { return {mu, lambda}; }
};

struct DerivedQuantities {
  double pi_f = 0.0;
  double pi_a = 0.0;
  double v_star = 0.0;
  double d_star = 0.0;
  double v_e = 0.0;
  double d_e = 0.0;
  /// Empty when mu = 0 (particles never return to the liquid).
  std::optional<double> retardation;

  /// Throws DegenerateKinetics when the retardation factor is undefined.
  double require_retardation() const;
};

DerivedQuantities derive(const KineticsParams& kin, const TransportParams& tp);

/// Two-state chain observed on steps of length dt: a = mu dt (a -> f), b = lambda dt (f -> a).
struct DiscreteKinetics {
  double a = 0.0;
  double b = 0.0;
  double dt = 0.0;
  long n = 1;

  void validate() const;
  /// Builds a = mu dt, b = lambda dt with dt = t / n.
  static DiscreteKinetics from_rates(const KineticsParams& kin, double t, long n);
};

/// (x - v* t) / sqrt(2 D* t) and y / sqrt(2 D_T t).
std::pair<double, double> scaled_coords(double x, double y, double t, const DerivedQuantities& dq,
                                        double d_t);
double scaled_x(double x, double t, const DerivedQuantities& dq);
double scaled_y(double y, double t, double d_t);

/// Two-state chain transition probability P(phase j at t | phase i at 0).
double transition_probability(Phase from, Phase to, double t, const KineticsParams& kin);
/// Probability of being in `to` at t for the given initial law.
double occupancy(Initial from, Phase to, double t, const KineticsParams& kin);

}  // namespace kinplume
