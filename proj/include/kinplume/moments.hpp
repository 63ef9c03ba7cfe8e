#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>

#include "kinplume/core.hpp"

namespace kinplume::moments {

enum class Conditioning { None, FreeAtT, AdsorbedAtT };

std::string_view to_string(Conditioning c);
Conditioning parse_conditioning(std::string_view s);

struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> third_central;
  double t = 0.0;
  Conditioning conditioning = Conditioning::None;
  Initial initial = Initial::Equilibrium;
  /// Probability of the conditioning event (1 for Conditioning::None).
  double probability = 1.0;
};

// ---- discrete time: K_n = number of free intervals among n steps -------------------------

/// E[K_n] = a n / (a + b) for a chain started in its stationary law.
double mean_kn(double a, double b, long n);
/// E[K_n] when the chain starts in a fixed phase.
double mean_kn_from(double a, double b, long n, Phase start);
/// Var K_n for the stationary start.
double var_kn(double a, double b, long n);

/// Mean and variance of the discrete-scheme position after dk.n steps (stationary start),
/// from the random-sum identities with Y = X + v dt, Var X = 2 D dt.
MomentSet discrete_moments_s(const DiscreteKinetics& dk, const TransportParams& tp);

/// Third central moment of a random sum of K i.i.d. copies of Y.
double third_central_moment_random_sum(double mean_k, double var_k, double third_k, double mean_y,
                                       double var_y, double third_y);

// ---- continuous time ---------------------------------------------------------------------

/// Non-centralized moments of the free residence time restricted to an event:
/// probability = P(A), first = E[tau 1_A], second = E[tau^2 1_A].
struct ResidenceMoments {
  double probability = 0.0;
  double first = 0.0;
  double second = 0.0;

  ResidenceMoments& operator+=(const ResidenceMoments& o);
  ResidenceMoments scaled(double c) const { return {c * probability, c * first, c * second}; }
};

/// Moments of tau given the initial law, optionally restricted to the phase at time t.
ResidenceMoments residence_moments(const KineticsParams& kin, double t, Initial initial,
                                   std::optional<Phase> final_phase = std::nullopt);

/// Mean and variance of the particle position S(t), optionally conditioned on its phase at t.
/// Conditioned sets need lambda > 0 and mu > 0.
MomentSet moments_s(const KineticsParams& kin, const TransportParams& tp, double t,
                    Conditioning conditioning, Initial initial);

/// Normalized central second moment for a particle free at 0 and free at t, written with
/// k = mu and beta = lambda / mu, with the sign of the (A + 1) term corrected. Requires mu > 0.
double sigma_ff_sq(const KineticsParams& kin, const TransportParams& tp, double t);

/// CSV columns: t, mean, variance, conditioning, initial.
void write_moment_curve_csv(std::ostream& os, std::span<const MomentSet> curve);

}  // namespace kinplume::moments
