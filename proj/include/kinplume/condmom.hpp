#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kinplume/core.hpp"
#include "kinplume/quadrature.hpp"
#include "kinplume/stehfest.hpp"

namespace kinplume::condmom {

/// Moment of one coordinate as a function of the other, for an equilibrium pulse.
struct MomentCurve {
  /// "y" for x-moments given y, "x" for y-moments given x.
  std::string coordinate;
  std::vector<double> coords;
  std::vector<double> values;
  int order = 0;
  Phase phase = Phase::Free;
  /// Divided by the order-0 curve.
  bool normalized = false;
  /// Weight of a delta component at coordinate 0 (adsorbed never-released mass, order 0).
  double atom_weight = 0.0;
};

using LaplaceFunction = std::function<double(double)>;

/// Integral over x of x^order N_phase(x, y, t): order 0, 1 or 2, by quadrature over tau of
/// (1, v tau, 2 D_L tau + v^2 tau^2) h_phase^eq(tau) times the transverse Gaussian.
/// The never-released atom is left out (it is reported as MomentCurve::atom_weight).
double x_moment_given_y(int order, Phase phase, double y, double t, const KineticsParams& kin,
                        const TransportParams& tp, const quad::Options& opt = {1e-12, 1e-10, 4000, 1});

MomentCurve x_moments_given_y(int order, Phase phase, std::span<const double> y, double t,
                              const KineticsParams& kin, const TransportParams& tp,
                              bool normalized = false, unsigned threads = 0);

// ---- Laplace-space y-moments given x (time transformed, s > 0) ----------------------------

/// b = (s + lambda + mu) / (s + mu).
template <class Real>
Real laplace_b(const Real& s, const KineticsParams& kin) {
  return (s + kin.lambda + kin.mu) / (s + kin.mu);
}

/// Zeroth y-moment of the free phase: b pi_f exp((x v - |x| q) / (2 D_L)) / q with
/// q = sqrt(v^2 + 4 b s D_L).
template <class Real>
Real laplace_m0_free(const Real& x, const Real& s, const KineticsParams& kin,
                     const TransportParams& tp) {
  using std::abs, std::exp, std::sqrt;
  const Real b = laplace_b(s, kin);
  const Real q = sqrt(Real(tp.v * tp.v) + 4 * b * s * tp.d_l);
  return b * Real(kin.mu) / Real(kin.lambda + kin.mu) * exp((x * tp.v - abs(x) * q) / (2 * tp.d_l)) / q;
}

/// Continuous part of the adsorbed zeroth moment, lambda M0_f / (s + mu). The delta(x)
/// part has transform pi_a / (s + mu).
template <class Real>
Real laplace_m0_adsorbed(const Real& x, const Real& s, const KineticsParams& kin,
                         const TransportParams& tp) {
  return kin.lambda * laplace_m0_free(x, s, kin, tp) / (s + kin.mu);
}

/// Second y-moment of the free phase: the self-convolution of the free-phase Green's
/// function driven by 2 D_T M0_f,
///   2 D_T b pi_f exp((x v - |x| q) / (2 D_L)) / q^2 * (|x| + 2 D_L / q).
template <class Real>
Real laplace_m2_free(const Real& x, const Real& s, const KineticsParams& kin,
                     const TransportParams& tp) {
  using std::abs, std::exp, std::sqrt;
  const Real b = laplace_b(s, kin);
  const Real q = sqrt(Real(tp.v * tp.v) + 4 * b * s * tp.d_l);
  const Real ax = abs(x);
  return 2 * tp.d_t * b * Real(kin.mu) / Real(kin.lambda + kin.mu) *
         exp((x * tp.v - ax * q) / (2 * tp.d_l)) / (q * q) * (ax + 2 * tp.d_l / q);
}

template <class Real>
Real laplace_m2_adsorbed(const Real& x, const Real& s, const KineticsParams& kin,
                         const TransportParams& tp) {
  return kin.lambda * laplace_m2_free(x, s, kin, tp) / (s + kin.mu);
}

/// Variant for x > 0 with prefactor mu^2 D_L / (lambda + mu) * mu / v in place of 2 D_T.
/// Disagrees with direct quadrature; kept for comparison only.
double laplace_m2_free_alt_prefactor(double x, double s, const KineticsParams& kin,
                               const TransportParams& tp);

/// Time-domain y-moments of the free phase at x by Stehfest inversion. n_terms <= 18 uses
/// double precision, larger counts the wide-precision sum.
double invert_m0_free(double x, double t, const KineticsParams& kin, const TransportParams& tp,
                      int n_terms = 64);
double invert_m2_free(double x, double t, const KineticsParams& kin, const TransportParams& tp,
                      int n_terms = 64);

/// Order 0 or 2 y-moment of either phase at x. The adsorbed delta(x) component is left out.
double invert_y_moment(int order, Phase phase, double x, double t, const KineticsParams& kin,
                       const TransportParams& tp, int n_terms = 64);

/// Floor on M0 below which the variance ratio is undefined.
inline constexpr double kRatioFloor = 1e-30;

/// M2_f(x) / M0_f(x) on the grid. With strict set, a point below kRatioFloor raises
/// DomainError; otherwise it is reported as NaN.
MomentCurve transverse_variance_ratio(std::span<const double> x, double t,
                                      const KineticsParams& kin, const TransportParams& tp,
                                      int n_terms = 64, bool strict = true, unsigned threads = 0);

/// Same moments from the residence-time quadrature of the 2D field integrated over y.
struct DirectMoments {
  double m0 = 0.0;
  double m2 = 0.0;
};
DirectMoments direct_y_moments_given_x(Phase phase, double x, double t, const KineticsParams& kin,
                                       const TransportParams& tp,
                                       const quad::Options& opt = {1e-14, 1e-11, 4000, 1});

/// Peclet number implied by the small-D_L limit of the ratio, 2 D_T x / v = x / Pe.
double implied_peclet(const TransportParams& tp);

/// CSV columns: coordinate, value, order, phase, atom_weight.
void write_curve_csv(std::ostream& os, const MomentCurve& curve);

}  // namespace kinplume::condmom
