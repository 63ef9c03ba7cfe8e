#include "kinplume/condmom.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kinplume/giddings.hpp"
#include "kinplume/parallel.hpp"
#include "kinplume/planar.hpp"

namespace kinplume::condmom {

namespace {

double normal_pdf(double z, double var) {
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

void check_inputs(double t, const KineticsParams& kin, const TransportParams& tp) {
  kin.validate();
  tp.validate();
  if (!(t > 0.0)) throw InvalidParameter("conditional moments need t > 0");
}

// Integral over [0, t] split at `cuts`; the first piece uses tau = c u^2 so that a
// 1/sqrt(tau) factor at the origin stays bounded.
template <class F>
double integrate_pieces(F&& f, std::vector<double> cuts, double t, const quad::Options& opt) {
  cuts.push_back(0.0);
  cuts.push_back(t);
  std::erase_if(cuts, [&](double c) { return c < 0.0 || c > t; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  quad::Options piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(cuts.size() - 1);
  const double c1 = cuts[1];
  double value = quad::integrate([&](double u) { return f(c1 * u * u) * 2.0 * c1 * u; }, 0.0, 1.0,
                                 piece)
                     .value;
  for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
    value += quad::integrate(f, cuts[k], cuts[k + 1], piece).value;
  }
  return value;
}

double x_weight(int order, double tau, const TransportParams& tp) {
  switch (order) {
    case 0:
      return 1.0;
    case 1:
      return tp.v * tau;
    case 2:
      return 2.0 * tp.d_l * tau + tp.v * tp.v * tau * tau;
  }
  throw InvalidParameter("x-moment order must be 0, 1 or 2");
}

}  // namespace

double x_moment_given_y(int order, Phase phase, double y, double t, const KineticsParams& kin,
                        const TransportParams& tp, const quad::Options& opt) {
  check_inputs(t, kin, tp);
  if (!(tp.d_t > 0.0)) throw InvalidParameter("x-moments given y need d_t > 0");
  x_weight(order, 0.0, tp);
  const auto f = [&](double tau) {
    if (!(tau > 0.0)) return 0.0;
    return x_weight(order, tau, tp) *
           giddings::density(Initial::Equilibrium, phase, tau, t, kin) *
           normal_pdf(y, 2.0 * tp.d_t * tau);
  };
  const double peak = y * y / (2.0 * tp.d_t);
  std::vector<double> cuts;
  if (peak > 0.0) cuts = {0.25 * peak, peak, 4.0 * peak};
  double value = integrate_pieces(f, cuts, t, opt);
  const double never_captured = giddings::atoms(Initial::Equilibrium, phase, t, kin).at_t;
  if (never_captured > 0.0) {
    value += never_captured * x_weight(order, t, tp) * normal_pdf(y, 2.0 * tp.d_t * t);
  }
  return value;
}

MomentCurve x_moments_given_y(int order, Phase phase, std::span<const double> y, double t,
                              const KineticsParams& kin, const TransportParams& tp,
                              bool normalized, unsigned threads) {
  MomentCurve c;
  c.coordinate = "y";
  c.coords.assign(y.begin(), y.end());
  c.order = order;
  c.phase = phase;
  c.normalized = normalized;
  c.values.assign(y.size(), 0.0);
  parallel_for(y.size(), threads, [&](std::size_t k) {
    double v = x_moment_given_y(order, phase, y[k], t, kin, tp);
    if (normalized) v /= x_moment_given_y(0, phase, y[k], t, kin, tp);
    c.values[k] = v;
  });
  if (order == 0 && !normalized) {
    c.atom_weight = giddings::atoms(Initial::Equilibrium, phase, t, kin).at_0;
  }
  return c;
}

double laplace_m2_free_alt_prefactor(double x, double s, const KineticsParams& kin,
                               const TransportParams& tp) {
  const double b = laplace_b(s, kin);
  const double q = std::sqrt(tp.v * tp.v + 4.0 * b * s * tp.d_l);
  const double l = kin.lambda, m = kin.mu;
  return b * kin.pi_free() * m * m * tp.d_l / (l + m) *
         std::exp((x * tp.v - x * q) / (2.0 * tp.d_l)) / (q * q) * m / tp.v *
         (x + 2.0 * tp.d_l / q);
}

namespace {

template <class Transform>
double invert(Transform&& transform, double x, double t, int n_terms) {
  if (n_terms <= 18) {
    return laplace::stehfest_invert([&](double s) { return transform(x, s); }, t, n_terms);
  }
  const laplace::WideReal wx(x);
  return static_cast<double>(laplace::stehfest_invert_wide(
      [&](const laplace::WideReal& s) { return transform(wx, s); }, t, n_terms));
}

}  // namespace

double invert_m0_free(double x, double t, const KineticsParams& kin, const TransportParams& tp,
                      int n_terms) {
  check_inputs(t, kin, tp);
  if (!(tp.d_l > 0.0)) throw InvalidParameter("Laplace-space moments need d_l > 0");
  return invert([&](const auto& xx, const auto& s) { return laplace_m0_free(xx, s, kin, tp); }, x,
                t, n_terms);
}

double invert_m2_free(double x, double t, const KineticsParams& kin, const TransportParams& tp,
                      int n_terms) {
  check_inputs(t, kin, tp);
  if (!(tp.d_l > 0.0)) throw InvalidParameter("Laplace-space moments need d_l > 0");
  return invert([&](const auto& xx, const auto& s) { return laplace_m2_free(xx, s, kin, tp); }, x,
                t, n_terms);
}

double invert_y_moment(int order, Phase phase, double x, double t, const KineticsParams& kin,
                       const TransportParams& tp, int n_terms) {
  if (order != 0 && order != 2) throw InvalidParameter("y-moment order must be 0 or 2");
  if (phase == Phase::Free) {
    return order == 0 ? invert_m0_free(x, t, kin, tp, n_terms) : invert_m2_free(x, t, kin, tp, n_terms);
  }
  check_inputs(t, kin, tp);
  if (!(tp.d_l > 0.0)) throw InvalidParameter("Laplace-space moments need d_l > 0");
  if (order == 0) {
    return invert(
        [&](const auto& xx, const auto& s) { return laplace_m0_adsorbed(xx, s, kin, tp); }, x, t,
        n_terms);
  }
  return invert([&](const auto& xx, const auto& s) { return laplace_m2_adsorbed(xx, s, kin, tp); },
                x, t, n_terms);
}

MomentCurve transverse_variance_ratio(std::span<const double> x, double t,
                                      const KineticsParams& kin, const TransportParams& tp,
                                      int n_terms, bool strict, unsigned threads) {
  MomentCurve c;
  c.coordinate = "x";
  c.coords.assign(x.begin(), x.end());
  c.order = 2;
  c.phase = Phase::Free;
  c.normalized = true;
  c.values.assign(x.size(), 0.0);
  parallel_for(x.size(), threads, [&](std::size_t k) {
    const double m0 = invert_m0_free(x[k], t, kin, tp, n_terms);
    if (!(m0 > kRatioFloor)) {
      if (strict) {
        std::ostringstream os;
        os << "transverse variance ratio undefined at x = " << x[k] << " (M0 = " << m0 << ")";
        throw DomainError(os.str());
      }
      c.values[k] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    c.values[k] = invert_m2_free(x[k], t, kin, tp, n_terms) / m0;
  });
  return c;
}

DirectMoments direct_y_moments_given_x(Phase phase, double x, double t, const KineticsParams& kin,
                                       const TransportParams& tp, const quad::Options& opt) {
  check_inputs(t, kin, tp);
  if (!(tp.d_l > 0.0)) throw InvalidParameter("y-moments given x need d_l > 0");
  const auto kernel = [&](double tau) { return normal_pdf(x - tp.v * tau, 2.0 * tp.d_l * tau); };
  const auto f0 = [&](double tau) {
    if (!(tau > 0.0)) return 0.0;
    return giddings::density(Initial::Equilibrium, phase, tau, t, kin) * kernel(tau);
  };
  const auto f2 = [&](double tau) { return 2.0 * tp.d_t * tau * f0(tau); };
  const auto cuts = planar::residence_breakpoints(x, t, tp);
  DirectMoments m;
  m.m0 = integrate_pieces(f0, cuts, t, opt);
  m.m2 = integrate_pieces(f2, cuts, t, opt);
  const double never_captured = giddings::atoms(Initial::Equilibrium, phase, t, kin).at_t;
  if (never_captured > 0.0) {
    m.m0 += never_captured * kernel(t);
    m.m2 += never_captured * 2.0 * tp.d_t * t * kernel(t);
  }
  return m;
}

double implied_peclet(const TransportParams& tp) {
  if (!(tp.d_t > 0.0)) throw InvalidParameter("Peclet number needs d_t > 0");
  return tp.v / (2.0 * tp.d_t);
}

void write_curve_csv(std::ostream& os, const MomentCurve& curve) {
  const auto old = os.precision(17);
  os << "# atom at " << curve.coordinate << "=0 weight=" << curve.atom_weight << '\n';
  os << curve.coordinate << ",value,order,phase,atom_weight\n";
  for (std::size_t k = 0; k < curve.coords.size(); ++k) {
    os << curve.coords[k] << ',' << curve.values[k] << ',' << curve.order << ','
       << to_string(curve.phase) << ',' << curve.atom_weight << '\n';
  }
  os.precision(old);
}

}  // namespace kinplume::condmom
