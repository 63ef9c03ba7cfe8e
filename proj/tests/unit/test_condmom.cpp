#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "kinplume/condmom.hpp"
#include "kinplume/giddings.hpp"
#include "kinplume/moments.hpp"
#include "kinplume/stehfest.hpp"

using namespace kinplume;
using namespace kinplume::condmom;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

template <class F>
double integrate_even(F&& f, double y_max) {
  return 2.0 * quad::integrate(f, 0.0, y_max, {1e-11, 1e-11, 2000, 8}).value;
}

std::vector<double> symmetric_grid(double half, int n) {
  std::vector<double> y;
  for (int k = -n; k <= n; ++k) y.push_back(half * k / n);
  return y;
}

}  // namespace

TEST_CASE("x-moments given y: mass balance per phase") {
  const KineticsParams kin{0.5, 1.0};
  const TransportParams tp{1.0, 0.2, 0.1};
  const double t = 3.0, y_max = 12.0 * std::sqrt(2 * tp.d_t * t);
  for (Phase p : {Phase::Free, Phase::Adsorbed}) {
    const double m0 = integrate_even([&](double y) { return x_moment_given_y(0, p, y, t, kin, tp); }, y_max);
    const auto atom = giddings::atoms(Initial::Equilibrium, p, t, kin).at_0;
    CHECK(std::abs(m0 + atom - occupancy(Initial::Equilibrium, p, t, kin)) <= 1e-6);
  }
}

TEST_CASE("x-moments given y: first-moment integral identity") {
  const KineticsParams kin{0.5, 1.0};
  const TransportParams tp{1.0, 0.2, 0.1};
  const double t = 3.0, y_max = 12.0 * std::sqrt(2 * tp.d_t * t);
  const double m1 = integrate_even([&](double y) { return x_moment_given_y(1, Phase::Free, y, t, kin, tp); }, y_max);
  const auto r = moments::residence_moments(kin, t, Initial::Equilibrium, Phase::Free);
  CHECK(rel(m1, tp.v * r.first) <= 1e-4);
  CHECK_THROWS_AS(x_moment_given_y(3, Phase::Free, 0.0, t, kin, tp), InvalidParameter);
}

TEST_CASE("adsorbed zeroth moment carries the never-released atom") {
  const KineticsParams kin{0.05, 0.05};
  const TransportParams tp{0.3, 0.3, 0.03};
  const auto y = symmetric_grid(6.0, 20);
  const auto c = x_moments_given_y(0, Phase::Adsorbed, y, 5.0, kin, tp);
  CHECK(c.atom_weight == doctest::Approx(0.5 * std::exp(-0.05 * 5.0)));
  CHECK(x_moments_given_y(0, Phase::Free, y, 5.0, kin, tp).atom_weight == 0.0);
  for (double v : c.values) CHECK(v >= 0.0);
  std::ostringstream os;
  write_curve_csv(os, c);
  CHECK(os.str().find("y,value,order,phase,atom_weight") != std::string::npos);
}

TEST_CASE("tailing: the mean x position is smallest on the centre line") {
  const KineticsParams kin{0.05, 0.05};
  const TransportParams tp{0.3, 0.3, 0.03};
  const auto y = symmetric_grid(3.0, 30);
  const auto c = x_moments_given_y(1, Phase::Free, y, 10.0, kin, tp, true);
  const std::size_t mid = 30;
  CHECK(y[mid] == 0.0);
  for (std::size_t k = mid + 1; k < y.size(); ++k) {
    CHECK(c.values[k] > c.values[k - 1]);
    CHECK(c.values[2 * mid - k] == doctest::Approx(c.values[k]).epsilon(1e-10));
  }
}

TEST_CASE("Laplace-space moments: closed-form identities") {
  const KineticsParams kin{0.7, 0.4};
  const TransportParams tp{1.0, 0.3, 0.1};
  const double s = 0.8;
  const double b = laplace_b(s, kin);
  const double q = std::sqrt(tp.v * tp.v + 4 * b * s * tp.d_l);
  CHECK(laplace_m0_free(0.0, s, kin, tp) == doctest::Approx(b * kin.pi_free() / q));
  CHECK(laplace_m0_adsorbed(1.3, s, kin, tp) ==
        doctest::Approx(kin.lambda * laplace_m0_free(1.3, s, kin, tp) / (s + kin.mu)));
  CHECK(laplace_m2_adsorbed(0.4, s, kin, tp) ==
        doctest::Approx(kin.lambda * laplace_m2_free(0.4, s, kin, tp) / (s + kin.mu)));
  CHECK(laplace_m0_free(0.5, 1e8, kin, tp) < 1e-100);
  // the homogeneous solution depends on x through x v and |x| only
  for (double x : {0.3, 2.0}) {
    const double e = std::exp(x * tp.v / tp.d_l);
    CHECK(laplace_m0_free(x, s, kin, tp) == doctest::Approx(e * laplace_m0_free(-x, s, kin, tp)));
    CHECK(laplace_m2_free(x, s, kin, tp) == doctest::Approx(e * laplace_m2_free(-x, s, kin, tp)));
  }
}

TEST_CASE("without adsorption the zeroth y-moment is the 1D Green's function") {
  const KineticsParams kin{0.0, 1.0};
  const TransportParams tp{1.0, 0.2, 0.1};
  const double t = 2.0;
  for (double x : {-0.5, 0.5, 2.0, 3.5}) {
    const double g = std::exp(-(x - tp.v * t) * (x - tp.v * t) / (4 * tp.d_l * t)) /
                     std::sqrt(4 * std::numbers::pi * tp.d_l * t);
    CHECK(rel(invert_m0_free(x, t, kin, tp), g) <= 1e-8);
    // every particle stays free for the whole time, so the transverse variance is 2 D_T t
    CHECK(rel(invert_m2_free(x, t, kin, tp) / invert_m0_free(x, t, kin, tp), 2 * tp.d_t * t) <= 1e-8);
  }
}

TEST_CASE("Stehfest term count: 10 and 14 terms agree on smooth transforms") {
  // power-law originals t^k
  const std::vector<std::function<double(double)>> smooth = {
      [](double s) { return 1.0 / s; },
      [](double s) { return 1.0 / (s * s); },
      [](double s) { return std::pow(s, -1.5); },
      [](double s) { return 1.0 / std::sqrt(s); },
  };
  for (const auto& f : smooth) {
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      const double a = laplace::stehfest_invert(f, t, 10), b = laplace::stehfest_invert(f, t, 14);
      CHECK(rel(a, b) < 1e-4);
    }
  }
  // decaying originals already miss it in double precision
  const auto decay = [](double s) { return 1.0 / (s + 1.0); };
  CHECK(rel(laplace::stehfest_invert(decay, 5.0, 10), laplace::stehfest_invert(decay, 5.0, 14)) > 1e-4);
  // The kinetic moment transforms are not smooth in this sense: the two term counts differ
  // by up to ~1e-2, which is why the inversion defaults to the extended-precision sum.
  const KineticsParams kin{1.0, 1.0};
  const TransportParams tp{1.0, 0.5, 0.1};
  const double w14 = invert_m0_free(1.0, 10.0, kin, tp, 14), w64 = invert_m0_free(1.0, 10.0, kin, tp);
  CHECK(rel(invert_m0_free(1.0, 10.0, kin, tp, 10), w14) > 1e-4);
  CHECK(rel(w14, w64) < 1e-3);
}

TEST_CASE("y-moments: Laplace route against direct quadrature") {
  const KineticsParams kin{0.2, 0.2};
  const TransportParams tp{1.0, 0.5, 0.1};
  const double t = 20.0;
  std::vector<double> xs;
  for (int k = 0; k <= 20; ++k) xs.push_back(-4.0 + 30.0 * k / 20.0);
  std::vector<DirectMoments> direct;
  double peak = 0.0;
  for (double x : xs) {
    direct.push_back(direct_y_moments_given_x(Phase::Free, x, t, kin, tp));
    peak = std::max(peak, direct.back().m0);
  }
  const auto ratio = transverse_variance_ratio(xs, t, kin, tp);
  // plume body: between the 5% and 95% quantiles of the x-marginal
  std::vector<double> cumulative{0.0};
  for (std::size_t k = 1; k < xs.size(); ++k) {
    cumulative.push_back(cumulative.back() + 0.5 * (direct[k].m0 + direct[k - 1].m0) * (xs[k] - xs[k - 1]));
  }
  double prev = -1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (direct[k].m0 < 1e-6 * peak) continue;
    CAPTURE(xs[k]);
    CHECK(rel(invert_m0_free(xs[k], t, kin, tp), direct[k].m0) <= 0.01);
    CHECK(rel(ratio.values[k], direct[k].m2 / direct[k].m0) <= 0.02);
    CHECK(ratio.values[k] >= 0.0);
    const double q = cumulative[k] / cumulative.back();
    if (q < 0.05 || q > 0.95) continue;
    CHECK(ratio.values[k] > prev);
    prev = ratio.values[k];
  }
}

TEST_CASE("y-moments of the adsorbed phase against direct quadrature") {
  const KineticsParams kin{1.0, 1.0};
  const TransportParams tp{1.0, 0.1, 0.1};
  const double t = 3.0;
  for (double x : {0.3, 1.0, 2.0}) {
    const auto d = direct_y_moments_given_x(Phase::Adsorbed, x, t, kin, tp);
    CHECK(rel(invert_y_moment(0, Phase::Adsorbed, x, t, kin, tp), d.m0) <= 1e-3);
    CHECK(rel(invert_y_moment(2, Phase::Adsorbed, x, t, kin, tp), d.m2) <= 1e-3);
  }
  CHECK_THROWS_AS(invert_y_moment(1, Phase::Free, 0.0, t, kin, tp), InvalidParameter);
}

TEST_CASE("the alternative-prefactor second-moment form disagrees with direct quadrature") {
  const KineticsParams kin{0.2, 0.2};
  const TransportParams tp{1.0, 0.5, 0.1};
  const double t = 20.0, x = 8.0;
  const auto d = direct_y_moments_given_x(Phase::Free, x, t, kin, tp);
  const double alt = laplace::stehfest_invert(
      [&](double s) { return laplace_m2_free_alt_prefactor(x, s, kin, tp); }, t, 14);
  CHECK(rel(alt, d.m2) > 0.5);
  CHECK(rel(invert_m2_free(x, t, kin, tp), d.m2) <= 0.01);
}

TEST_CASE("small longitudinal dispersion: variance ratio tends to 2 D_T x / v") {
  const KineticsParams kin{1.0, 1.0};
  const TransportParams tp{1.0, 1e-3, 0.1};
  const double t = 5.0;
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto ratio = transverse_variance_ratio(xs, t, kin, tp);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    CHECK(rel(ratio.values[k], 2 * tp.d_t * xs[k] / tp.v) <= 0.02);
  }
  CHECK(implied_peclet(tp) == doctest::Approx(5.0));
}

TEST_CASE("variance ratio below the mass floor") {
  const KineticsParams kin{1.0, 1.0};
  const TransportParams tp{1.0, 0.01, 0.1};
  const std::vector<double> far{200.0};
  CHECK_THROWS_AS(transverse_variance_ratio(far, 1.0, kin, tp), DomainError);
  const auto lenient = transverse_variance_ratio(far, 1.0, kin, tp, 64, false);
  CHECK(std::isnan(lenient.values[0]));
}
