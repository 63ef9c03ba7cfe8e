#include <cmath>
#include <sstream>

#include <doctest.h>

#include "kinplume/moments.hpp"
#include "oracles.hpp"

using namespace kinplume;
using namespace kinplume::moments;

namespace {

oracle::Central kn_law(double a, double b, int n) {
  const auto p = oracle::kn_distribution(a, b, n);
  std::vector<double> k(p.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i);
  return oracle::central(k, p);
}

}  // namespace

TEST_CASE("mean of the free-interval count") {
  CHECK(mean_kn(0.2, 0.2, 10) == doctest::Approx(5.0));
  CHECK(mean_kn(1.0, 0.0, 7) == doctest::Approx(7.0));
  CHECK(mean_kn(0.3, 0.1, 3) == doctest::Approx(2.25));
  CHECK(mean_kn(0.3, 0.1, 3) == doctest::Approx(kn_law(0.3, 0.1, 3).mean).epsilon(1e-14));
  CHECK_THROWS_AS(mean_kn(0.0, 0.0, 3), InvalidParameter);
}

TEST_CASE("mean count from a fixed start, by enumeration of the first step") {
  // starting free, the count is 1 + the count of the remaining n - 1 steps from phase 1
  const double a = 0.3, b = 0.2;
  CHECK(mean_kn_from(a, b, 1, Phase::Free) == doctest::Approx(1.0));
  CHECK(mean_kn_from(a, b, 1, Phase::Adsorbed) == doctest::Approx(0.0));
  CHECK(mean_kn_from(a, b, 2, Phase::Free) == doctest::Approx(2.0 - b));
  CHECK(mean_kn_from(a, b, 2, Phase::Adsorbed) == doctest::Approx(a));
  const double pf = a / (a + b);
  CHECK(pf * mean_kn_from(a, b, 9, Phase::Free) + (1 - pf) * mean_kn_from(a, b, 9, Phase::Adsorbed) ==
        doctest::Approx(mean_kn(a, b, 9)));
}

TEST_CASE("variance of the free-interval count") {
  CHECK(var_kn(0.3, 0.7, 12) == doctest::Approx(0.3 * 0.7 * 12));
  CHECK(var_kn(0.0, 0.4, 12) == doctest::Approx(0.0));
  CHECK(var_kn(0.4, 0.0, 12) == doctest::Approx(0.0));
  CHECK(var_kn(0.3, 0.1, 3) == doctest::Approx(kn_law(0.3, 0.1, 3).variance).epsilon(1e-13));
  for (int n : {1, 2, 5, 11}) {
    for (double a : {0.05, 0.3, 0.9}) {
      for (double b : {0.1, 0.5, 1.0}) {
        const double v = var_kn(a, b, n);
        CHECK(v == doctest::Approx(kn_law(a, b, n).variance).epsilon(1e-12));
        CHECK(v >= -1e-14);
        CHECK(v <= n * n / 4.0);
      }
    }
  }
}

TEST_CASE("third central moment of a random sum") {
  CHECK(third_central_moment_random_sum(3.0, 1.2, 0.4, 0.0, 2.0, 0.0) == 0.0);
  CHECK(third_central_moment_random_sum(4.0, 0.0, 0.0, 1.5, 0.3, 0.7) == doctest::Approx(4.0 * 0.7));

  const double a = 0.3, b = 0.2, step = 0.25;
  const int n = 4;
  const auto k = kn_law(a, b, n);
  // S = K * step exactly when Y is constant
  const auto pk = oracle::kn_distribution(a, b, n);
  std::vector<double> s(pk.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = step * static_cast<double>(i);
  const auto direct = oracle::central(s, pk);
  CHECK(third_central_moment_random_sum(k.mean, k.variance, k.third, step, 0.0, 0.0) ==
        doctest::Approx(direct.third).epsilon(1e-12));
}

TEST_CASE("third central moment with a two-point increment, by full enumeration") {
  const double a = 0.3, b = 0.2;
  const int n = 4;
  const double y0 = 0.0, y1 = 1.0, p1 = 0.7;
  // enumerate phase paths and the increment value of each free interval
  const double start_free = a / (a + b);
  std::vector<double> values, probs;
  for (unsigned path = 0; path < (1u << n); ++path) {
    double p = 1.0;
    int k = 0;
    bool prev = false;
    for (int step = 0; step < n; ++step) {
      const bool free = (path >> step) & 1u;
      p *= step == 0 ? (free ? start_free : 1 - start_free) : prev ? (free ? 1 - b : b) : (free ? a : 1 - a);
      k += free;
      prev = free;
    }
    for (unsigned draw = 0; draw < (1u << k); ++draw) {
      double q = p, sum = 0.0;
      for (int j = 0; j < k; ++j) {
        const bool hi = (draw >> j) & 1u;
        q *= hi ? p1 : 1 - p1;
        sum += hi ? y1 : y0;
      }
      values.push_back(sum);
      probs.push_back(q);
    }
  }
  const auto direct = oracle::central(values, probs);
  const auto kl = kn_law(a, b, n);
  const double my = p1 * y1, vy = p1 * (1 - p1), ty = p1 * (1 - p1) * (1 - 2 * p1);
  CHECK(third_central_moment_random_sum(kl.mean, kl.variance, kl.third, my, vy, ty) ==
        doctest::Approx(direct.third).epsilon(1e-12));
  CHECK(kl.mean * vy + my * my * kl.variance == doctest::Approx(direct.variance).epsilon(1e-12));
}

TEST_CASE("unconditional moments: closed form") {
  const KineticsParams kin{1.3, 0.6};
  const TransportParams tp{1.1, 0.2, 0.0};
  const double g = kin.total_rate(), lm = kin.lambda * kin.mu, v2 = tp.v * tp.v;
  for (double t : {0.0, 0.01, 1.0, 7.0}) {
    const auto m = moments_s(kin, tp, t, Conditioning::None, Initial::Equilibrium);
    const double var = kin.pi_free() * 2 * tp.d_l * t + 2 * lm * v2 * t / (g * g * g) -
                       2 * lm * v2 * (1 - std::exp(-g * t)) / (g * g * g * g);
    CHECK(m.mean == doctest::Approx(kin.pi_free() * tp.v * t));
    CHECK(m.variance == doctest::Approx(var).epsilon(1e-12));
  }
}

TEST_CASE("unconditional moments: long-time slope") {
  const KineticsParams kin{2.0, 1.0};
  SUBCASE("no dispersion gives 2 D*") {
    const TransportParams tp{1.0, 0.0, 0.0};
    const double t = 1e5;
    const auto m = moments_s(kin, tp, t, Conditioning::None, Initial::Equilibrium);
    CHECK(m.variance / t == doctest::Approx(2 * derive(kin, tp).d_star).epsilon(1e-4));
  }
  SUBCASE("slope equals 2 D_e") {
    const TransportParams tp{1.0, 0.3, 0.0};
    const double t = 200.0;
    const double slope = moments_s(kin, tp, t + 1, Conditioning::None, Initial::Equilibrium).variance -
                         moments_s(kin, tp, t, Conditioning::None, Initial::Equilibrium).variance;
    CHECK(slope == doctest::Approx(2 * derive(kin, tp).d_e).epsilon(1e-10));
  }
}

TEST_CASE("residence moments against the matrix exponential") {
  const KineticsParams kin{0.8, 1.7};
  for (double t : {0.05, 1.0, 6.0}) {
    for (Phase i : {Phase::Free, Phase::Adsorbed}) {
      const Initial init = i == Phase::Free ? Initial::Free : Initial::Adsorbed;
      CHECK(residence_moments(kin, t, init).first ==
            doctest::Approx(oracle::expected_free_time(i, t, kin)).epsilon(1e-11));
      for (Phase j : {Phase::Free, Phase::Adsorbed}) {
        CHECK(residence_moments(kin, t, init, j).probability ==
              doctest::Approx(oracle::transition(i, j, t, kin)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("phase-conditioned moments: mass balance of raw moments") {
  const KineticsParams kin{1.0, 2.0};
  const TransportParams tp{1.0, 0.1, 0.0};
  for (Initial init : {Initial::Free, Initial::Adsorbed, Initial::Equilibrium}) {
    const double t = 1.5;
    const auto all = moments_s(kin, tp, t, Conditioning::None, init);
    const auto f = moments_s(kin, tp, t, Conditioning::FreeAtT, init);
    const auto a = moments_s(kin, tp, t, Conditioning::AdsorbedAtT, init);
    CHECK(f.probability + a.probability == doctest::Approx(1.0));
    CHECK(f.probability * f.mean + a.probability * a.mean == doctest::Approx(all.mean));
    const auto raw2 = [](const MomentSet& m) { return m.variance + m.mean * m.mean; };
    CHECK(f.probability * raw2(f) + a.probability * raw2(a) == doctest::Approx(raw2(all)));
  }
}

TEST_CASE("initial laws combine through raw moments") {
  const KineticsParams kin{1.0, 3.0};
  const TransportParams tp{1.0, 0.05, 0.0};
  const double t = 0.8;
  const auto f = moments_s(kin, tp, t, Conditioning::None, Initial::Free);
  const auto a = moments_s(kin, tp, t, Conditioning::None, Initial::Adsorbed);
  const auto eq = moments_s(kin, tp, t, Conditioning::None, Initial::Equilibrium);
  const double pf = kin.pi_free(), pa = kin.pi_adsorbed();
  const double raw2 = pf * (f.variance + f.mean * f.mean) + pa * (a.variance + a.mean * a.mean);
  CHECK(pf * f.mean + pa * a.mean == doctest::Approx(eq.mean));
  CHECK(raw2 - eq.mean * eq.mean == doctest::Approx(eq.variance));
  CHECK(pf * f.variance + pa * a.variance != doctest::Approx(eq.variance));
}

TEST_CASE("free particles lead the plume") {
  const TransportParams tp{1.0, 0.1, 0.0};
  for (double l : {0.1, 1.0, 5.0}) {
    for (double m : {0.1, 1.0, 5.0}) {
      for (double t : {0.01, 0.5, 3.0, 20.0}) {
        const KineticsParams kin{l, m};
        CHECK(moments_s(kin, tp, t, Conditioning::FreeAtT, Initial::Equilibrium).mean >
              moments_s(kin, tp, t, Conditioning::None, Initial::Equilibrium).mean);
      }
    }
  }
}

TEST_CASE("zero time") {
  const auto m = moments_s({1.0, 1.0}, {1.0, 0.1, 0.0}, 0.0, Conditioning::None, Initial::Equilibrium);
  CHECK(m.mean == 0.0);
  CHECK(m.variance == 0.0);
  CHECK(sigma_ff_sq({1.0, 1.0}, {1.0, 0.1, 0.0}, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sigma_ff: long-time slope is 2 D_e") {
  for (const KineticsParams kin : {KineticsParams{1.0, 1.0}, {0.5, 2.0}, {3.0, 0.7}}) {
    const TransportParams tp{1.0, 0.1, 0.0};
    const double t = 80.0 / kin.total_rate();
    const double slope = sigma_ff_sq(kin, tp, t + 1.0) - sigma_ff_sq(kin, tp, t);
    CHECK(slope == doctest::Approx(2 * derive(kin, tp).d_e).epsilon(1e-6));
  }
  CHECK_THROWS_AS(sigma_ff_sq({1.0, 0.0}, {1.0, 0.1, 0.0}, 1.0), DegenerateKinetics);
}

TEST_CASE("sigma_ff: matches the free-to-free conditional variance") {
  const KineticsParams kin{1.0, 1.0};
  const TransportParams tp{1.0, 0.1, 0.0};
  for (double t : {0.3, 2.0, 9.0}) {
    const auto r = residence_moments(kin, t, Initial::Free, Phase::Free);
    const double mean = r.first / r.probability;
    const double var = 2 * tp.d_l * mean + r.second / r.probability - mean * mean;
    CHECK(sigma_ff_sq(kin, tp, t) == doctest::Approx(var).epsilon(1e-10));
  }
}

TEST_CASE("discrete moments converge to the continuous ones at first order") {
  const KineticsParams kin{1.0, 2.0};
  const TransportParams tp{1.0, 0.1, 0.0};
  const double t = 3.0;
  const auto exact = moments_s(kin, tp, t, Conditioning::None, Initial::Equilibrium);
  double prev = 0.0;
  for (long n : {50L, 100L, 200L, 400L}) {
    const auto dm = discrete_moments_s(DiscreteKinetics::from_rates(kin, t, n), tp);
    CHECK(dm.mean == doctest::Approx(exact.mean).epsilon(1e-13));
    const double err = std::abs(dm.variance - exact.variance);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("moment curve csv") {
  std::vector<MomentSet> curve(1);
  curve[0].t = 1.0;
  std::ostringstream os;
  write_moment_curve_csv(os, curve);
  CHECK(os.str() == "t,mean,variance,conditioning,initial\n1,0,0,none,equilibrium\n");
  CHECK(parse_conditioning(to_string(Conditioning::FreeAtT)) == Conditioning::FreeAtT);
}
